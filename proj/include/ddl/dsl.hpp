/* Copyright 2026 The ddlpo Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

#pragma once

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ddl/extension.hpp"
#include "ddl/literal.hpp"
#include "ddl/theory.hpp"

namespace ddl {

/// Byte range in the source text; line and column are 1-based.
struct Span {
  std::size_t offset = 0;
  std::size_t length = 0;
  std::size_t line = 1;
  std::size_t column = 1;

  bool operator==(const Span&) const = default;
};

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  Span span;
  std::string message;

  [[nodiscard]] std::string str() const {
    return std::to_string(span.line) + ":" + std::to_string(span.column) + ": " +
           (severity == Severity::Error ? "error: " : "warning: ") + message;
  }
};

struct ParseResult {
  std::optional<Theory> theory;  // set when there are no errors
  std::vector<Diagnostic> diagnostics;

  [[nodiscard]] bool ok() const { return theory.has_value(); }
  [[nodiscard]] bool has_warnings() const {
    return std::any_of(diagnostics.begin(), diagnostics.end(),
                       [](const Diagnostic& d) { return d.severity == Severity::Warning; });
  }
};

namespace detail {

enum class Tok {
  Ident, Tilde, Arrow, Star, Comma, Colon, Gt, Dot, OblOpen, NegOblOpen, Close, Amp, Bad, End
};

struct Token {
  Tok kind = Tok::End;
  Span span;
  std::string text;
  Arrow arrow = Arrow::DefeasibleConstitutive;
};

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip();
    Token t;
    t.span = here(0);
    if (pos_ >= src_.size()) return t;
    char c = src_[pos_];
    auto single = [&](Tok k) {
      t.kind = k;
      t.text = std::string(1, c);
      advance(1);
      t.span.length = 1;
      return t;
    };
    auto multi = [&](Tok k, std::size_t n) {
      t.kind = k;
      t.text = std::string(src_.substr(pos_, n));
      advance(n);
      t.span.length = n;
      return t;
    };
    if (starts("=O>")) return arrow(multi(Tok::Arrow, 3), Arrow::DefeasiblePrescriptive);
    if (starts("~O>")) return arrow(multi(Tok::Arrow, 3), Arrow::DefeaterPrescriptive);
    if (starts("=>")) return arrow(multi(Tok::Arrow, 2), Arrow::DefeasibleConstitutive);
    if (starts("~>")) return arrow(multi(Tok::Arrow, 2), Arrow::DefeaterConstitutive);
    if (starts("-O[")) return multi(Tok::NegOblOpen, 3);
    if (starts("O[")) return multi(Tok::OblOpen, 2);
    switch (c) {
      case '~': return single(Tok::Tilde);
      case '*': return single(Tok::Star);
      case ',': return single(Tok::Comma);
      case ':': return single(Tok::Colon);
      case '>': return single(Tok::Gt);
      case '.': return single(Tok::Dot);
      case ']': return single(Tok::Close);
      case '&': return single(Tok::Amp);
      default: break;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t n = 1;
      while (pos_ + n < src_.size() &&
             (std::isalnum(static_cast<unsigned char>(src_[pos_ + n])) || src_[pos_ + n] == '_'))
        ++n;
      return multi(Tok::Ident, n);
    }
    // Consume one UTF-8 sequence so spans stay on character boundaries.
    std::size_t n = 1;
    while (pos_ + n < src_.size() && (static_cast<unsigned char>(src_[pos_ + n]) & 0xC0) == 0x80) ++n;
    return multi(Tok::Bad, n);
  }

  Span here(std::size_t length) const { return {pos_, length, line_, col_}; }

 private:
  static Token arrow(Token t, Arrow a) {
    t.arrow = a;
    return t;
  }

  bool starts(std::string_view s) const { return src_.substr(pos_, s.size()) == s; }

  void advance(std::size_t n) {
    for (std::size_t i = 0; i < n && pos_ < src_.size(); ++i, ++pos_) {
      if (src_[pos_] == '\n') {
        ++line_;
        col_ = 1;
      } else {
        ++col_;
      }
    }
  }

  void skip() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance(1);
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance(1);
      } else {
        break;
      }
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : lex_(src) {
    cur_ = lex_.next();
    ahead_ = lex_.next();
  }

  ParseResult run() {
    while (cur_.kind != Tok::End) {
      if (!statement()) recover();
    }
    return finish();
  }

 private:
  struct ParsedRule {
    Rule rule;
    Span label_span;
  };

  void shift() {
    cur_ = ahead_;
    ahead_ = lex_.next();
  }

  bool fail(const Span& s, std::string msg) {
    diags_.push_back({Severity::Error, s, std::move(msg)});
    return false;
  }

  bool fail_here(const std::string& expected) {
    if (cur_.kind == Tok::End) return fail(cur_.span, "unexpected end of input, expected " + expected);
    if (cur_.kind == Tok::Bad) return fail(cur_.span, "unexpected character '" + cur_.text + "'");
    return fail(cur_.span, "expected " + expected + ", found '" + cur_.text + "'");
  }

  bool expect(Tok k, const char* what) {
    if (cur_.kind != k) return fail_here(what);
    shift();
    return true;
  }

  // Skips to just past the next statement terminator.
  void recover() {
    while (cur_.kind != Tok::End && cur_.kind != Tok::Dot) shift();
    if (cur_.kind == Tok::Dot) shift();
  }

  std::optional<Literal> literal() {
    bool neg = false;
    if (cur_.kind == Tok::Tilde) {
      neg = true;
      shift();
    }
    if (cur_.kind != Tok::Ident) {
      fail_here("an atom");
      return std::nullopt;
    }
    Literal l(cur_.text, !neg);
    shift();
    return l;
  }

  bool statement() {
    if (cur_.kind == Tok::Ident && cur_.text == "fact" && (ahead_.kind == Tok::Ident || ahead_.kind == Tok::Tilde ||
                                                          ahead_.kind == Tok::OblOpen || ahead_.kind == Tok::NegOblOpen)) {
      shift();
      if (cur_.kind == Tok::OblOpen || cur_.kind == Tok::NegOblOpen)
        return fail(cur_.span, "deontic literal not allowed as fact");
      auto start = cur_.span;
      auto l = literal();
      if (!l) return false;
      if (!expect(Tok::Dot, "'.'")) return false;
      facts_.emplace_back(*l, start);
      return true;
    }
    if (cur_.kind == Tok::Ident && cur_.text == "query" && ahead_.kind == Tok::OblOpen) {
      shift();
      auto start = cur_.span;
      shift();
      std::vector<Literal> lits;
      for (;;) {
        auto l = literal();
        if (!l) return false;
        lits.push_back(*l);
        if (cur_.kind == Tok::Amp) {
          shift();
          continue;
        }
        break;
      }
      if (!expect(Tok::Close, "']'")) return false;
      if (!expect(Tok::Dot, "'.'")) return false;
      queries_.emplace_back(Conjunction(std::move(lits)), start);
      return true;
    }
    if (cur_.kind != Tok::Ident) return fail_here("a statement");
    Token label = cur_;
    shift();
    if (cur_.kind == Tok::Gt) {
      shift();
      if (cur_.kind != Tok::Ident) return fail_here("a rule label");
      Token weaker = cur_;
      shift();
      if (!expect(Tok::Dot, "'.'")) return false;
      sup_.push_back({label, weaker});
      return true;
    }
    if (!expect(Tok::Colon, "':' or '>'")) return false;
    std::vector<BodyAtom> body;
    if (cur_.kind != Tok::Arrow) {
      for (;;) {
        auto a = body_atom();
        if (!a) return false;
        body.push_back(std::move(*a));
        if (cur_.kind == Tok::Comma) {
          shift();
          continue;
        }
        break;
      }
    }
    if (cur_.kind != Tok::Arrow) return fail_here("an arrow (=>, ~>, =O>, ~O>)");
    Arrow arr = cur_.arrow;
    shift();
    std::vector<Literal> head;
    Span head_span = cur_.span;
    for (;;) {
      auto l = literal();
      if (!l) return false;
      head.push_back(*l);
      if (cur_.kind == Tok::Star) {
        shift();
        continue;
      }
      if (cur_.kind == Tok::Amp) return fail(cur_.span, "conjunctions are only allowed under O[...]");
      break;
    }
    if (head.size() > 1 && arr != Arrow::DefeasiblePrescriptive)
      return fail(head_span, "compensation chain only allowed on =O> rules");
    if (!expect(Tok::Dot, "'.'")) return false;
    rules_.push_back({Rule(label.text, std::move(body), arr, OtimesChain(std::move(head))), label.span});
    return true;
  }

  std::optional<BodyAtom> body_atom() {
    if (cur_.kind == Tok::NegOblOpen) {
      shift();
      auto l = literal();
      if (!l) return std::nullopt;
      if (cur_.kind == Tok::Amp) {
        fail(cur_.span, "conjunctions are only allowed under O[...]");
        return std::nullopt;
      }
      if (!expect(Tok::Close, "']'")) return std::nullopt;
      return BodyAtom::neg_obl(*l);
    }
    if (cur_.kind == Tok::OblOpen) {
      auto start = cur_.span;
      shift();
      std::vector<Literal> lits;
      for (;;) {
        auto l = literal();
        if (!l) return std::nullopt;
        lits.push_back(*l);
        if (cur_.kind == Tok::Amp) {
          shift();
          continue;
        }
        break;
      }
      if (!expect(Tok::Close, "']'")) return std::nullopt;
      if (lits.size() == 1) return BodyAtom::obl(lits.front());
      Conjunction c(std::move(lits));
      conj_spans_.emplace(c, start);
      return BodyAtom::conj(std::move(c));
    }
    auto l = literal();
    if (!l) return std::nullopt;
    if (cur_.kind == Tok::Amp) {
      fail(cur_.span, "conjunctions are only allowed under O[...]");
      return std::nullopt;
    }
    return BodyAtom::plain(*l);
  }

  ParseResult finish() {
    std::map<std::string, Span> labels;
    std::vector<Rule> rules;
    for (auto& pr : rules_) {
      if (!labels.emplace(pr.rule.label, pr.label_span).second) {
        fail(pr.label_span, "duplicate rule label " + pr.rule.label);
        continue;
      }
      rules.push_back(pr.rule);
    }
    std::vector<std::pair<std::string, std::string>> sup;
    for (const auto& [s, w] : sup_) {
      bool ok = true;
      for (const auto* t : {&s, &w}) {
        if (!labels.count(t->text)) {
          fail(t->span, "unknown rule label " + t->text + " in superiority");
          ok = false;
        }
      }
      if (ok) sup.emplace_back(s.text, w.text);
    }
    warnings(sup);
    ParseResult out;
    std::stable_sort(diags_.begin(), diags_.end(),
                     [](const Diagnostic& a, const Diagnostic& b) { return a.span.offset < b.span.offset; });
    out.diagnostics = std::move(diags_);
    bool errors = std::any_of(out.diagnostics.begin(), out.diagnostics.end(),
                              [](const Diagnostic& d) { return d.severity == Severity::Error; });
    if (errors) return out;
    std::vector<Literal> facts;
    for (const auto& f : facts_) facts.push_back(f.first);
    std::vector<Conjunction> queries;
    for (const auto& q : queries_) queries.push_back(q.first);
    out.theory = Theory(std::move(facts), std::move(rules), std::move(sup), std::move(queries));
    return out;
  }

  void warn(const Span& s, std::string msg) { diags_.push_back({Severity::Warning, s, std::move(msg)}); }

  void warnings(const std::vector<std::pair<std::string, std::string>>& sup) {
    std::set<Literal> seen;
    for (const auto& [f, span] : facts_) {
      if (seen.count(f.complement()) && !seen.count(f))
        warn(span, "facts contain complementary literals " + f.str() + " and " + f.complement().str());
      seen.insert(f);
    }
    // A superiority pair lies on a cycle iff its weaker rule reaches its stronger one.
    std::map<std::string, std::vector<std::string>> succ;
    for (const auto& [a, b] : sup) succ[a].push_back(b);
    auto reaches = [&](const std::string& from, const std::string& to) {
      std::set<std::string> visited{from};
      std::vector<std::string> todo{from};
      while (!todo.empty()) {
        auto v = todo.back();
        todo.pop_back();
        if (v == to) return true;
        for (const auto& w : succ[v])
          if (visited.insert(w).second) todo.push_back(w);
      }
      return false;
    };
    for (const auto& [s, w] : sup_) {
      if (!succ.count(s.text)) continue;
      if (reaches(w.text, s.text)) {
        warn(s.span, "superiority relation is cyclic through " + s.text + " > " + w.text);
        break;
      }
    }
    for (const auto& [c, span] : conj_spans_)
      if (c.has_complementary_pair()) warn(span, "conjunction " + c.str() + " contains a complementary pair");
    for (const auto& [c, span] : queries_)
      if (c.has_complementary_pair() && !conj_spans_.count(c))
        warn(span, "conjunction " + c.str() + " contains a complementary pair");
  }

  Lexer lex_;
  Token cur_;
  Token ahead_;
  std::vector<Diagnostic> diags_;
  std::vector<std::pair<Literal, Span>> facts_;
  std::vector<std::pair<Conjunction, Span>> queries_;
  std::vector<ParsedRule> rules_;
  std::vector<std::pair<Token, Token>> sup_;
  std::map<Conjunction, Span> conj_spans_;
};

}  // namespace detail

/// Parses the theory language. Never throws on malformed input: errors come
/// back as diagnostics and leave `theory` empty; warnings accompany a theory.
inline ParseResult parse_theory(std::string_view text) {
  return detail::Parser(text).run();
}

/// Canonical text form; parse_theory(serialize_theory(t)) reproduces t.
inline std::string serialize_theory(const Theory& t) {
  std::ostringstream out;
  out << "# " << t.facts().size() << " facts, " << t.rules().size() << " rules\n";
  for (const auto& f : t.facts()) out << "fact " << f.str() << ".\n";
  for (const auto& r : t.rules()) out << r.str() << ".\n";
  for (const auto& [s, w] : t.superiority()) out << s << " > " << w << ".\n";
  for (const auto& q : t.queries()) out << "query O[" << q.str() << "].\n";
  return out.str();
}

enum class Format { Json, Text };

namespace detail {
template <typename Set>
std::vector<std::string> sorted_strings(const Set& s) {
  std::vector<std::string> out;
  for (const auto& x : s) out.push_back(x.str());
  std::sort(out.begin(), out.end());
  return out;
}

inline std::vector<std::pair<const char*, std::vector<std::string>>> extension_fields(const Extension& e) {
  return {{"factual_pos", sorted_strings(e.factual_pos)},
          {"factual_neg", sorted_strings(e.factual_neg)},
          {"obligation_pos", sorted_strings(e.obligation_pos)},
          {"obligation_neg", sorted_strings(e.obligation_neg)},
          {"conj_pos", sorted_strings(e.conj_pos)},
          {"conj_neg", sorted_strings(e.conj_neg)}};
}
}  // namespace detail

inline nlohmann::ordered_json extension_json(const Extension& e) {
  nlohmann::ordered_json j = nlohmann::ordered_json::object();
  for (auto& [key, values] : detail::extension_fields(e)) j[key] = values;
  return j;
}

inline std::string emit_extension(const Extension& e, Format format) {
  if (format == Format::Json) return extension_json(e).dump(2) + "\n";
  std::string out;
  for (auto& [key, values] : detail::extension_fields(e)) {
    out += key;
    out += ":";
    for (std::size_t i = 0; i < values.size(); ++i) out += (i ? ", " : " ") + values[i];
    out += "\n";
  }
  return out;
}

/// Reads the JSON produced by emit_extension.
inline Extension parse_extension_json(const std::string& text) {
  auto j = nlohmann::json::parse(text);
  Extension e;
  for (const auto& s : j.at("factual_pos")) e.factual_pos.insert(Literal::from(s.get<std::string>()));
  for (const auto& s : j.at("factual_neg")) e.factual_neg.insert(Literal::from(s.get<std::string>()));
  for (const auto& s : j.at("obligation_pos")) e.obligation_pos.insert(Literal::from(s.get<std::string>()));
  for (const auto& s : j.at("obligation_neg")) e.obligation_neg.insert(Literal::from(s.get<std::string>()));
  for (const auto& s : j.at("conj_pos")) e.conj_pos.insert(Conjunction::from(s.get<std::string>()));
  for (const auto& s : j.at("conj_neg")) e.conj_neg.insert(Conjunction::from(s.get<std::string>()));
  return e;
}

}  // namespace ddl
