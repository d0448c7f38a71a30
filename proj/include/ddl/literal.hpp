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
#include <compare>
#include <cstddef>
#include <initializer_list>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace ddl {

/// A signed propositional atom. `~p` is the complement of `p`.
struct Literal {
  std::string atom;
  bool positive = true;

  Literal() = default;
  Literal(std::string a, bool pos = true) : atom(std::move(a)), positive(pos) {}

  /// Parses `a` or `~a` (no validation of the identifier).
  static Literal from(std::string_view text) {
    if (!text.empty() && text.front() == '~')
      return Literal(std::string(text.substr(1)), false);
    return Literal(std::string(text), true);
  }

  [[nodiscard]] Literal complement() const { return Literal(atom, !positive); }

  [[nodiscard]] std::string str() const { return positive ? atom : "~" + atom; }

  bool operator==(const Literal&) const = default;

  // Canonical order: by atom, positive before negative.
  std::strong_ordering operator<=>(const Literal& o) const {
    if (auto c = atom <=> o.atom; c != 0) return c;
    return o.positive <=> positive;
  }
};

inline Literal complement(const Literal& l) { return l.complement(); }

/// Conjunctive obligation target c1 & ... & cm. Conjuncts are kept sorted and
/// duplicate-free, so two conjunctions over the same literal set compare equal.
class Conjunction {
 public:
  Conjunction() = default;

  explicit Conjunction(std::vector<Literal> conjuncts) : conjuncts_(std::move(conjuncts)) {
    canonicalize();
  }

  Conjunction(std::initializer_list<Literal> conjuncts) : conjuncts_(conjuncts) {
    canonicalize();
  }

  /// Parses `a & ~b & c`.
  static Conjunction from(std::string_view text) {
    std::vector<Literal> lits;
    std::size_t pos = 0;
    while (pos <= text.size()) {
      auto amp = text.find('&', pos);
      auto piece = text.substr(pos, amp == std::string_view::npos ? std::string_view::npos : amp - pos);
      auto b = piece.find_first_not_of(" \t");
      auto e = piece.find_last_not_of(" \t");
      if (b == std::string_view::npos) throw std::invalid_argument("empty conjunct");
      lits.push_back(Literal::from(piece.substr(b, e - b + 1)));
      if (amp == std::string_view::npos) break;
      pos = amp + 1;
    }
    return Conjunction(std::move(lits));
  }

  [[nodiscard]] const std::vector<Literal>& conjuncts() const { return conjuncts_; }
  [[nodiscard]] std::size_t size() const { return conjuncts_.size(); }
  [[nodiscard]] bool contains(const Literal& l) const;

  /// The set C of complements of the conjuncts.
  [[nodiscard]] std::vector<Literal> complements() const {
    std::vector<Literal> out;
    out.reserve(conjuncts_.size());
    for (const auto& c : conjuncts_) out.push_back(c.complement());
    return out;
  }

  /// True when some conjunct and its complement are both present.
  [[nodiscard]] bool has_complementary_pair() const {
    for (const auto& c : conjuncts_)
      if (contains(c.complement())) return true;
    return false;
  }

  [[nodiscard]] std::string str() const {
    std::string out;
    for (std::size_t i = 0; i < conjuncts_.size(); ++i) {
      if (i) out += " & ";
      out += conjuncts_[i].str();
    }
    return out;
  }

  bool operator==(const Conjunction&) const = default;
  std::strong_ordering operator<=>(const Conjunction& o) const {
    return std::lexicographical_compare_three_way(conjuncts_.begin(), conjuncts_.end(),
                                                  o.conjuncts_.begin(), o.conjuncts_.end());
  }

 private:
  void canonicalize();

  std::vector<Literal> conjuncts_;
};

/// Compensation chain c1 * c2 * ... * cn; indexes are 1-based.
class OtimesChain {
 public:
  OtimesChain() = default;
  explicit OtimesChain(std::vector<Literal> elements) : elements_(std::move(elements)) {
    if (elements_.empty()) throw std::invalid_argument("empty compensation chain");
  }
  OtimesChain(Literal single) : elements_{std::move(single)} {}
  OtimesChain(std::initializer_list<Literal> elements) : OtimesChain(std::vector<Literal>(elements)) {}

  [[nodiscard]] std::size_t length() const { return elements_.size(); }
  [[nodiscard]] const Literal& at(std::size_t index) const {
    if (index == 0 || index > elements_.size()) throw std::out_of_range("chain index out of range");
    return elements_[index - 1];
  }
  [[nodiscard]] const std::vector<Literal>& elements() const { return elements_; }

  /// All indexes at which `l` appears (duplicates are admitted).
  [[nodiscard]] std::vector<std::size_t> indexes_of(const Literal& l) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < elements_.size(); ++i)
      if (elements_[i] == l) out.push_back(i + 1);
    return out;
  }

  [[nodiscard]] bool contains(const Literal& l) const {
    for (const auto& e : elements_)
      if (e == l) return true;
    return false;
  }

  [[nodiscard]] std::string str() const {
    std::string out;
    for (std::size_t i = 0; i < elements_.size(); ++i) {
      if (i) out += " * ";
      out += elements_[i].str();
    }
    return out;
  }

  bool operator==(const OtimesChain&) const = default;

 private:
  std::vector<Literal> elements_;
};

enum class BodyKind { Plain, Obl, NegObl, ConjObl };

/// One premise of a rule: `l`, `O[l]`, `-O[l]` or `O[c1 & ... & cm]`.
struct BodyAtom {
  BodyKind kind = BodyKind::Plain;
  std::variant<Literal, Conjunction> payload;

  static BodyAtom plain(Literal l) { return {BodyKind::Plain, std::move(l)}; }
  static BodyAtom obl(Literal l) { return {BodyKind::Obl, std::move(l)}; }
  static BodyAtom neg_obl(Literal l) { return {BodyKind::NegObl, std::move(l)}; }
  static BodyAtom conj(Conjunction c) {
    // A conjunction that collapses to one conjunct is an ordinary obligation.
    if (c.size() == 1) return obl(c.conjuncts().front());
    return {BodyKind::ConjObl, std::move(c)};
  }

  [[nodiscard]] const Literal& literal() const { return std::get<Literal>(payload); }
  [[nodiscard]] const Conjunction& conjunction() const { return std::get<Conjunction>(payload); }

  [[nodiscard]] std::string str() const {
    switch (kind) {
      case BodyKind::Plain: return literal().str();
      case BodyKind::Obl: return "O[" + literal().str() + "]";
      case BodyKind::NegObl: return "-O[" + literal().str() + "]";
      case BodyKind::ConjObl: return "O[" + conjunction().str() + "]";
    }
    return {};
  }

  bool operator==(const BodyAtom&) const = default;
  std::strong_ordering operator<=>(const BodyAtom& o) const {
    if (auto c = static_cast<int>(kind) <=> static_cast<int>(o.kind); c != 0) return c;
    if (kind == BodyKind::ConjObl) return conjunction() <=> o.conjunction();
    return literal() <=> o.literal();
  }
};

inline bool Conjunction::contains(const Literal& l) const {
  for (const auto& c : conjuncts_)
    if (c == l) return true;
  return false;
}

inline void Conjunction::canonicalize() {
  if (conjuncts_.empty()) throw std::invalid_argument("empty conjunction");
  std::sort(conjuncts_.begin(), conjuncts_.end());
  conjuncts_.erase(std::unique(conjuncts_.begin(), conjuncts_.end()), conjuncts_.end());
}

}  // namespace ddl
