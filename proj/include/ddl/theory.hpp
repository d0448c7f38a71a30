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
#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ddl/literal.hpp"

namespace ddl {

enum class Arrow {
  DefeasibleConstitutive,  // =>
  DefeaterConstitutive,    // ~>
  DefeasiblePrescriptive,  // =O>
  DefeaterPrescriptive,    // ~O>
};

inline bool is_prescriptive(Arrow a) {
  return a == Arrow::DefeasiblePrescriptive || a == Arrow::DefeaterPrescriptive;
}
inline bool is_defeasible(Arrow a) {
  return a == Arrow::DefeasibleConstitutive || a == Arrow::DefeasiblePrescriptive;
}

inline const char* arrow_token(Arrow a) {
  switch (a) {
    case Arrow::DefeasibleConstitutive: return "=>";
    case Arrow::DefeaterConstitutive: return "~>";
    case Arrow::DefeasiblePrescriptive: return "=O>";
    case Arrow::DefeaterPrescriptive: return "~O>";
  }
  return "?";
}

struct Rule {
  std::string label;
  std::vector<BodyAtom> antecedent;  // sorted, duplicate-free
  Arrow arrow = Arrow::DefeasibleConstitutive;
  OtimesChain head;

  Rule() = default;

  /// Canonicalizes the antecedent. Only defeasible prescriptive rules may
  /// carry a chain longer than one element.
  Rule(std::string lbl, std::vector<BodyAtom> body, Arrow arr, OtimesChain hd)
      : label(std::move(lbl)), antecedent(std::move(body)), arrow(arr), head(std::move(hd)) {
    if (label.empty()) throw std::invalid_argument("rule label must not be empty");
    if (head.length() == 0) throw std::invalid_argument("rule " + label + " has no head");
    if (head.length() > 1 && arrow != Arrow::DefeasiblePrescriptive)
      throw std::invalid_argument("rule " + label +
                                  ": compensation chains are only allowed on =O> rules");
    std::sort(antecedent.begin(), antecedent.end());
    antecedent.erase(std::unique(antecedent.begin(), antecedent.end()), antecedent.end());
  }

  [[nodiscard]] bool prescriptive() const { return is_prescriptive(arrow); }
  [[nodiscard]] bool defeasible() const { return is_defeasible(arrow); }

  [[nodiscard]] std::string str() const {
    std::string out = label + ":";
    for (std::size_t i = 0; i < antecedent.size(); ++i) {
      out += i ? ", " : " ";
      out += antecedent[i].str();
    }
    out += " ";
    out += arrow_token(arrow);
    out += " " + head.str();
    return out;
  }

  bool operator==(const Rule&) const = default;
};

/// The four antecedent sets r#, rO, rP and r-conj of a rule.
struct AntecedentPartition {
  std::set<Literal> plain;
  std::set<Literal> obl;
  std::set<Literal> neg_obl;
  std::set<Conjunction> conj;

  bool operator==(const AntecedentPartition&) const = default;
};

inline AntecedentPartition antecedent_partition(const Rule& r) {
  AntecedentPartition p;
  for (const auto& a : r.antecedent) {
    switch (a.kind) {
      case BodyKind::Plain: p.plain.insert(a.literal()); break;
      case BodyKind::Obl: p.obl.insert(a.literal()); break;
      case BodyKind::NegObl: p.neg_obl.insert(a.literal()); break;
      case BodyKind::ConjObl: p.conj.insert(a.conjunction()); break;
    }
  }
  return p;
}

/// Position classes of the per-atom occurrence array. Each atom owns ten
/// cells; the `Neg` cells hold occurrences of the negated atom.
enum class Cell : std::size_t {
  HeadConstitutive,
  HeadConstitutiveNeg,
  HeadPrescriptive,
  HeadPrescriptiveNeg,
  Body,
  BodyNeg,
  BodyObl,
  BodyOblNeg,
  BodyNegObl,
  BodyNegOblNeg,
};
inline constexpr std::size_t kCellCount = 10;

struct Occurrence {
  std::size_t rule = 0;      // index into Theory::rules()
  std::size_t position = 0;  // 1-based chain index for head cells, 0 for body cells

  bool operator==(const Occurrence&) const = default;
  auto operator<=>(const Occurrence&) const = default;
};

class OccurrenceIndex {
 public:
  using Cells = std::array<std::vector<Occurrence>, kCellCount>;

  void add_head(const Literal& l, bool prescriptive, Occurrence occ) {
    auto base = prescriptive ? Cell::HeadPrescriptive : Cell::HeadConstitutive;
    cells_for(l.atom)[signed_cell(base, l.positive)].push_back(occ);
  }

  void add_body(const BodyAtom& a, std::size_t rule) {
    switch (a.kind) {
      case BodyKind::Plain:
        cells_for(a.literal().atom)[signed_cell(Cell::Body, a.literal().positive)].push_back({rule, 0});
        break;
      case BodyKind::Obl:
        cells_for(a.literal().atom)[signed_cell(Cell::BodyObl, a.literal().positive)].push_back({rule, 0});
        break;
      case BodyKind::NegObl:
        cells_for(a.literal().atom)[signed_cell(Cell::BodyNegObl, a.literal().positive)].push_back({rule, 0});
        break;
      case BodyKind::ConjObl:
        conjunctions_[a.conjunction()].push_back(rule);
        break;
    }
  }

  [[nodiscard]] const std::vector<Occurrence>& cell(const std::string& atom, Cell c) const {
    static const std::vector<Occurrence> kEmpty;
    auto it = atoms_.find(atom);
    return it == atoms_.end() ? kEmpty : it->second[static_cast<std::size_t>(c)];
  }

  /// Head occurrences of literal `l` among constitutive or prescriptive rules.
  [[nodiscard]] const std::vector<Occurrence>& heads(const Literal& l, bool prescriptive) const {
    auto base = prescriptive ? Cell::HeadPrescriptive : Cell::HeadConstitutive;
    return cell(l.atom, static_cast<Cell>(signed_cell(base, l.positive)));
  }

  [[nodiscard]] const std::map<std::string, Cells>& atoms() const { return atoms_; }
  [[nodiscard]] const std::map<Conjunction, std::vector<std::size_t>>& conjunctions() const {
    return conjunctions_;
  }

 private:
  static std::size_t signed_cell(Cell base, bool positive) {
    return static_cast<std::size_t>(base) + (positive ? 0 : 1);
  }
  Cells& cells_for(const std::string& atom) { return atoms_[atom]; }

  std::map<std::string, Cells> atoms_;
  std::map<Conjunction, std::vector<std::size_t>> conjunctions_;
};

enum class KindFilter { Any, Prescriptive, Constitutive };
enum class StrengthFilter { Any, Defeasible };

/// A defeasible theory (F, R, >). Immutable once constructed; rules are
/// stored in label order. `queries` lists conjunctive obligations whose
/// status should be reported even though no rule body mentions them.
class Theory {
 public:
  Theory() = default;

  Theory(std::vector<Literal> facts, std::vector<Rule> rules,
         std::vector<std::pair<std::string, std::string>> superiority,
         std::vector<Conjunction> queries = {})
      : facts_(facts.begin(), facts.end()),
        rules_(std::move(rules)),
        superiority_(superiority.begin(), superiority.end()),
        queries_(queries.begin(), queries.end()) {
    std::sort(rules_.begin(), rules_.end(),
              [](const Rule& a, const Rule& b) { return a.label < b.label; });
    for (std::size_t i = 0; i < rules_.size(); ++i) {
      if (!labels_.emplace(rules_[i].label, i).second)
        throw std::invalid_argument("duplicate rule label " + rules_[i].label);
    }
    for (const auto& [stronger, weaker] : superiority_) {
      if (!labels_.count(stronger) || !labels_.count(weaker))
        throw std::invalid_argument("superiority " + stronger + " > " + weaker +
                                    " references an unknown rule");
    }
    for (std::size_t i = 0; i < rules_.size(); ++i) {
      const auto& r = rules_[i];
      for (std::size_t k = 1; k <= r.head.length(); ++k)
        index_.add_head(r.head.at(k), r.prescriptive(), {i, k});
      for (const auto& a : r.antecedent) index_.add_body(a, i);
    }
  }

  [[nodiscard]] const std::set<Literal>& facts() const { return facts_; }
  [[nodiscard]] const std::vector<Rule>& rules() const { return rules_; }
  [[nodiscard]] const std::set<std::pair<std::string, std::string>>& superiority() const {
    return superiority_;
  }
  [[nodiscard]] const std::set<Conjunction>& queries() const { return queries_; }
  [[nodiscard]] const OccurrenceIndex& index() const { return index_; }

  [[nodiscard]] bool is_fact(const Literal& l) const { return facts_.count(l) != 0; }

  [[nodiscard]] std::optional<std::size_t> rule_index(const std::string& label) const {
    auto it = labels_.find(label);
    if (it == labels_.end()) return std::nullopt;
    return it->second;
  }

  [[nodiscard]] const Rule* find(const std::string& label) const {
    auto i = rule_index(label);
    return i ? &rules_[*i] : nullptr;
  }

  [[nodiscard]] bool stronger(const std::string& t, const std::string& s) const {
    return superiority_.count({t, s}) != 0;
  }

  /// R[q, n] (or R[q] without an index) restricted by rule kind and strength.
  [[nodiscard]] std::vector<const Rule*> rules_for(const Literal& q,
                                                   std::optional<std::size_t> index = std::nullopt,
                                                   KindFilter kind = KindFilter::Any,
                                                   StrengthFilter strength = StrengthFilter::Any) const {
    std::set<std::size_t> hits;
    auto collect = [&](bool prescriptive) {
      for (const auto& occ : index_.heads(q, prescriptive)) {
        if (index && occ.position != *index) continue;
        if (strength == StrengthFilter::Defeasible && !rules_[occ.rule].defeasible()) continue;
        hits.insert(occ.rule);
      }
    };
    if (kind != KindFilter::Prescriptive) collect(false);
    if (kind != KindFilter::Constitutive) collect(true);
    std::vector<const Rule*> out;
    for (auto i : hits) out.push_back(&rules_[i]);
    return out;
  }

  /// Non-fatal findings: complementary facts, cyclic superiority, and
  /// conjunctions containing a literal together with its complement.
  [[nodiscard]] std::vector<std::string> warnings() const {
    std::vector<std::string> out;
    for (const auto& f : facts_)
      if (f.positive && facts_.count(f.complement()))
        out.push_back("facts contain complementary literals " + f.str() + " and " +
                      f.complement().str());
    if (auto cyc = superiority_cycle()) out.push_back("superiority relation is cyclic through " + *cyc);
    std::set<Conjunction> seen;
    auto check = [&](const Conjunction& c) {
      if (c.has_complementary_pair() && seen.insert(c).second)
        out.push_back("conjunction " + c.str() + " contains a complementary pair");
    };
    for (const auto& r : rules_)
      for (const auto& a : r.antecedent)
        if (a.kind == BodyKind::ConjObl) check(a.conjunction());
    for (const auto& q : queries_) check(q);
    return out;
  }

  /// True when F has no complementary pair and the closure of > is acyclic.
  [[nodiscard]] bool consistent() const {
    for (const auto& f : facts_)
      if (facts_.count(f.complement())) return false;
    return !superiority_cycle().has_value();
  }

  bool operator==(const Theory& o) const {
    return facts_ == o.facts_ && rules_ == o.rules_ && superiority_ == o.superiority_ &&
           queries_ == o.queries_;
  }

 private:
  // Returns a label on a cycle of >, if any.
  [[nodiscard]] std::optional<std::string> superiority_cycle() const {
    std::map<std::string, std::vector<std::string>> succ;
    for (const auto& [a, b] : superiority_) succ[a].push_back(b);
    std::map<std::string, int> color;  // 0 white, 1 grey, 2 black
    std::optional<std::string> found;
    auto dfs = [&](auto&& self, const std::string& v) -> void {
      color[v] = 1;
      for (const auto& w : succ[v]) {
        if (found) return;
        if (color[w] == 1) {
          found = w;
          return;
        }
        if (color[w] == 0) self(self, w);
      }
      color[v] = 2;
    };
    for (const auto& [v, _] : succ) {
      if (found) break;
      if (color[v] == 0) dfs(dfs, v);
    }
    return found;
  }

  std::set<Literal> facts_;
  std::vector<Rule> rules_;
  std::set<std::pair<std::string, std::string>> superiority_;
  std::set<Conjunction> queries_;
  std::map<std::string, std::size_t> labels_;
  OccurrenceIndex index_;
};

}  // namespace ddl
