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
#include <cstddef>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "json.hpp"

#include "ddl/engine.hpp"
#include "ddl/extension.hpp"
#include "ddl/theory.hpp"

namespace ddl {

/// A linear sequence of tagged expressions P(1), ..., P(z).
struct Derivation {
  std::vector<TaggedExpression> steps;

  [[nodiscard]] std::size_t size() const { return steps.size(); }

  [[nodiscard]] std::string str() const {
    std::string out;
    for (const auto& s : steps) out += s.str() + "\n";
    return out;
  }

  bool operator==(const Derivation&) const = default;
};

struct DerivationParse {
  std::optional<Derivation> derivation;
  std::vector<std::string> errors;  // "line N: message"
};

/// One step per line; blank lines and `#` comments are ignored.
inline DerivationParse parse_derivation(std::string_view text) {
  DerivationParse out;
  Derivation d;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    auto line = text.substr(pos, nl == std::string_view::npos ? std::string_view::npos : nl - pos);
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    if (line.find_first_not_of(" \t\r") != std::string_view::npos) {
      try {
        d.steps.push_back(TaggedExpression::parse(line));
      } catch (const std::exception& e) {
        out.errors.push_back("line " + std::to_string(line_no) + ": " + e.what());
      }
    }
    if (nl == std::string_view::npos) break;
    pos = nl + 1;
  }
  if (out.errors.empty()) out.derivation = std::move(d);
  return out;
}

struct StepReport {
  std::size_t position = 0;  // 1-based
  TaggedExpression expression;
  bool justified = false;
  std::string clause;  // clause that justified the step, or the one that failed
  std::string detail;  // offending rule or literal
  std::vector<std::size_t> supports;  // earlier positions the justification uses
};

struct CheckReport {
  std::vector<StepReport> steps;
  bool accepted = true;

  [[nodiscard]] std::optional<std::size_t> first_violation() const {
    for (const auto& s : steps)
      if (!s.justified) return s.position;
    return std::nullopt;
  }

  [[nodiscard]] std::string str() const {
    std::string out;
    for (const auto& s : steps) {
      out += "(" + std::to_string(s.position) + ") " + s.expression.str() + "  " +
             (s.justified ? "justified by " : "violated: ") + s.clause;
      if (!s.detail.empty()) out += " [" + s.detail + "]";
      out += "\n";
    }
    out += accepted ? "accepted\n" : "rejected\n";
    return out;
  }

  [[nodiscard]] nlohmann::ordered_json json() const {
    nlohmann::ordered_json j;
    j["accepted"] = accepted;
    j["steps"] = nlohmann::ordered_json::array();
    for (const auto& s : steps) {
      nlohmann::ordered_json e;
      e["position"] = s.position;
      e["expression"] = s.expression.str();
      e["verdict"] = s.justified ? "justified" : "violated";
      e["clause"] = s.clause;
      e["detail"] = s.detail;
      j["steps"].push_back(e);
    }
    return j;
  }
};

/// Incremental checker: validates a candidate step against the accepted
/// prefix, then appends it.
class Checker {
 public:
  explicit Checker(const Theory& t) : t_(t) {}

  [[nodiscard]] std::size_t size() const { return n_; }
  [[nodiscard]] const Extension& proved() const { return seen_; }

  /// Earliest position of `e` in the prefix.
  [[nodiscard]] std::optional<std::size_t> position(const TaggedExpression& e) const {
    auto it = first_.find(e.str());
    if (it == first_.end()) return std::nullopt;
    return it->second;
  }

  void push(const TaggedExpression& e) {
    ++n_;
    first_.emplace(e.str(), n_);
    if (const auto* c = std::get_if<Conjunction>(&e.target)) {
      (e.positive ? seen_.conj_pos : seen_.conj_neg).insert(*c);
      return;
    }
    const auto& l = std::get<Literal>(e.target);
    if (e.deontic) (e.positive ? seen_.obligation_pos : seen_.obligation_neg).insert(l);
    else (e.positive ? seen_.factual_pos : seen_.factual_neg).insert(l);
  }

  [[nodiscard]] StepReport check(const TaggedExpression& e) const {
    StepReport rep;
    rep.position = n_ + 1;
    rep.expression = e;
    if (const auto* c = std::get_if<Conjunction>(&e.target)) {
      if (!e.deontic) return fail(rep, "malformed", "conjunctions take the dO tag");
      return e.positive ? conj_pos(rep, *c) : conj_neg(rep, *c);
    }
    const auto& q = std::get<Literal>(e.target);
    if (e.deontic) return e.positive ? obl_pos(rep, q) : obl_neg(rep, q);
    return e.positive ? fact_pos(rep, q) : fact_neg(rep, q);
  }

 private:
  static StepReport fail(StepReport r, std::string clause, std::string detail) {
    r.justified = false;
    r.clause = std::move(clause);
    r.detail = std::move(detail);
    r.supports.clear();
    return r;
  }
  static StepReport ok(StepReport r, std::string clause, std::string detail = {}) {
    r.justified = true;
    r.clause = std::move(clause);
    r.detail = std::move(detail);
    std::sort(r.supports.begin(), r.supports.end());
    r.supports.erase(std::unique(r.supports.begin(), r.supports.end()), r.supports.end());
    return r;
  }

  std::size_t pos_of(bool positive, bool deontic, const Target& t) const {
    TaggedExpression e;
    e.positive = positive;
    e.deontic = deontic;
    e.target = t;
    auto p = position(e);
    return p ? *p : 0;
  }

  // Positions that make r applicable for the element at index j.
  void applicable_supports(const Rule& r, std::size_t j, std::vector<std::size_t>& out) const {
    for (const auto& a : r.antecedent) {
      switch (a.kind) {
        case BodyKind::Plain: out.push_back(pos_of(true, false, a.literal())); break;
        case BodyKind::Obl: out.push_back(pos_of(true, true, a.literal())); break;
        case BodyKind::NegObl: out.push_back(pos_of(false, true, a.literal())); break;
        case BodyKind::ConjObl: out.push_back(pos_of(true, true, a.conjunction())); break;
      }
    }
    for (std::size_t k = 1; k < j; ++k) {
      out.push_back(pos_of(true, true, r.head.at(k)));
      out.push_back(pos_of(true, false, r.head.at(k).complement()));
    }
  }

  // One position witnessing that r is discarded for the element at index j.
  void discard_support(const Rule& r, std::size_t j, std::vector<std::size_t>& out) const {
    for (const auto& a : r.antecedent) {
      std::size_t p = 0;
      switch (a.kind) {
        case BodyKind::Plain: p = pos_of(false, false, a.literal()); break;
        case BodyKind::Obl: p = pos_of(false, true, a.literal()); break;
        case BodyKind::NegObl: p = pos_of(true, true, a.literal()); break;
        case BodyKind::ConjObl: p = pos_of(false, true, a.conjunction()); break;
      }
      if (p) {
        out.push_back(p);
        return;
      }
    }
    for (std::size_t k = 1; k < j; ++k) {
      if (auto p = pos_of(false, true, r.head.at(k))) {
        out.push_back(p);
        return;
      }
      if (auto p = pos_of(false, false, r.head.at(k).complement())) {
        out.push_back(p);
        return;
      }
    }
  }

  StepReport fact_pos(StepReport rep, const Literal& q) const {
    if (t_.is_fact(q)) return ok(rep, "+d (1)", "fact");
    if (t_.is_fact(q.complement())) return fail(rep, "+d (2.1)", q.complement().str() + " is a fact");
    const Rule* prop = nullptr;
    for (const auto* r : t_.rules_for(q, std::nullopt, KindFilter::Constitutive, StrengthFilter::Defeasible)) {
      if (body_applicable(*r, seen_)) {
        prop = r;
        break;
      }
    }
    if (!prop) return fail(rep, "+d (2.2)", "no applicable defeasible rule for " + q.str());
    applicable_supports(*prop, 1, rep.supports);
    for (const auto* s : t_.rules_for(q.complement(), std::nullopt, KindFilter::Constitutive)) {
      if (body_discarded(*s, seen_)) {
        discard_support(*s, 1, rep.supports);
        continue;
      }
      const Rule* over = nullptr;
      for (const auto* t : t_.rules_for(q, std::nullopt, KindFilter::Constitutive)) {
        if (t_.stronger(t->label, s->label) && body_applicable(*t, seen_)) {
          over = t;
          break;
        }
      }
      if (!over) return fail(rep, "+d (2.3)", "rule " + s->label + " is neither discarded nor overridden");
      applicable_supports(*over, 1, rep.supports);
    }
    return ok(rep, "+d (2)", prop->label);
  }

  StepReport fact_neg(StepReport rep, const Literal& q) const {
    if (t_.is_fact(q)) return fail(rep, "-d (1)", q.str() + " is a fact");
    if (t_.is_fact(q.complement())) return ok(rep, "-d (2.1)", q.complement().str() + " is a fact");
    bool all = true;
    std::vector<std::size_t> sup;
    for (const auto* r : t_.rules_for(q, std::nullopt, KindFilter::Constitutive, StrengthFilter::Defeasible)) {
      if (!body_discarded(*r, seen_)) {
        all = false;
        break;
      }
      discard_support(*r, 1, sup);
    }
    if (all) {
      rep.supports = sup;
      return ok(rep, "-d (2.2)");
    }
    for (const auto* s : t_.rules_for(q.complement(), std::nullopt, KindFilter::Constitutive)) {
      if (!body_applicable(*s, seen_)) continue;
      std::vector<std::size_t> ssup;
      applicable_supports(*s, 1, ssup);
      bool stands = true;
      for (const auto* t : t_.rules_for(q, std::nullopt, KindFilter::Constitutive)) {
        if (!t_.stronger(t->label, s->label)) continue;
        if (!body_discarded(*t, seen_)) {
          stands = false;
          break;
        }
        discard_support(*t, 1, ssup);
      }
      if (stands) {
        rep.supports = ssup;
        return ok(rep, "-d (2.3)", s->label);
      }
    }
    return fail(rep, "-d (2)", "some defeasible rule for " + q.str() + " is neither discarded nor defeated");
  }

  StepReport obl_pos(StepReport rep, const Literal& q) const {
    const Rule* prop = nullptr;
    std::size_t pj = 0;
    for (const auto* r : t_.rules_for(q, std::nullopt, KindFilter::Prescriptive, StrengthFilter::Defeasible)) {
      for (auto j : r->head.indexes_of(q)) {
        if (applicable_at(*r, q, j, seen_)) {
          prop = r;
          pj = j;
          break;
        }
      }
      if (prop) break;
    }
    if (!prop) return fail(rep, "+dO (1)", "no prescriptive rule applicable for " + q.str());
    applicable_supports(*prop, pj, rep.supports);
    auto nq = q.complement();
    for (const auto* s : t_.rules_for(nq, std::nullopt, KindFilter::Prescriptive)) {
      for (auto k : s->head.indexes_of(nq)) {
        if (discarded_at(*s, nq, k, seen_)) {
          discard_support(*s, k, rep.supports);
          continue;
        }
        const Rule* over = nullptr;
        std::size_t om = 0;
        for (const auto* t : t_.rules_for(q, std::nullopt, KindFilter::Prescriptive)) {
          if (!t_.stronger(t->label, s->label)) continue;
          for (auto m : t->head.indexes_of(q)) {
            if (applicable_at(*t, q, m, seen_)) {
              over = t;
              om = m;
              break;
            }
          }
          if (over) break;
        }
        if (!over)
          return fail(rep, "+dO (2)", "rule " + s->label + " is neither discarded nor overridden");
        applicable_supports(*over, om, rep.supports);
      }
    }
    return ok(rep, "+dO (1),(2)", prop->label);
  }

  StepReport obl_neg(StepReport rep, const Literal& q) const {
    bool all = true;
    std::vector<std::size_t> sup;
    for (const auto* r : t_.rules_for(q, std::nullopt, KindFilter::Prescriptive, StrengthFilter::Defeasible)) {
      for (auto j : r->head.indexes_of(q)) {
        if (!discarded_at(*r, q, j, seen_)) {
          all = false;
          break;
        }
        discard_support(*r, j, sup);
      }
      if (!all) break;
    }
    if (all) {
      rep.supports = sup;
      return ok(rep, "-dO (1)");
    }
    auto nq = q.complement();
    for (const auto* s : t_.rules_for(nq, std::nullopt, KindFilter::Prescriptive)) {
      for (auto k : s->head.indexes_of(nq)) {
        if (!applicable_at(*s, nq, k, seen_)) continue;
        std::vector<std::size_t> ssup;
        applicable_supports(*s, k, ssup);
        bool stands = true;
        for (const auto* t : t_.rules_for(q, std::nullopt, KindFilter::Prescriptive)) {
          if (!t_.stronger(t->label, s->label)) continue;
          for (auto m : t->head.indexes_of(q)) {
            if (!discarded_at(*t, q, m, seen_)) {
              stands = false;
              break;
            }
            discard_support(*t, m, ssup);
          }
          if (!stands) break;
        }
        if (stands) {
          rep.supports = ssup;
          return ok(rep, "-dO (2)", s->label);
        }
      }
    }
    return fail(rep, "-dO (2)", "some prescriptive rule for " + q.str() + " is neither discarded nor defeated");
  }

  StepReport conj_pos(StepReport rep, const Conjunction& c) const {
    for (const auto& ci : c.conjuncts()) {
      auto k = pos_of(true, true, ci);
      if (!k) return fail(rep, "+dO conj (1)", ci.str() + " not yet proved as an obligation");
      rep.supports.push_back(k);
      for (const auto& cj : c.conjuncts()) {
        if (cj == ci) continue;
        auto v = pos_of(true, false, cj.complement());
        if (v && v < k)
          return fail(rep, "+dO conj (2)",
                      "+d " + cj.complement().str() + " precedes the proof of " + ci.str());
      }
    }
    return ok(rep, "+dO conj (1),(2)");
  }

  StepReport conj_neg(StepReport rep, const Conjunction& c) const {
    for (const auto& ci : c.conjuncts()) {
      if (auto p = pos_of(false, true, ci)) {
        rep.supports = {p};
        return ok(rep, "-dO conj (1)", ci.str());
      }
    }
    for (const auto& ci : c.conjuncts()) {
      auto k = pos_of(true, true, ci);
      if (!k) continue;
      for (const auto& cj : c.conjuncts()) {
        if (cj == ci) continue;
        auto v = pos_of(true, false, cj.complement());
        if (v && v < k) {
          rep.supports = {k, v};
          return ok(rep, "-dO conj (2)", ci.str() + " after +d " + cj.complement().str());
        }
      }
    }
    return fail(rep, "-dO conj", "no conjunct is refuted or proved after a violation of another");
  }

  const Theory& t_;
  Extension seen_;
  std::map<std::string, std::size_t> first_;
  std::size_t n_ = 0;
};

inline StepReport check_step(const Theory& t, const Derivation& prefix, const TaggedExpression& e) {
  Checker ck(t);
  for (const auto& s : prefix.steps) ck.push(s);
  return ck.check(e);
}

/// Checks each step in turn and stops at the first violation.
inline CheckReport check_derivation(const Theory& t, const Derivation& p) {
  CheckReport out;
  Checker ck(t);
  for (const auto& s : p.steps) {
    auto rep = ck.check(s);
    out.steps.push_back(rep);
    if (!rep.justified) {
      out.accepted = false;
      return out;
    }
    ck.push(s);
  }
  return out;
}

/// No target occurs in `p` with both signs.
inline bool no_conflict(const Theory&, const Derivation& p) {
  std::set<std::string> pos, neg;
  for (const auto& s : p.steps) {
    auto key = std::string(s.deontic ? "O " : "F ") + target_str(s.target);
    (s.positive ? pos : neg).insert(key);
  }
  for (const auto& k : pos)
    if (neg.count(k)) return false;
  return true;
}

class WitnessError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline TaggedExpression tagged(SetTag set, const Target& t) {
  TaggedExpression e;
  e.target = t;
  e.positive = set == SetTag::FactualPos || set == SetTag::OblPos || set == SetTag::ConjPos;
  e.deontic = set != SetTag::FactualPos && set != SetTag::FactualNeg;
  return e;
}

inline std::optional<SetTag> tag_of(const TaggedExpression& e) {
  if (e.is_conjunction()) {
    if (!e.deontic) return std::nullopt;
    return e.positive ? SetTag::ConjPos : SetTag::ConjNeg;
  }
  if (e.deontic) return e.positive ? SetTag::OblPos : SetTag::OblNeg;
  return e.positive ? SetTag::FactualPos : SetTag::FactualNeg;
}

/// Depth-first search for a derivation of `goal` from the candidate steps.
/// Steps that cannot hurt a conjunction are added greedily; positive steps
/// for complements of conjuncts (violations) are the only branching points,
/// since their position decides conjunctive steps.
class WitnessSearch {
 public:
  WitnessSearch(const Theory& t, std::vector<TaggedExpression> candidates, std::set<Literal> violations,
                TaggedExpression goal, std::size_t budget)
      : t_(t), cands_(std::move(candidates)), goal_(std::move(goal)), budget_(budget) {
    for (const auto& c : cands_) {
      bool crit = !c.deontic && c.positive && !c.is_conjunction() &&
                  violations.count(std::get<Literal>(c.target));
      critical_.push_back(crit);
    }
  }

  std::optional<Derivation> run() {
    Checker ck(t_);
    std::vector<char> in(cands_.size(), 0);
    Derivation d;
    if (dfs(ck, in, d)) return d;
    return std::nullopt;
  }

  [[nodiscard]] bool exhausted() const { return nodes_ > budget_; }

 private:
  bool close(Checker& ck, std::vector<char>& in, Derivation& d) {
    bool changed = true;
    while (changed) {
      changed = false;
      for (std::size_t i = 0; i < cands_.size(); ++i) {
        if (in[i] || critical_[i]) continue;
        if (!ck.check(cands_[i]).justified) continue;
        ck.push(cands_[i]);
        d.steps.push_back(cands_[i]);
        in[i] = 1;
        changed = true;
        if (cands_[i] == goal_) return true;
      }
    }
    return false;
  }

  bool dfs(Checker ck, std::vector<char> in, Derivation& d) {
    if (++nodes_ > budget_) return false;
    auto mark = d.steps.size();
    if (close(ck, in, d)) return true;
    for (std::size_t i = 0; i < cands_.size(); ++i) {
      if (in[i] || !critical_[i]) continue;
      if (!ck.check(cands_[i]).justified) continue;
      Checker next = ck;
      auto nin = in;
      next.push(cands_[i]);
      nin[i] = 1;
      auto before = d.steps.size();
      d.steps.push_back(cands_[i]);
      if (cands_[i] == goal_) return true;
      if (dfs(std::move(next), std::move(nin), d)) return true;
      d.steps.resize(before);
      if (nodes_ > budget_) break;
    }
    d.steps.resize(mark);
    return false;
  }

  const Theory& t_;
  std::vector<TaggedExpression> cands_;
  std::vector<bool> critical_;
  TaggedExpression goal_;
  std::size_t budget_;
  std::size_t nodes_ = 0;
};

/// Keeps the goal and, transitively, the steps its justification uses.
inline Derivation prune(const Theory& t, const Derivation& d) {
  auto rep = check_derivation(t, d);
  if (!rep.accepted || d.steps.empty()) return d;
  std::vector<char> keep(d.steps.size(), 0);
  keep.back() = 1;
  for (std::size_t i = d.steps.size(); i-- > 0;) {
    if (!keep[i]) continue;
    for (auto p : rep.steps[i].supports)
      if (p >= 1) keep[p - 1] = 1;
  }
  Derivation out;
  for (std::size_t i = 0; i < d.steps.size(); ++i)
    if (keep[i]) out.steps.push_back(d.steps[i]);
  return out;
}

}  // namespace detail

/// Builds a derivation accepted by check_derivation whose last step is
/// `goal`. Candidate steps are the fixpoint members, tried in stage order;
/// the result is pruned to the steps the goal depends on.
inline Derivation witness_derivation(const Theory& t, const StageTrace& trace, const TaggedExpression& goal,
                                     std::size_t budget = 20000) {
  auto tag = detail::tag_of(goal);
  if (!tag) throw WitnessError("malformed goal " + goal.str());
  bool in_universe = true;
  if (goal.is_conjunction()) in_universe = universe(t).conjunctions.count(std::get<Conjunction>(goal.target)) != 0;
  if (in_universe && !trace.stage_of(*tag, goal.target))
    throw WitnessError("goal " + goal.str() + " is not in the extension");

  struct Item {
    std::size_t stage;
    std::string text;
    TaggedExpression expr;
  };
  std::vector<Item> items;
  const auto& fx = trace.fixpoint();
  auto add = [&](SetTag s, const Target& target) {
    auto e = detail::tagged(s, target);
    items.push_back({*trace.stage_of(s, target), e.str(), e});
  };
  for (const auto& l : fx.factual_pos) add(SetTag::FactualPos, l);
  for (const auto& l : fx.factual_neg) add(SetTag::FactualNeg, l);
  for (const auto& l : fx.obligation_pos) add(SetTag::OblPos, l);
  for (const auto& l : fx.obligation_neg) add(SetTag::OblNeg, l);
  for (const auto& c : fx.conj_pos) add(SetTag::ConjPos, c);
  for (const auto& c : fx.conj_neg) add(SetTag::ConjNeg, c);
  if (!in_universe) items.push_back({trace.size(), goal.str(), goal});
  std::sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
    return a.stage != b.stage ? a.stage < b.stage : a.text < b.text;
  });

  std::set<Literal> violations;
  auto note = [&](const Conjunction& c) {
    for (const auto& l : c.conjuncts()) violations.insert(l.complement());
  };
  for (const auto& c : universe(t).conjunctions) note(c);
  if (goal.is_conjunction()) note(std::get<Conjunction>(goal.target));

  std::vector<TaggedExpression> cands;
  for (auto& it : items) cands.push_back(std::move(it.expr));
  detail::WitnessSearch search(t, std::move(cands), std::move(violations), goal, budget);
  auto found = search.run();
  if (!found)
    throw WitnessError(search.exhausted() ? "search budget exhausted scheduling " + goal.str()
                                          : "no derivation of " + goal.str() + " from the extension");
  auto pruned = detail::prune(t, *found);
  if (check_derivation(t, pruned).accepted) return pruned;
  return *found;
}

}  // namespace ddl
