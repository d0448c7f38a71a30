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
#include <set>
#include <stdexcept>
#include <string>

#include "ddl/literal.hpp"
#include "ddl/theory.hpp"

namespace ddl {

/// The six sets computed for a theory: +d, -d, +dO, -dO and the positive and
/// negative conjunctive obligations.
struct Extension {
  std::set<Literal> factual_pos;
  std::set<Literal> factual_neg;
  std::set<Literal> obligation_pos;
  std::set<Literal> obligation_neg;
  std::set<Conjunction> conj_pos;
  std::set<Conjunction> conj_neg;

  bool operator==(const Extension&) const = default;

  [[nodiscard]] std::size_t size() const {
    return factual_pos.size() + factual_neg.size() + obligation_pos.size() + obligation_neg.size() +
           conj_pos.size() + conj_neg.size();
  }

  /// Pointwise containment: every set of `o` is a subset of the matching set here.
  [[nodiscard]] bool includes(const Extension& o) const {
    auto sub = [](const auto& small, const auto& big) {
      return std::includes(big.begin(), big.end(), small.begin(), small.end());
    };
    return sub(o.factual_pos, factual_pos) && sub(o.factual_neg, factual_neg) &&
           sub(o.obligation_pos, obligation_pos) && sub(o.obligation_neg, obligation_neg) &&
           sub(o.conj_pos, conj_pos) && sub(o.conj_neg, conj_neg);
  }

  /// No target is both proved and refuted.
  [[nodiscard]] bool coherent() const {
    auto disjoint = [](const auto& a, const auto& b) {
      for (const auto& x : a)
        if (b.count(x)) return false;
      return true;
    };
    return disjoint(factual_pos, factual_neg) && disjoint(obligation_pos, obligation_neg) &&
           disjoint(conj_pos, conj_neg);
  }

  /// No literal and its complement are both proved. The refuted sets are not
  /// checked: p and ~p are both refuted whenever neither has a rule.
  [[nodiscard]] bool consistent() const {
    auto ok = [](const std::set<Literal>& s) {
      for (const auto& l : s)
        if (l.positive && s.count(l.complement())) return false;
      return true;
    };
    return ok(factual_pos) && ok(obligation_pos);
  }
};

inline Extension initial_extension(const Theory& t) {
  Extension e;
  e.factual_pos = t.facts();
  return e;
}

/// Candidate literals and conjunctions an extension ranges over.
struct LiteralUniverse {
  std::set<Literal> literals;
  std::set<Conjunction> conjunctions;

  bool operator==(const LiteralUniverse&) const = default;
};

/// Every literal occurring in facts, rule bodies (also inside O[..] and
/// conjunctive obligations), rule heads and declared queries, closed under
/// complement. Conjunction candidates are those in rule bodies plus queries.
inline LiteralUniverse universe(const Theory& t) {
  LiteralUniverse u;
  auto add = [&](const Literal& l) {
    u.literals.insert(l);
    u.literals.insert(l.complement());
  };
  for (const auto& f : t.facts()) add(f);
  for (const auto& r : t.rules()) {
    for (const auto& h : r.head.elements()) add(h);
    for (const auto& a : r.antecedent) {
      if (a.kind == BodyKind::ConjObl) {
        u.conjunctions.insert(a.conjunction());
        for (const auto& c : a.conjunction().conjuncts()) add(c);
      } else {
        add(a.literal());
      }
    }
  }
  for (const auto& q : t.queries()) {
    u.conjunctions.insert(q);
    for (const auto& c : q.conjuncts()) add(c);
  }
  return u;
}

inline bool body_applicable(const Rule& r, const Extension& e) {
  for (const auto& a : r.antecedent) {
    switch (a.kind) {
      case BodyKind::Plain:
        if (!e.factual_pos.count(a.literal())) return false;
        break;
      case BodyKind::Obl:
        if (!e.obligation_pos.count(a.literal())) return false;
        break;
      case BodyKind::NegObl:
        if (!e.obligation_neg.count(a.literal())) return false;
        break;
      case BodyKind::ConjObl:
        if (!e.conj_pos.count(a.conjunction())) return false;
        break;
    }
  }
  return true;
}

inline bool body_discarded(const Rule& r, const Extension& e) {
  for (const auto& a : r.antecedent) {
    switch (a.kind) {
      case BodyKind::Plain:
        if (e.factual_neg.count(a.literal())) return true;
        break;
      case BodyKind::Obl:
        if (e.obligation_neg.count(a.literal())) return true;
        break;
      case BodyKind::NegObl:
        if (e.obligation_pos.count(a.literal())) return true;
        break;
      case BodyKind::ConjObl:
        if (e.conj_neg.count(a.conjunction())) return true;
        break;
    }
  }
  return false;
}

namespace detail {
inline void require_head_at(const Rule& r, const Literal& q, std::size_t j) {
  if (j == 0 || j > r.head.length())
    throw std::out_of_range("index " + std::to_string(j) + " out of range for rule " + r.label);
  if (r.head.at(j) != q)
    throw std::invalid_argument("rule " + r.label + " does not have " + q.str() + " at index " +
                                std::to_string(j));
}
}  // namespace detail

/// Applicable for q at index j: body applicable, and every earlier chain
/// element is an obligation in force that has been violated.
inline bool applicable_at(const Rule& r, const Literal& q, std::size_t j, const Extension& e) {
  detail::require_head_at(r, q, j);
  if (!body_applicable(r, e)) return false;
  for (std::size_t k = 1; k < j; ++k) {
    const auto& c = r.head.at(k);
    if (!e.obligation_pos.count(c) || !e.factual_pos.count(c.complement())) return false;
  }
  return true;
}

inline bool discarded_at(const Rule& r, const Literal& q, std::size_t j, const Extension& e) {
  detail::require_head_at(r, q, j);
  if (body_discarded(r, e)) return true;
  for (std::size_t k = 1; k < j; ++k) {
    const auto& c = r.head.at(k);
    if (e.obligation_neg.count(c) || e.factual_neg.count(c.complement())) return true;
  }
  return false;
}

}  // namespace ddl
