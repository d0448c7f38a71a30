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

#include <set>
#include <string>
#include <utility>
#include <vector>

#include "ddl/theory.hpp"

namespace ddl {

/// Identifies red(base, L). Two keys over equal base theories and equal
/// removal sets compare equal.
struct ReductKey {
  const Theory* base = nullptr;
  std::set<Literal> removed;

  bool operator==(const ReductKey& o) const {
    return removed == o.removed && (base == o.base || (base && o.base && *base == *o.base));
  }
};

/// red(T, L): facts in L dropped, constitutive rules with some l in L in their
/// head dropped, superiority pairs over dropped rules dropped. Prescriptive
/// rules stay: a chain c1 * ... * l * ... is already inapplicable past l once
/// l is refuted, and removing it would also lose c1.
inline Theory reduct(const Theory& t, const std::set<Literal>& removed) {
  std::vector<Literal> facts;
  for (const auto& f : t.facts())
    if (!removed.count(f)) facts.push_back(f);
  std::vector<Rule> rules;
  std::set<std::string> kept;
  for (const auto& r : t.rules()) {
    bool drop = false;
    if (!r.prescriptive())
      for (const auto& h : r.head.elements()) drop = drop || removed.count(h);
    if (drop) continue;
    rules.push_back(r);
    kept.insert(r.label);
  }
  std::vector<std::pair<std::string, std::string>> sup;
  for (const auto& p : t.superiority())
    if (kept.count(p.first) && kept.count(p.second)) sup.push_back(p);
  return Theory(std::move(facts), std::move(rules), std::move(sup));
}

/// Every l in L is neither a fact nor the head of a constitutive rule in
/// red(T, L), so -d l holds there.
inline bool reduct_refutes(const Theory& t, const std::set<Literal>& removed) {
  auto r = reduct(t, removed);
  for (const auto& l : removed) {
    if (r.is_fact(l)) return false;
    if (!r.index().heads(l, false).empty()) return false;
  }
  return true;
}

}  // namespace ddl
