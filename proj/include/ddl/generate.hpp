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
#include <chrono>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "ddl/engine.hpp"
#include "ddl/theory.hpp"

namespace ddl {

/// Size parameters of a generated theory: atoms n, rules r, conjunctions m
/// of width k, and the seed.
struct FamilySpec {
  std::string family = "layered";
  std::size_t n = 10;
  std::size_t r = 0;
  std::size_t m = 0;
  std::size_t k = 0;
  std::uint64_t seed = 1;
};

inline const std::vector<std::string>& family_names() {
  static const std::vector<std::string> names{"chain-ctd", "conj-grid", "layered"};
  return names;
}

namespace detail {

// Draws are taken with `rng() % bound` so output does not depend on the
// standard library's distribution implementations.
class Draw {
 public:
  explicit Draw(std::uint64_t seed) : rng_(seed) {}
  std::size_t below(std::size_t bound) { return bound ? static_cast<std::size_t>(rng_() % bound) : 0; }
  bool chance(unsigned percent) { return below(100) < percent; }

 private:
  std::mt19937_64 rng_;
};

inline std::string idx(const std::string& stem, std::size_t i) { return stem + std::to_string(i); }

// r1: =O> a1; ri: ~a(i-1) =O> ai; every obligation but the last is violated.
inline Theory chain_ctd(const FamilySpec& s) {
  std::size_t n = std::max<std::size_t>(s.n, 1);
  std::vector<Literal> facts;
  std::vector<Rule> rules;
  for (std::size_t i = 1; i <= n; ++i) {
    std::vector<BodyAtom> body;
    if (i > 1) body.push_back(BodyAtom::plain(Literal(idx("a", i - 1), false)));
    rules.emplace_back(idx("r", i), body, Arrow::DefeasiblePrescriptive, OtimesChain(Literal(idx("a", i))));
    if (i < n) facts.emplace_back(idx("a", i), false);
  }
  return Theory(facts, rules, {});
}

// m conjunctive obligations of width k in rule bodies. Each conjunct has its
// own obligation rule; some conjuncts are contrary-to-duty (they need the
// previous conjunct violated) and some violations are established by rules,
// so the reducts differ from the theory.
inline Theory conj_grid(const FamilySpec& s) {
  Draw d(s.seed);
  std::size_t m = std::max<std::size_t>(s.m, 1);
  std::size_t k = std::max<std::size_t>(s.k, 2);
  std::vector<Literal> facts;
  std::vector<Rule> rules;
  for (std::size_t i = 1; i <= m; ++i) {
    auto p = [&](std::size_t j) { return "p" + std::to_string(i) + "_" + std::to_string(j); };
    std::vector<Literal> conj;
    for (std::size_t j = 1; j <= k; ++j) {
      std::vector<BodyAtom> body;
      if (j > 1 && d.chance(40)) body.push_back(BodyAtom::plain(Literal(p(j - 1), false)));
      rules.emplace_back("o" + p(j), body, Arrow::DefeasiblePrescriptive, OtimesChain(Literal(p(j))));
      if (d.chance(50)) {
        auto f = "f" + p(j);
        facts.emplace_back(f);
        rules.emplace_back("v" + p(j), std::vector<BodyAtom>{BodyAtom::plain(Literal(f))},
                           Arrow::DefeasibleConstitutive, OtimesChain(Literal(p(j), false)));
      }
      conj.emplace_back(p(j));
    }
    rules.emplace_back(idx("g", i), std::vector<BodyAtom>{BodyAtom::conj(Conjunction(conj))},
                       Arrow::DefeasiblePrescriptive, OtimesChain(Literal(idx("q", i))));
  }
  return Theory(facts, rules, {});
}

// Random layered theory: atoms are split into layers, rule bodies draw from
// lower layers, heads from higher ones. Superiority only points from later to
// earlier rules, so it is acyclic; facts are complement-free.
inline Theory layered(const FamilySpec& s) {
  Draw d(s.seed);
  std::size_t r = s.r ? s.r : 2 * s.n;
  std::size_t n = s.n ? s.n : std::max<std::size_t>(r / 2, 2);
  n = std::max<std::size_t>(n, 2);
  std::size_t layers = std::max<std::size_t>(2, static_cast<std::size_t>(std::sqrt(static_cast<double>(n))));
  auto layer_of = [&](std::size_t a) { return a * layers / n; };
  auto atom = [&](std::size_t a) { return idx("x", a); };
  auto lower_atom = [&](std::size_t head_atom) {
    std::size_t bound = 0;
    while (bound < n && layer_of(bound) < layer_of(head_atom)) ++bound;
    return bound ? d.below(bound) : n;  // n means "none"
  };

  std::vector<Literal> facts;
  for (std::size_t a = 0; a < n && layer_of(a) == 0; ++a)
    if (d.chance(60)) facts.emplace_back(atom(a), d.chance(70));

  std::vector<Rule> rules;
  std::vector<Literal> first_head;
  for (std::size_t i = 0; i < r; ++i) {
    std::size_t first_upper = 0;
    while (first_upper < n && layer_of(first_upper) == 0) ++first_upper;
    std::size_t h = first_upper + d.below(n - first_upper);
    auto roll = d.below(100);
    Arrow arr = roll < 55   ? Arrow::DefeasiblePrescriptive
                : roll < 85 ? Arrow::DefeasibleConstitutive
                : roll < 95 ? Arrow::DefeaterConstitutive
                            : Arrow::DefeaterPrescriptive;
    std::vector<Literal> head{Literal(atom(h), d.chance(75))};
    if (arr == Arrow::DefeasiblePrescriptive) {
      std::size_t extra = d.below(3);
      for (std::size_t e = 0; e < extra; ++e) {
        auto c = first_upper + d.below(n - first_upper);
        Literal l(atom(c), d.chance(70));
        if (std::find_if(head.begin(), head.end(), [&](const Literal& x) { return x.atom == l.atom; }) == head.end())
          head.push_back(l);
      }
    }
    std::vector<BodyAtom> body;
    std::size_t bsize = 1 + d.below(2);
    for (std::size_t b = 0; b < bsize; ++b) {
      auto a = lower_atom(h);
      if (a == n) break;
      Literal l(atom(a), d.chance(70));
      auto kind = d.below(10);
      if (kind < 6) body.push_back(BodyAtom::plain(l));
      else if (kind < 9) body.push_back(BodyAtom::obl(l));
      else body.push_back(BodyAtom::neg_obl(l));
    }
    first_head.push_back(head.front());
    rules.emplace_back(idx("r", i + 1), body, arr, OtimesChain(head));
  }

  // Conjunctive obligations go into the bodies of the last m rules.
  for (std::size_t c = 0; c < s.m && c < rules.size(); ++c) {
    auto& rule = rules[rules.size() - 1 - c];
    std::size_t h = 0;
    while (h < n && atom(h) != rule.head.at(1).atom) ++h;
    std::vector<Literal> lits;
    std::set<std::string> used;
    for (std::size_t j = 0; j < std::max<std::size_t>(s.k, 2) * 3 && lits.size() < std::max<std::size_t>(s.k, 2); ++j) {
      auto a = lower_atom(h);
      if (a == n) break;
      if (!used.insert(atom(a)).second) continue;
      lits.emplace_back(atom(a), d.chance(80));
    }
    if (lits.size() < 2) continue;
    auto body = rule.antecedent;
    body.push_back(BodyAtom::conj(Conjunction(lits)));
    rule = Rule(rule.label, body, rule.arrow, rule.head);
  }

  std::vector<std::pair<std::string, std::string>> sup;
  for (std::size_t i = 0; i < rules.size(); ++i) {
    for (std::size_t j = i + 1; j < rules.size() && j < i + 8; ++j) {
      if (first_head[i] == first_head[j].complement() && rules[i].prescriptive() == rules[j].prescriptive() &&
          d.chance(50))
        sup.emplace_back(rules[j].label, rules[i].label);
    }
  }
  return Theory(facts, rules, sup);
}

}  // namespace detail

/// Deterministic for a given FamilySpec, seed included.
inline Theory generate(const FamilySpec& s) {
  if (s.family == "chain-ctd") return detail::chain_ctd(s);
  if (s.family == "conj-grid") return detail::conj_grid(s);
  if (s.family == "layered") return detail::layered(s);
  throw std::invalid_argument("unknown family " + s.family);
}

struct BenchRow {
  FamilySpec spec;
  std::size_t rules = 0;
  double median_ms = 0;
};

/// Median wall-clock time of computing the extension, over `repetitions`
/// runs after one warm-up run.
inline double time_extension(const Theory& t, std::size_t repetitions) {
  volatile std::size_t sink = compute_extension(t).extension.size();
  std::vector<double> ms;
  for (std::size_t i = 0; i < std::max<std::size_t>(repetitions, 1); ++i) {
    auto start = std::chrono::steady_clock::now();
    sink = compute_extension(t).extension.size();
    auto stop = std::chrono::steady_clock::now();
    ms.push_back(std::chrono::duration<double, std::milli>(stop - start).count());
  }
  (void)sink;
  std::sort(ms.begin(), ms.end());
  return ms[ms.size() / 2];
}

/// Least-squares slope of log(time) against log(size).
inline double fitted_exponent(const std::vector<std::pair<double, double>>& size_time) {
  double n = 0, sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto [x, y] : size_time) {
    if (x <= 0 || y <= 0) continue;
    double lx = std::log(x), ly = std::log(y);
    n += 1;
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  double den = n * sxx - sx * sx;
  if (n < 2 || den == 0) return 0;
  return (n * sxy - sx * sy) / den;
}

}  // namespace ddl
