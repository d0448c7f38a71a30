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

#include <gtest/gtest.h>

#include "reference/naive_evaluator.hpp"
#include "reference/sampler.hpp"
#include "support.hpp"

namespace {

ddl::Theory sampled(std::uint64_t seed, bool consistent) {
  ref::Sampler s(seed);
  ref::SampleShape shape;
  shape.atoms = 2 + seed % 4;
  shape.rules = 1 + seed % 7;
  shape.consistent = consistent;
  return s.theory(shape);
}

}  // namespace

TEST(Properties, CoherentEvenWithConflictingFacts) {
  for (std::uint64_t seed = 1; seed <= 500; ++seed) {
    auto t = sampled(seed + 90000, false);
    try {
      auto e = ddl::compute_extension(t).extension;
      EXPECT_TRUE(e.coherent()) << ddl::serialize_theory(t);
    } catch (const ddl::DependencyCycle&) {
    }
  }
}

TEST(Properties, ConsistentOnValidatedTheories) {
  for (std::uint64_t seed = 1; seed <= 500; ++seed) {
    auto t = sampled(seed + 70000, true);
    ASSERT_TRUE(t.consistent());
    try {
      auto e = ddl::compute_extension(t).extension;
      EXPECT_TRUE(e.coherent()) << ddl::serialize_theory(t);
      EXPECT_TRUE(e.consistent()) << ddl::serialize_theory(t);
    } catch (const ddl::DependencyCycle&) {
    }
  }
}

TEST(Properties, FactsAreProvedAndTheirComplementsRefuted) {
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    auto t = sampled(seed + 30000, true);
    try {
      auto e = ddl::compute_extension(t).extension;
      for (const auto& f : t.facts()) {
        EXPECT_TRUE(e.factual_pos.count(f));
        EXPECT_TRUE(e.factual_neg.count(f.complement()));
      }
    } catch (const ddl::DependencyCycle&) {
    }
  }
}

TEST(Properties, UnsupportedLiteralsAreRefuted) {
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    auto t = sampled(seed + 40000, true);
    try {
      auto e = ddl::compute_extension(t).extension;
      for (const auto& l : ddl::universe(t).literals) {
        if (!t.rules_for(l, std::nullopt, ddl::KindFilter::Prescriptive, ddl::StrengthFilter::Defeasible).empty())
          continue;
        EXPECT_TRUE(e.obligation_neg.count(l)) << l.str() << "\n" << ddl::serialize_theory(t);
      }
    } catch (const ddl::DependencyCycle&) {
    }
  }
}

TEST(Properties, ProvedConjunctionsHaveIndependentConjuncts) {
  for (std::uint64_t seed = 1; seed <= 500; ++seed) {
    auto t = sampled(seed + 50000, true);
    try {
      ddl::Reasoner r(t);
      const auto& e = r.extension();
      for (const auto& c : e.conj_pos) {
        for (const auto& x : c.conjuncts()) {
          std::set<ddl::Literal> others;
          for (const auto& y : c.conjuncts())
            if (y != x) others.insert(y.complement());
          EXPECT_TRUE(e.obligation_pos.count(x));
          EXPECT_TRUE(r.independent(x, others)) << c.str() << "\n" << ddl::serialize_theory(t);
        }
      }
      for (const auto& c : e.conj_neg) {
        bool some_refuted = false;
        for (const auto& x : c.conjuncts()) some_refuted = some_refuted || !e.obligation_pos.count(x);
        bool dependent = false;
        for (const auto& x : c.conjuncts()) {
          std::set<ddl::Literal> others;
          for (const auto& y : c.conjuncts())
            if (y != x) others.insert(y.complement());
          dependent = dependent || !r.reduct_obligation(x, others);
        }
        EXPECT_TRUE(some_refuted || dependent) << c.str() << "\n" << ddl::serialize_theory(t);
      }
    } catch (const ddl::DependencyCycle&) {
    }
  }
}

TEST(Properties, GeneratedTheoriesAreValid) {
  for (const auto& fam : ddl::family_names()) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      ddl::FamilySpec spec{fam, 30, 60, 3, 3, seed};
      auto t = ddl::generate(spec);
      EXPECT_TRUE(t.consistent()) << fam;
      EXPECT_TRUE(t.warnings().empty()) << fam;
      EXPECT_EQ(testing_support::parse_or_throw(ddl::serialize_theory(t)), t) << fam;
      auto e = ddl::compute_extension(t).extension;
      EXPECT_TRUE(e.coherent() && e.consistent()) << fam;
    }
  }
}
