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

#include "reference/derivation_search.hpp"
#include "reference/sampler.hpp"
#include "support.hpp"

using namespace testing_support;

namespace {

ddl::Derivation deriv(std::initializer_list<const char*> steps) {
  ddl::Derivation d;
  for (auto s : steps) d.steps.push_back(E(s));
  return d;
}

const std::vector<const char*> kScenarioFiles{
    "example3.ddl",         "example6.ddl",           "pragmatic_unpragmatic.ddl", "compensatory.ddl",
    "contrary_to_duty.ddl", "intermediate.ddl",       "negative_support.ddl",      "iterated.ddl",
    "iterated_dependent.ddl", "multiple_conjuncts.ddl", "multiple_dependencies.ddl", "mix_and_match.ddl"};

std::vector<ddl::TaggedExpression> positives(const ddl::Extension& e) {
  std::vector<ddl::TaggedExpression> out;
  auto add = [&](bool deontic, const ddl::Target& t) {
    ddl::TaggedExpression x;
    x.positive = true;
    x.deontic = deontic;
    x.target = t;
    out.push_back(x);
  };
  for (const auto& l : e.factual_pos) add(false, l);
  for (const auto& l : e.obligation_pos) add(true, l);
  for (const auto& c : e.conj_pos) add(true, c);
  return out;
}

}  // namespace

TEST(TaggedExpression, ParseAndPrint) {
  EXPECT_EQ(E("+dO a & b").str(), "+dO a & b");
  EXPECT_EQ(E("-d ~x").str(), "-d ~x");
  EXPECT_TRUE(E("+dO b & a").is_conjunction());
  EXPECT_EQ(E("+dO b & a"), E("+dO a & b"));
  EXPECT_THROW(E("+d a & b"), std::invalid_argument);
  EXPECT_THROW(E("+x a"), std::invalid_argument);
  EXPECT_THROW(E("+d"), std::invalid_argument);
}

TEST(Checker, AcceptsTheRulesExampleDerivation) {
  auto t = sample("example3.ddl");
  auto d = deriv({"+d f1", "+d f2", "+d g2", "+d f3", "+d f7", "+d d", "-dO a", "+dO b", "+d ~b", "+dO c"});
  auto rep = ddl::check_derivation(t, d);
  EXPECT_TRUE(rep.accepted) << rep.str();
  ASSERT_EQ(rep.steps.size(), 10u);
  EXPECT_TRUE(ddl::no_conflict(t, d));
}

TEST(Checker, RejectsStepsOutOfOrder) {
  auto t = sample("example3.ddl");
  // The obligation of c needs b violated first.
  auto rep = ddl::check_derivation(t, deriv({"+d f1", "+d f2", "+d g2", "+d f7", "+d d", "-dO a", "+dO b", "+dO c"}));
  EXPECT_FALSE(rep.accepted);
  EXPECT_EQ(rep.first_violation(), 8u);
}

TEST(Checker, ViolationBeforeTheOtherObligationBlocksConjunction) {
  auto t = sample("pragmatic_unpragmatic.ddl");
  auto bad = ddl::check_derivation(t, deriv({"+dO a", "+d ~a", "+dO b", "+dO a & b"}));
  EXPECT_FALSE(bad.accepted) << bad.str();
  EXPECT_EQ(bad.first_violation(), 4u);
  EXPECT_EQ(bad.steps[3].clause, "+dO conj (2)");
  auto good = ddl::check_derivation(t, deriv({"+dO a", "+dO b", "+d ~a", "+dO a & b"}));
  EXPECT_TRUE(good.accepted) << good.str();
  auto first = ddl::check_derivation(t, deriv({"+d ~a", "+dO a", "+dO b", "+dO a & b"}));
  EXPECT_FALSE(first.accepted) << first.str();
}

TEST(Checker, ConjunctionNeedsItsConjuncts) {
  auto t = sample("pragmatic_unpragmatic.ddl");
  auto rep = ddl::check_derivation(t, deriv({"+dO a", "+dO a & b"}));
  EXPECT_FALSE(rep.accepted);
  EXPECT_EQ(rep.steps[1].clause, "+dO conj (1)");
}

TEST(Checker, EmptyDerivationIsAccepted) {
  auto rep = ddl::check_derivation(sample("example3.ddl"), {});
  EXPECT_TRUE(rep.accepted);
  EXPECT_TRUE(rep.steps.empty());
}

TEST(Checker, AcceptedDerivationsAreClosedUnderPrefix) {
  for (const char* name : kScenarioFiles) {
    auto t = sample(name);
    auto res = ddl::compute_extension(t);
    for (const auto& goal : positives(res.extension)) {
      auto d = ddl::witness_derivation(t, res.trace, goal);
      for (std::size_t n = 0; n <= d.size(); ++n) {
        ddl::Derivation prefix;
        prefix.steps.assign(d.steps.begin(), d.steps.begin() + static_cast<std::ptrdiff_t>(n));
        ASSERT_TRUE(ddl::check_derivation(t, prefix).accepted) << name << " " << goal.str();
      }
    }
  }
}

TEST(Checker, ReportJson) {
  auto t = sample("pragmatic_unpragmatic.ddl");
  auto j = ddl::check_derivation(t, deriv({"+dO a", "+d ~a", "+dO b", "+dO a & b"})).json();
  EXPECT_FALSE(j["accepted"].get<bool>());
  ASSERT_EQ(j["steps"].size(), 4u);
  EXPECT_EQ(j["steps"][3]["verdict"], "violated");
  EXPECT_EQ(j["steps"][0]["verdict"], "justified");
}

TEST(Derivation, ParseText) {
  auto p = ddl::parse_derivation("# comment\n+d f1\n\n+dO a  # trailing\n");
  ASSERT_TRUE(p.derivation);
  EXPECT_EQ(p.derivation->size(), 2u);
  auto bad = ddl::parse_derivation("+d f1\n+q x\n");
  EXPECT_FALSE(bad.derivation);
  ASSERT_EQ(bad.errors.size(), 1u);
  EXPECT_EQ(bad.errors[0].rfind("line 2:", 0), 0u);
}

TEST(NoConflict, DetectsBothSigns) {
  auto t = sample("example3.ddl");
  EXPECT_FALSE(ddl::no_conflict(t, deriv({"+d f1", "-d f1"})));
  EXPECT_TRUE(ddl::no_conflict(t, deriv({"+d f1", "-dO f1"})));
}

TEST(Witness, EveryPositiveConclusionOnScenarios) {
  for (const char* name : kScenarioFiles) {
    auto t = sample(name);
    auto res = ddl::compute_extension(t);
    for (const auto& goal : positives(res.extension)) {
      ddl::Derivation d;
      ASSERT_NO_THROW(d = ddl::witness_derivation(t, res.trace, goal)) << name << " " << goal.str();
      ASSERT_FALSE(d.steps.empty());
      EXPECT_EQ(d.steps.back(), goal);
      auto rep = ddl::check_derivation(t, d);
      EXPECT_TRUE(rep.accepted) << name << "\n" << rep.str();
    }
  }
}

TEST(Witness, ConjunctionScheduleOnIteratedExample) {
  auto t = sample("example6.ddl");
  auto res = ddl::compute_extension(t);
  auto d = ddl::witness_derivation(t, res.trace, E("+dO a & b"));
  EXPECT_EQ(d, deriv({"+d f1", "+d f3", "+dO a", "+dO b", "+dO a & b"}));
}

TEST(Witness, RejectsGoalsOutsideTheExtension) {
  auto t = sample("compensatory.ddl");
  auto res = ddl::compute_extension(t);
  EXPECT_THROW(ddl::witness_derivation(t, res.trace, E("+dO a & b")), ddl::WitnessError);
}

TEST(Witness, SoundAndMatchesExhaustiveSearch) {
  std::size_t checked = 0;
  for (std::uint64_t seed = 1; seed <= 2000; ++seed) {
    ref::Sampler s(seed + 20000);
    ref::SampleShape shape;
    shape.atoms = 2 + seed % 3;
    shape.rules = 1 + seed % 6;
    auto t = s.theory(shape);
    ddl::ExtensionResult res;
    try {
      res = ddl::compute_extension(t);
    } catch (const ddl::DependencyCycle&) {
      continue;
    }
    ref::DerivationSearch search(t);
    for (const auto& goal : positives(res.extension)) {
      std::optional<ddl::Derivation> w;
      try {
        w = ddl::witness_derivation(t, res.trace, goal);
      } catch (const ddl::WitnessError&) {
      }
      if (w) {
        EXPECT_EQ(w->steps.back(), goal);
        EXPECT_TRUE(ddl::check_derivation(t, *w).accepted) << ddl::serialize_theory(t) << goal.str();
      }
      auto reachable = search.reachable(goal);
      if (!reachable) continue;
      ++checked;
      EXPECT_EQ(w.has_value(), *reachable) << ddl::serialize_theory(t) << goal.str();
    }
  }
  EXPECT_GT(checked, 3000u);
}

// Cases where the stage operator and ordered derivations disagree. The
// expected values record current behaviour against the exhaustive search.
TEST(Correspondence, JointlyViolatedContraryToDutyPair) {
  // Each obligation needs its own violation, so every derivation proves one
  // violation before the other conjunct's obligation.
  auto t = parse_or_throw("fact ~a. fact ~b.\nr1: ~a =O> a.\nr2: ~b =O> b.\nquery O[a & b].");
  auto res = ddl::compute_extension(t);
  EXPECT_TRUE(res.extension.conj_pos.count(C("a & b")));
  ref::DerivationSearch search(t);
  EXPECT_EQ(search.reachable(E("+dO a & b")), std::optional<bool>(false));
  EXPECT_THROW(ddl::witness_derivation(t, res.trace, E("+dO a & b")), ddl::WitnessError);
}

TEST(Correspondence, RemovedFactStillRefutesItsComplementInDerivations) {
  // Refuting ~b from the fact b is not a +d b step, yet removing b from the
  // facts leaves ~b open in the reduct.
  auto t = parse_or_throw(
      "fact ~a. fact b.\nr1: ~b ~O> a.\nr2: =O> ~a.\nr3: a, -O[~a] => a.\nr4: ~b => ~b.\nr1 > r2.\nr1 > r4.\n");
  ddl::Reasoner r(t);
  EXPECT_TRUE(r.extension().obligation_pos.count(L("~a")));
  EXPECT_FALSE(r.independent(L("~a"), {L("b")}));
  ref::DerivationSearch search(t);
  EXPECT_EQ(search.reachable(E("+dO ~a"), {L("b")}), std::optional<bool>(true));
}
