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

using namespace testing_support;

namespace {

std::set<std::string> labels(const ddl::Theory& t) {
  std::set<std::string> out;
  for (const auto& r : t.rules()) out.insert(r.label);
  return out;
}

// The bottom-up example theory plus a constitutive copy of r5.
ddl::Theory with_constitutive_copy() {
  return parse_or_throw(read_text(sample_path("example6.ddl")) + "r5c: O[a & b] => ~c.\n");
}

std::set<ddl::Literal> random_removal(ref::Sampler& s, const ddl::Theory& t) {
  std::set<ddl::Literal> out;
  auto u = ddl::universe(t);
  std::vector<ddl::Literal> pool(u.literals.begin(), u.literals.end());
  for (const auto& f : t.facts()) pool.push_back(f);
  auto n = 1 + s.below(3);
  for (std::size_t i = 0; i < n && !pool.empty(); ++i) out.insert(pool[s.below(pool.size())]);
  return out;
}

// A literal outside the reduct's universe has no rules and is not a fact, so
// it is refuted without being listed.
bool factually_refuted(const ddl::Theory& red, const ddl::Extension& e, const ddl::Literal& l) {
  if (ddl::universe(red).literals.count(l)) return e.factual_neg.count(l) != 0;
  return !red.is_fact(l) && red.rules_for(l, std::nullopt, ddl::KindFilter::Constitutive).empty();
}

}  // namespace

TEST(Reduct, DropsRulesForRemovedViolation) {
  auto d = with_constitutive_copy();
  auto red = ddl::reduct(d, {L("~a")});
  EXPECT_EQ(labels(red), (std::set<std::string>{"r1", "r2", "r3", "r5", "r5c", "r6", "r7"}));
  EXPECT_EQ(red.facts(), d.facts());
}

TEST(Reduct, KeepsPrescriptiveRulesHeadedByARemovedLiteral) {
  // r5 carries ~c in a prescriptive head and r5c in a constitutive one.
  auto d = with_constitutive_copy();
  auto red = ddl::reduct(d, {L("~a"), L("~c")});
  EXPECT_EQ(labels(red), (std::set<std::string>{"r1", "r2", "r3", "r5", "r6", "r7"}));
  auto only_c = ddl::reduct(d, {L("~c")});
  EXPECT_EQ(labels(only_c), (std::set<std::string>{"r1", "r2", "r3", "r4", "r5", "r6", "r7"}));
}

TEST(Reduct, KeepsChainsThroughARemovedLiteral) {
  // Removing r2 would also lose the primary obligation a.
  auto t = parse_or_throw("r1: =O> b.\nr2: =O> a * ~b.\nquery O[a & b].");
  EXPECT_EQ(labels(ddl::reduct(t, {L("~b")})), (std::set<std::string>{"r1", "r2"}));
  EXPECT_TRUE(ddl::compute_extension(t).extension.conj_pos.count(C("a & b")));
}

TEST(Reduct, IdentityCases) {
  auto d = sample("example6.ddl");
  EXPECT_EQ(ddl::reduct(d, {}), ddl::Theory(std::vector<ddl::Literal>(d.facts().begin(), d.facts().end()),
                                             d.rules(), {d.superiority().begin(), d.superiority().end()}));
  auto red_b = ddl::reduct(d, {L("~b")});
  EXPECT_EQ(labels(red_b), labels(d));
  EXPECT_EQ(red_b.facts(), d.facts());
}

TEST(Reduct, FactsAndSuperiorityFollowRemovedRules) {
  auto t = parse_or_throw("fact a. fact b.\nr1: a => c.\nr2: b => ~c.\nr3: =O> d.\nr1 > r2.\nr3 > r2.");
  auto red = ddl::reduct(t, {L("a"), L("c")});
  EXPECT_EQ(red.facts(), (std::set<ddl::Literal>{L("b")}));
  EXPECT_EQ(labels(red), (std::set<std::string>{"r2", "r3"}));
  EXPECT_EQ(red.superiority(), (std::set<std::pair<std::string, std::string>>{{"r3", "r2"}}));
}

TEST(Reduct, RefutesRemovedLiterals) {
  auto t = parse_or_throw("fact ~a.\nr1: b => ~a.\nr2: =O> a * ~a.\nr3: => b.\nr4: ~a => c.");
  EXPECT_TRUE(ddl::reduct_refutes(t, {L("~a")}));
  auto red = ddl::reduct(t, {L("~a")});
  EXPECT_EQ(labels(red), (std::set<std::string>{"r2", "r3", "r4"}));
  auto e = ddl::compute_extension(red).extension;
  EXPECT_TRUE(e.factual_neg.count(L("~a")));
  EXPECT_FALSE(e.factual_pos.count(L("c")));
}

TEST(Reduct, SubTheoryAndRemovalCompleteOnSamples) {
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    ref::Sampler s(seed);
    ref::SampleShape shape;
    shape.atoms = 2 + seed % 3;
    shape.rules = 1 + seed % 6;
    auto t = s.theory(shape);
    auto rm = random_removal(s, t);
    auto red = ddl::reduct(t, rm);
    EXPECT_EQ(red, ref::naive_reduct(t, rm));
    for (const auto& f : red.facts()) EXPECT_TRUE(t.is_fact(f) && !rm.count(f));
    for (const auto& r : red.rules()) {
      ASSERT_NE(t.find(r.label), nullptr);
      EXPECT_EQ(*t.find(r.label), r);
      if (!r.prescriptive())
        for (const auto& h : r.head.elements()) EXPECT_FALSE(rm.count(h));
    }
    for (const auto& p : red.superiority()) EXPECT_TRUE(t.superiority().count(p));
    EXPECT_TRUE(ddl::reduct_refutes(t, rm));
    try {
      auto e = ddl::compute_extension(red).extension;
      for (const auto& l : rm) EXPECT_TRUE(factually_refuted(red, e, l)) << l.str() << "\n" << ddl::serialize_theory(t);
    } catch (const ddl::DependencyCycle&) {
    }
  }
}

TEST(Independence, IteratedScenario) {
  ddl::Reasoner r(sample("example6.ddl"));
  EXPECT_TRUE(r.independent(L("b"), {L("~a")}));
  EXPECT_TRUE(r.independent(L("a"), {L("~b")}));
  EXPECT_TRUE(r.independent(L("d"), {L("~a"), L("~b")}));
  EXPECT_FALSE(r.independent(L("c"), {L("~d")}));
}

TEST(Independence, MultipleDependencies) {
  ddl::Reasoner r(sample("multiple_dependencies.ddl"));
  EXPECT_TRUE(r.independent(L("c"), {L("~a")}));
  EXPECT_TRUE(r.independent(L("c"), {L("~b")}));
  EXPECT_FALSE(r.independent(L("c"), {L("~a"), L("~b")}));
  EXPECT_FALSE(r.reduct_obligation(L("c"), {L("~a"), L("~b")}));
  EXPECT_TRUE(r.reduct_extension({L("~a"), L("~b")}).obligation_neg.count(L("c")));
}

TEST(Independence, EmptyRemovalIsProvability) {
  for (const char* name : {"example3.ddl", "example6.ddl", "mix_and_match.ddl"}) {
    ddl::Reasoner r(sample(name));
    for (const auto& l : ddl::universe(r.theory()).literals)
      EXPECT_EQ(r.independent(l, {}), r.extension().obligation_pos.count(l) != 0) << name << " " << l.str();
  }
}

TEST(Independence, ReductExtensionMatchesDirectComputation) {
  for (std::uint64_t seed = 1; seed <= 300; ++seed) {
    ref::Sampler s(seed + 5000);
    ref::SampleShape shape;
    shape.atoms = 2 + seed % 3;
    shape.rules = 1 + seed % 6;
    shape.conjunctions = seed % 2;
    auto t = s.theory(shape);
    auto rm = random_removal(s, t);
    try {
      ddl::Reasoner r(t);
      auto via_reasoner = r.reduct_extension(rm);
      auto direct = ddl::compute_extension(ddl::reduct(t, rm)).extension;
      direct.conj_pos.clear();
      direct.conj_neg.clear();
      via_reasoner.conj_pos.clear();
      via_reasoner.conj_neg.clear();
      EXPECT_EQ(via_reasoner, direct) << ddl::serialize_theory(t);
      for (const auto& l : ddl::universe(t).literals)
        EXPECT_EQ(r.reduct_obligation(l, rm), direct.obligation_pos.count(l) != 0) << ddl::serialize_theory(t);
    } catch (const ddl::DependencyCycle&) {
    }
  }
}

TEST(Memoization, DoesNotChangeResults) {
  for (const char* name : {"example6.ddl", "multiple_dependencies.ddl", "mix_and_match.ddl", "iterated.ddl"}) {
    ddl::Reasoner with(sample(name));
    ddl::Reasoner without(sample(name));
    without.set_memoization(false);
    EXPECT_EQ(with.extension(), without.extension()) << name;
    for (const auto& c : ddl::universe(with.theory()).conjunctions)
      EXPECT_EQ(with.evaluate(c).verdict, without.evaluate(c).verdict) << name << " " << c.str();
  }
}

TEST(Memoization, CachesRepeatedReducts) {
  ddl::Reasoner r(sample("multiple_dependencies.ddl"));
  r.extension();
  r.reduct_obligation(L("c"), {L("~a"), L("~b")});
  auto after_first = r.reduct_evaluations();
  r.reduct_obligation(L("c"), {L("~a"), L("~b")});
  EXPECT_EQ(r.reduct_evaluations(), after_first);
}

TEST(Evaluate, AgreesWithExtensionConjunctionSets) {
  for (const char* name : {"example6.ddl", "pragmatic_unpragmatic.ddl", "compensatory.ddl", "contrary_to_duty.ddl",
                           "intermediate.ddl", "negative_support.ddl", "iterated.ddl", "iterated_dependent.ddl",
                           "multiple_conjuncts.ddl", "multiple_dependencies.ddl", "mix_and_match.ddl"}) {
    ddl::Reasoner r(sample(name));
    const auto& e = r.extension();
    for (const auto& c : ddl::universe(r.theory()).conjunctions) {
      auto v = r.evaluate(c);
      auto expect = e.conj_pos.count(c) ? ddl::Verdict::Proven
                    : e.conj_neg.count(c) ? ddl::Verdict::Refuted
                                          : ddl::Verdict::Undetermined;
      EXPECT_EQ(v.verdict, expect) << name << " " << v.explain();
    }
  }
}

TEST(Evaluate, ExplainsTheDecidingConjunct) {
  ddl::Reasoner r(sample("multiple_dependencies.ddl"));
  auto v = r.evaluate(C("a & b & c"));
  EXPECT_EQ(v.verdict, ddl::Verdict::Refuted);
  EXPECT_EQ(v.reason, ddl::VerdictReason::NotIndependent);
  ASSERT_TRUE(v.deciding);
  EXPECT_EQ(*v.deciding, L("c"));
  auto unseen = r.evaluate(C("a & z"));
  EXPECT_EQ(unseen.verdict, ddl::Verdict::Refuted);
  EXPECT_EQ(unseen.reason, ddl::VerdictReason::ConjunctRefuted);
}
