// Copyright 2026 The onabc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <gtest/gtest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "onabc/onabc.hpp"
#include "oracles.hpp"

namespace {

using onabc::Committee;
using onabc::Election;
using onabc::Rational;
using onabc::ThieleFunction;

Election load(const std::string& name) {
  std::ifstream in(std::string(ONABC_TEST_DATA) + "/" + name);
  std::stringstream buf;
  buf << in.rdbuf();
  return onabc::parse_election(buf.str());
}

std::vector<ThieleFunction> functions() {
  return {ThieleFunction::mav(), ThieleFunction::pav(), ThieleFunction::cc(),
          ThieleFunction::truncated_pav(),
          ThieleFunction::parse("vec:1,1/3,1/3")};
}

TEST(ThieleFunction, ParsesSpecs) {
  EXPECT_EQ(ThieleFunction::parse("pav").weight(4), Rational(1, 4));
  EXPECT_EQ(ThieleFunction::parse("cc").value(5), Rational(1));
  EXPECT_EQ(ThieleFunction::parse("mav").value(5), Rational(5));
  auto v = ThieleFunction::parse("vec:2,1/2");
  EXPECT_EQ(v.value(1), Rational(2));
  EXPECT_EQ(v.value(9), Rational(5, 2));
  EXPECT_EQ(v.spec(), "vec:2,1/2");
  EXPECT_THROW(ThieleFunction::parse("vec:1,-1"), std::invalid_argument);
  EXPECT_THROW(ThieleFunction::parse("borda"), std::invalid_argument);
}

TEST(ThieleFunction, Submodularity) {
  EXPECT_TRUE(onabc::is_submodular(ThieleFunction::pav()));
  EXPECT_TRUE(onabc::is_submodular(ThieleFunction::truncated_pav()));
  EXPECT_FALSE(onabc::is_submodular(ThieleFunction::parse("vec:1,2")));
}

TEST(ThieleFunction, Saturation) {
  EXPECT_EQ(ThieleFunction::cc().saturation(5), 1);
  EXPECT_EQ(ThieleFunction::truncated_pav().saturation(5), 2);
  EXPECT_EQ(ThieleFunction::mav().saturation(5), 5);
  EXPECT_EQ(ThieleFunction::parse("vec:1,0,1,0").saturation(5), 3);
}

TEST(Score, SmallExamples) {
  Election e(2, 2, {{1, 2}, {1}});
  Committee w{1, 2};
  EXPECT_EQ(onabc::score(e, w, ThieleFunction::mav()), Rational(3));
  EXPECT_EQ(onabc::score(e, w, ThieleFunction::pav()), Rational(5, 2));
  EXPECT_EQ(onabc::score(e, w, ThieleFunction::cc()), Rational(2));
  EXPECT_EQ(onabc::score(e, Committee{}, ThieleFunction::mav()), Rational(0));
}

TEST(Score, AgreesWithDirectSum) {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 300; ++trial) {
    int m = oracle::uniform_int(rng, 1, 9);
    int k = oracle::uniform_int(rng, 1, m);
    Election e = oracle::random_election(rng, m, oracle::uniform_int(rng, 1, 8),
                                         k, 0.5);
    std::vector<int> members;
    for (int t = 1; t <= m; ++t)
      if (rng() % 2) members.push_back(t);
    for (const auto& f : functions())
      ASSERT_EQ(onabc::score(e, Committee(members), f),
                oracle::brute_score(e, members, f));
  }
}

TEST(MarginalGain, MatchesScoreDifference) {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 300; ++trial) {
    int m = oracle::uniform_int(rng, 2, 9);
    Election e = oracle::random_election(rng, m, 6, 1, 0.5);
    std::vector<int> members;
    for (int t = 2; t <= m; ++t)
      if (rng() % 2) members.push_back(t);
    Committee w(members);
    Committee w1 = w;
    w1.insert(1);
    for (const auto& f : functions())
      ASSERT_EQ(onabc::marginal_gain(e, w, 1, f),
                onabc::score(e, w1, f) - onabc::score(e, w, f));
  }
  Election e(2, 1, {{1}, {2}});
  EXPECT_THROW(onabc::marginal_gain(e, Committee{1}, 1, ThieleFunction::mav()),
               std::invalid_argument);
  EXPECT_THROW(onabc::marginal_gain(e, Committee{}, 3, ThieleFunction::mav()),
               std::out_of_range);
}

TEST(MarginalGain, DiminishingForSubmodularFunctions) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    Election e = oracle::random_election(rng, 6, 6, 1, 0.6);
    Committee small{2};
    Committee large{2, 3, 4};
    for (const auto& f : functions()) {
      if (!onabc::is_submodular(f)) continue;
      ASSERT_GE(onabc::marginal_gain(e, small, 1, f),
                onabc::marginal_gain(e, large, 1, f));
    }
  }
}

TEST(OfflineOptimum, WorkedExample) {
  Election e = load("worked_example.abc");
  auto mav = onabc::offline_optimum(e, ThieleFunction::mav());
  EXPECT_EQ(mav.committee, (Committee{1, 2}));
  EXPECT_EQ(mav.score, Rational(4));
  auto pav = onabc::offline_optimum(e, ThieleFunction::pav());
  EXPECT_EQ(pav.score, Rational(7, 2));
  auto cc = onabc::offline_optimum(e, ThieleFunction::cc());
  EXPECT_EQ(cc.committee, (Committee{1, 2}));
  EXPECT_EQ(cc.score, Rational(3));
}

TEST(OfflineOptimum, AgreesWithBruteForce) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 150; ++trial) {
    int m = oracle::uniform_int(rng, 1, 9);
    int k = oracle::uniform_int(rng, 1, m);
    Election e = oracle::random_election(rng, m, oracle::uniform_int(rng, 1, 7),
                                         k, 0.45);
    for (const auto& f : functions()) {
      auto got = onabc::offline_optimum(e, f);
      auto want = oracle::brute_optimum(e, f);
      ASSERT_EQ(got.score, want.second) << f.spec();
      ASSERT_EQ(got.committee.members(), want.first) << f.spec();
    }
  }
}

TEST(OfflineOptimum, RespectsBudget) {
  std::vector<onabc::ApprovalSet> sets(40);
  Election e(1, 20, sets);
  EXPECT_THROW(onabc::offline_optimum(e, ThieleFunction::mav(), 1000),
               onabc::BudgetExceeded);
  EXPECT_EQ(onabc::binomial_saturating(40, 20), 137846528820ull);
}

}  // namespace
