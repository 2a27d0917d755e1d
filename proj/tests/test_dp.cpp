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

#include <cmath>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "onabc/onabc.hpp"
#include "oracles.hpp"

namespace {

using onabc::ApprovalPrior;
using onabc::Committee;
using onabc::Decision;
using onabc::Election;
using onabc::Rational;
using onabc::ThieleFunction;

ApprovalPrior uniform(int num, int den) {
  return ApprovalPrior::uniform(Rational(num, den));
}

// Straight recursion on (alpha, beta, gamma) for the MAV process with
// per-arrival approval count distribution `pmf`.
class MavRecursion {
 public:
  MavRecursion(int m, int k, std::vector<Rational> pmf)
      : m_(m), k_(k), pmf_(std::move(pmf)) {}

  Rational value(int a, int b, int g) {
    if (b == k_) return 0;
    Rational yes = g + next(a, b + 1);
    if (b + (m_ - a + 1) == k_) return yes;
    Rational no = next(a, b);
    return yes >= no ? yes : no;
  }

 private:
  Rational next(int a, int b) {
    if (a == m_) return 0;
    auto key = std::make_pair(a + 1, b);
    auto it = memo_.find(key);
    if (it != memo_.end()) return it->second;
    Rational v = 0;
    for (std::size_t j = 0; j < pmf_.size(); ++j)
      v += pmf_[j] * value(a + 1, b, static_cast<int>(j));
    memo_[key] = v;
    return v;
  }

  int m_, k_;
  std::vector<Rational> pmf_;
  std::map<std::pair<int, int>, Rational> memo_;
};

TEST(Prior, BinomialProbabilities) {
  EXPECT_EQ(onabc::binom_prob(3, 0, Rational(1, 2)), Rational(1, 8));
  EXPECT_EQ(onabc::binom_prob(3, 1, Rational(1, 2)), Rational(3, 8));
  EXPECT_EQ(onabc::binom_prob(4, 2, Rational(1, 3)), Rational(24, 81));
  EXPECT_EQ(onabc::binom_prob(5, 0, Rational(0)), Rational(1));
  EXPECT_THROW(onabc::binom_prob(3, 4, Rational(1, 2)), std::invalid_argument);
  auto pmf = onabc::binomial_pmf(5, Rational(2, 7));
  Rational total = 0;
  for (const auto& x : pmf) total += x;
  EXPECT_EQ(total, Rational(1));
}

TEST(Prior, TypedPriorConvolvesClusters) {
  auto prior = ApprovalPrior::typed({1, 2}, {Rational(1, 2), Rational(1, 3)});
  auto pmf = prior.approval_count_pmf(3);
  ASSERT_EQ(pmf.size(), 4u);
  // P(0) = 1/2 * 4/9; P(3) = 1/2 * 1/9.
  EXPECT_EQ(pmf[0], Rational(2, 9));
  EXPECT_EQ(pmf[3], Rational(1, 18));
  EXPECT_EQ(prior.cluster_of(1, 3), 0);
  EXPECT_EQ(prior.cluster_of(3, 3), 1);
  EXPECT_THROW(prior.approval_count_pmf(4), std::invalid_argument);
}

TEST(Prior, Parses) {
  EXPECT_EQ(onabc::parse_prior("0.25").uniform_p(), Rational(1, 4));
  EXPECT_EQ(onabc::parse_prior("uniform:1/3").describe(), "uniform:1/3");
  auto typed = onabc::parse_prior("typed:2@1/2,3@0.1");
  EXPECT_EQ(typed.describe(), "typed:2@1/2,3@1/10");
  EXPECT_THROW(onabc::parse_prior("typed:2"), std::invalid_argument);
  EXPECT_THROW(onabc::parse_prior("3/2"), std::invalid_argument);
}

TEST(MavTable, WorkedExampleDimensions) {
  auto t = onabc::build_mav_table(4, 3, 2, uniform(1, 2));
  EXPECT_EQ(t.size(), 32u);
  EXPECT_EQ(t.initial_value(), Rational(63, 16));
  EXPECT_EQ(t.at(2, 0, 3).decision, Decision::kAccept);
  EXPECT_EQ(t.at(2, 0, 3).value, Rational(39, 8));
  for (int g = 0; g <= 3; ++g) {
    EXPECT_EQ(t.at(4, 1, g).decision, Decision::kAccept);
    EXPECT_EQ(t.at(4, 1, g).value, Rational(g));
    EXPECT_EQ(t.at(4, 2, g).decision, Decision::kReject);
    EXPECT_EQ(t.at(4, 2, g).value, Rational(0));
  }
  EXPECT_TRUE(onabc::audit_bellman(t).ok());
  EXPECT_FALSE(t.contains(4, 0, 0));
  EXPECT_THROW(t.at(4, 0, 0), std::out_of_range);
}

TEST(MavTable, EveryCellMatchesRecursion) {
  for (int m = 1; m <= 7; ++m)
    for (int k = 1; k <= m; ++k)
      for (int n : {1, 3, 5})
        for (auto p : {Rational(1, 4), Rational(1, 2), Rational(2, 3)}) {
          auto prior = ApprovalPrior::uniform(p);
          auto t = onabc::build_mav_table(m, n, k, prior);
          MavRecursion oracle(m, k, onabc::binomial_pmf(n, p));
          for (int a = 1; a <= m; ++a)
            for (int b = std::max(0, k - (m - a + 1)); b <= std::min(k, a - 1);
                 ++b)
              for (int g = 0; g <= n; ++g)
                ASSERT_EQ(t.at(a, b, g).value, oracle.value(a, b, g))
                    << m << " " << n << " " << k << " " << a << b << g;
          ASSERT_TRUE(onabc::audit_bellman(t).ok());
        }
}

TEST(MavTable, DegenerateProbabilities) {
  for (int m = 1; m <= 6; ++m)
    for (int k = 1; k <= m; ++k) {
      EXPECT_EQ(onabc::build_mav_table(m, 4, k, uniform(1, 1)).initial_value(),
                Rational(4 * k));
      EXPECT_EQ(onabc::build_mav_table(m, 4, k, uniform(0, 1)).initial_value(),
                Rational(0));
    }
}

TEST(MavTable, DecisionsAreMonotoneInGamma) {
  auto t = onabc::build_mav_table(12, 6, 4, uniform(1, 3));
  for (int a = 1; a <= 12; ++a)
    for (int b = std::max(0, 4 - (12 - a + 1)); b <= std::min(4, a - 1); ++b)
      for (int g = 0; g < 6; ++g) {
        if (t.at(a, b, g).decision == Decision::kAccept) {
          ASSERT_EQ(t.at(a, b, g + 1).decision, Decision::kAccept);
        }
      }
}

TEST(MavTable, DumpFormat) {
  auto t = onabc::build_mav_table(4, 3, 2, uniform(1, 2));
  std::ostringstream out;
  t.dump(out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "# rule=mav m=4 n=3 k=2 prior=uniform:1/2");
  std::getline(in, line);
  EXPECT_EQ(line, "# V_init=63/16");
  std::getline(in, line);
  EXPECT_EQ(line, "# alpha beta gamma decision value");
  int rows = 0;
  std::string first;
  while (std::getline(in, line)) {
    if (rows == 0) first = line;
    ++rows;
  }
  EXPECT_EQ(rows, 32);
  EXPECT_EQ(first, "4 2 0 no 0/1");
}

TEST(MavTable, MatchesExpectimax) {
  for (int m = 1; m <= 4; ++m)
    for (int k = 1; k <= m; ++k)
      for (int n = 1; n <= 3; ++n)
        for (auto p : {Rational(1, 4), Rational(1, 2)}) {
          auto t = onabc::build_mav_table(m, n, k, ApprovalPrior::uniform(p));
          oracle::Expectimax x(m, n, k, ThieleFunction::mav(),
                               std::vector<Rational>(n, p));
          ASSERT_EQ(t.initial_value(), x.value()) << m << n << k;
        }
}

TEST(MavTable, TypedPriorMatchesExpectimax) {
  auto prior = ApprovalPrior::typed({1, 2}, {Rational(3, 4), Rational(1, 5)});
  for (int m = 2; m <= 4; ++m)
    for (int k = 1; k < m; ++k) {
      auto t = onabc::build_mav_table(m, 3, k, prior);
      oracle::Expectimax x(m, 3, k, ThieleFunction::mav(),
                           {Rational(3, 4), Rational(1, 5), Rational(1, 5)});
      ASSERT_EQ(t.initial_value(), x.value());
    }
}

TEST(MavTable, PolicyRejectsOtherShapes) {
  auto t = std::make_shared<const onabc::MavTable>(
      onabc::build_mav_table(4, 3, 2, uniform(1, 2)));
  auto policy = onabc::as_policy(t);
  Election e(3, 2, {{1}, {2}, {3}});
  EXPECT_THROW(onabc::replay(e, *policy), std::invalid_argument);
}

TEST(MavTable, WorkedExampleWalkThrough) {
  std::ifstream in(std::string(ONABC_TEST_DATA) + "/worked_example.abc");
  std::stringstream buf;
  buf << in.rdbuf();
  Election e = onabc::parse_election(buf.str());
  auto t = std::make_shared<const onabc::MavTable>(
      onabc::build_mav_table(4, 3, 2, uniform(1, 2)));
  auto policy = onabc::as_policy(t);
  auto trace = onabc::replay_traced(e, *policy);
  // V*(1,0,2) = 81/16 accept; V*(2,1,2): accept.
  EXPECT_EQ(trace.committee, (Committee{1, 2}));
  EXPECT_EQ(onabc::score(e, trace.committee, ThieleFunction::mav()),
            Rational(4));
}

TEST(CcTable, ClosedFormWhenEveryoneIsElected) {
  for (int m = 1; m <= 6; ++m)
    for (int n : {1, 2, 4})
      for (auto p : {Rational(1, 3), Rational(1, 2)}) {
        auto t = onabc::build_cc_table(m, n, m, ApprovalPrior::uniform(p));
        Rational expected = n * (1 - onabc::power(1 - p, m));
        ASSERT_EQ(t.initial_value(), expected);
      }
}

TEST(CcTable, SmallExample) {
  // m=3, n=2, k=1: expected coverage of the best single pick.
  auto t = onabc::build_cc_table(3, 2, 1, uniform(1, 2));
  oracle::Expectimax x(3, 2, 1, ThieleFunction::cc(),
                       {Rational(1, 2), Rational(1, 2)});
  EXPECT_EQ(t.initial_value(), x.value());
  EXPECT_EQ(onabc::build_cc_table(3, 2, 1, uniform(1, 2)).initial_value(),
            Rational(23, 16));
  EXPECT_TRUE(onabc::audit_bellman(t).ok());
}

TEST(CcTable, MatchesExpectimax) {
  for (int m = 1; m <= 4; ++m)
    for (int k = 1; k <= m; ++k)
      for (int n = 1; n <= 3; ++n) {
        Rational p(1, 3);
        auto t = onabc::build_cc_table(m, n, k, ApprovalPrior::uniform(p));
        oracle::Expectimax x(m, n, k, ThieleFunction::cc(),
                             std::vector<Rational>(n, p));
        ASSERT_EQ(t.initial_value(), x.value()) << m << n << k;
        ASSERT_TRUE(onabc::audit_bellman(t).ok());
      }
}

TEST(CcTable, TypedPriorIsRejected) {
  auto prior = ApprovalPrior::typed({1, 1}, {Rational(1, 2), Rational(1, 3)});
  EXPECT_THROW(onabc::build_cc_table(3, 2, 1, prior), std::invalid_argument);
}

TEST(ThieleTable, ReducesToMavAndCc) {
  for (int m = 1; m <= 6; ++m)
    for (int k = 1; k <= m; ++k)
      for (int n : {1, 3}) {
        auto prior = uniform(1, 2);
        auto mav = onabc::build_thiele_table(m, n, k, ThieleFunction::mav(),
                                             prior);
        ASSERT_EQ(mav.initial_value(),
                  onabc::build_mav_table(m, n, k, prior).initial_value());
        auto cc = onabc::build_thiele_table(m, n, k, ThieleFunction::cc(),
                                            prior);
        ASSERT_EQ(cc.initial_value(),
                  onabc::build_cc_table(m, n, k, prior).initial_value());
        ASSERT_TRUE(onabc::audit_bellman(mav).ok());
        ASSERT_TRUE(onabc::audit_bellman(cc).ok());
      }
  EXPECT_EQ(onabc::build_thiele_table(4, 3, 2, ThieleFunction::mav(),
                                      uniform(1, 2))
                .initial_value(),
            Rational(63, 16));
}

TEST(ThieleTable, PavMatchesExpectimax) {
  for (int m = 2; m <= 4; ++m)
    for (int k = 1; k <= m; ++k)
      for (int n = 1; n <= 3; ++n) {
        auto f = ThieleFunction::pav();
        auto t = onabc::build_thiele_table(m, n, k, f, uniform(1, 2));
        oracle::Expectimax x(m, n, k, f,
                             std::vector<Rational>(n, Rational(1, 2)));
        ASSERT_EQ(t.initial_value(), x.value()) << m << n << k;
        ASSERT_TRUE(onabc::audit_bellman(t).ok());
      }
}

TEST(ThieleTable, TypedPriorMatchesExpectimax) {
  auto prior = ApprovalPrior::typed({2, 1}, {Rational(2, 3), Rational(1, 4)});
  std::vector<Rational> ps = {Rational(2, 3), Rational(2, 3), Rational(1, 4)};
  for (const auto& f : {ThieleFunction::pav(), ThieleFunction::cc(),
                        ThieleFunction::truncated_pav()})
    for (int m = 2; m <= 4; ++m)
      for (int k = 1; k < m; ++k) {
        auto t = onabc::build_thiele_table(m, 3, k, f, prior);
        oracle::Expectimax x(m, 3, k, f, ps);
        ASSERT_EQ(t.initial_value(), x.value()) << f.spec() << m << k;
        ASSERT_TRUE(onabc::audit_bellman(t).ok());
      }
}

TEST(ThieleTable, PolicyAchievesItsValue) {
  // The exact expected score of the table policy over every approval matrix
  // equals V_init.
  auto f = ThieleFunction::pav();
  auto table = std::make_shared<const onabc::ThieleTable>(
      onabc::build_thiele_table(3, 2, 2, f, uniform(1, 2)));
  Rational exact = oracle::exhaustive_expectation(
      3, 2, 2, Rational(1, 2), f, [&] { return onabc::as_policy(table); });
  EXPECT_EQ(exact, table->initial_value());
}

TEST(ThieleTable, TruncatedPavAtModerateScale) {
  auto f = ThieleFunction::truncated_pav();
  auto table = std::make_shared<const onabc::ThieleTable>(
      onabc::build_thiele_table(50, 10, 5, f, uniform(1, 5)));
  EXPECT_TRUE(onabc::audit_bellman(*table).ok());
  double v = onabc::to_double(table->initial_value());
  std::mt19937_64 rng(17);
  const int trials = 2000;
  double sum = 0, sum2 = 0;
  for (int i = 0; i < trials; ++i) {
    Election e = oracle::random_election(rng, 50, 10, 5, 0.2);
    auto policy = onabc::as_policy(table);
    double s = onabc::to_double(onabc::score(e, onabc::replay(e, *policy), f));
    sum += s;
    sum2 += s * s;
  }
  double mean = sum / trials;
  double sd = std::sqrt((sum2 / trials - mean * mean) / trials);
  EXPECT_NEAR(mean, v, 4 * sd + 1e-9);
}

TEST(ThieleTable, EnforcesCaps) {
  EXPECT_THROW(onabc::build_thiele_table(6, 12, 3, ThieleFunction::pav(),
                                         uniform(1, 2)),
               onabc::BudgetExceeded);
  onabc::ThieleTableOptions tiny;
  tiny.state_budget = 100;
  EXPECT_THROW(onabc::build_thiele_table(20, 8, 5, ThieleFunction::cc(),
                                         uniform(1, 2), tiny),
               onabc::BudgetExceeded);
}

TEST(Registry, DpPoliciesShareTables) {
  onabc::PolicyConfig config;
  config.prior = uniform(1, 2);
  auto make = onabc::make_policy_factory("dp-mav", config);
  Election e(3, 2, {{1, 2}, {3}, {1, 2, 3}, {}});
  auto a = make();
  auto b = make();
  EXPECT_EQ(onabc::replay(e, *a), onabc::replay(e, *b));
  auto cc_typed = config;
  cc_typed.prior = ApprovalPrior::typed({1, 2}, {Rational(1), Rational(0)});
  EXPECT_THROW(onabc::make_policy_factory("dp-cc", cc_typed),
               std::invalid_argument);
}

}  // namespace
