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
#include <functional>
#include <random>

#include "onabc/onabc.hpp"
#include "oracles.hpp"

namespace {

using onabc::Committee;
using onabc::Decision;
using onabc::Election;
using onabc::Rational;

// Forwards to a policy and runs a check after every commit.
template <typename Policy>
class Watched : public onabc::OnlinePolicy {
 public:
  explicit Watched(std::function<void(const Policy&, bool)> check)
      : check_(std::move(check)) {}
  std::string name() const override { return inner.name(); }
  void start(const onabc::ElectionShape& s) override { inner.start(s); }
  Decision decide(const onabc::ReplayState& s,
                  std::span<const onabc::VoterId> a) override {
    return inner.decide(s, a);
  }
  void commit(const onabc::ReplayState& s, std::span<const onabc::VoterId> a,
              Decision d, bool forced) override {
    inner.commit(s, a, d, forced);
    check_(inner, forced);
  }
  Policy inner;

 private:
  std::function<void(const Policy&, bool)> check_;
};

// --- w(k) ---------------------------------------------------------------------

TEST(WInverse, Examples) {
  EXPECT_DOUBLE_EQ(onabc::w_inverse(1), 1.0);
  EXPECT_NEAR(onabc::w_inverse(4), 2.0, 1e-12);
  EXPECT_NEAR(onabc::w_inverse(27), 3.0, 1e-12);
  EXPECT_NEAR(onabc::w_inverse(2), 1.5596104694623694, 1e-12);
  EXPECT_THROW(onabc::w_inverse(0.5), std::invalid_argument);
}

TEST(WInverse, IsMonotoneAndAccurate) {
  double prev = 1;
  for (int i = 1; i <= 5000; ++i) {
    double x = onabc::w_inverse(i);
    ASSERT_GE(x, prev);
    ASSERT_LE(std::abs(std::pow(x, x) - i), 1e-9 * i) << i;
    prev = x;
  }
}

TEST(CeilW, SmallValues) {
  // a^a >= k: 1, 4, 27, 256, 3125.
  EXPECT_EQ(onabc::ceil_w(1), 1);
  EXPECT_EQ(onabc::ceil_w(2), 2);
  EXPECT_EQ(onabc::ceil_w(4), 2);
  EXPECT_EQ(onabc::ceil_w(5), 3);
  EXPECT_EQ(onabc::ceil_w(27), 3);
  EXPECT_EQ(onabc::ceil_w(28), 4);
  EXPECT_EQ(onabc::ceil_w(256), 4);
  EXPECT_EQ(onabc::ceil_w(257), 5);
  EXPECT_EQ(onabc::ceil_w(3125), 5);
  EXPECT_EQ(onabc::ceil_w(3126), 6);
  EXPECT_EQ(onabc::ceil_w(1000000000000000000ULL), 16);  // 15^15 < 1e18
}

// --- water filling --------------------------------------------------------------

// Smallest achievable maximum charge: the least level lambda with
// sum min(b_i, lambda) >= price. Candidate levels come from every subset of
// voters paying their full balance while the rest split what is left.
Rational brute_min_max_charge(const std::vector<Rational>& b,
                              const Rational& price) {
  const int n = static_cast<int>(b.size());
  Rational best = -1;
  for (unsigned capped = 0; capped < (1u << n); ++capped) {
    Rational paid = 0;
    int rest = 0;
    for (int i = 0; i < n; ++i) {
      if (capped >> i & 1u)
        paid += b[i];
      else
        ++rest;
    }
    if (rest == 0) continue;
    Rational level = (price - paid) / rest;
    if (level < 0) continue;
    Rational raised = 0;
    for (const auto& x : b) raised += std::min(x, level);
    if (raised >= price && (best < 0 || level < best)) best = level;
  }
  return best;
}

TEST(WaterFill, EvenSplit) {
  auto c = onabc::water_fill({Rational(1), Rational(1)}, Rational(2));
  EXPECT_EQ(c, (std::vector<Rational>{Rational(1), Rational(1)}));
  auto d = onabc::water_fill({Rational(1, 4), Rational(1), Rational(1)},
                             Rational(3, 2));
  EXPECT_EQ(d, (std::vector<Rational>{Rational(1, 4), Rational(5, 8),
                                      Rational(5, 8)}));
  EXPECT_THROW(onabc::water_fill({Rational(1, 2)}, Rational(1)),
               std::invalid_argument);
}

TEST(WaterFill, MinimizesTheLargestCharge) {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 2000; ++trial) {
    int n = oracle::uniform_int(rng, 1, 6);
    std::vector<Rational> b;
    Rational total = 0;
    for (int i = 0; i < n; ++i) {
      b.emplace_back(oracle::uniform_int(rng, 0, 12), 12);
      total += b.back();
    }
    if (total == 0) continue;
    Rational price = total * Rational(oracle::uniform_int(rng, 1, 10), 10);
    auto charges = onabc::water_fill(b, price);
    Rational sum = 0, top = 0;
    for (int i = 0; i < n; ++i) {
      ASSERT_GE(charges[i], 0);
      ASSERT_LE(charges[i], b[i]);
      sum += charges[i];
      top = std::max(top, charges[i]);
    }
    ASSERT_EQ(sum, price);
    ASSERT_EQ(top, brute_min_max_charge(b, price));
  }
}

// --- greedy budgeting -----------------------------------------------------------

TEST(GreedyBudget, Examples) {
  // n=4, k=2, price 2.
  Election e(4, 2, {{1, 2}, {1, 2}, {3}, {3, 4}, {1}});
  onabc::GreedyBudgetingPolicy policy;
  auto trace = onabc::replay_traced(e, policy);
  EXPECT_EQ(trace.decisions[0], Decision::kAccept);
  EXPECT_EQ(trace.decisions[1], Decision::kReject);
  EXPECT_EQ(trace.decisions[2], Decision::kReject);
  EXPECT_EQ(trace.decisions[3], Decision::kAccept);
  EXPECT_EQ(trace.committee, (Committee{1, 4}));
  EXPECT_EQ(policy.balances()[1], Rational(0));
  EXPECT_EQ(policy.balances()[2], Rational(0));
  EXPECT_EQ(policy.balances()[3], Rational(0));
  EXPECT_EQ(policy.price(), Rational(2));
}

TEST(GreedyBudget, ConservesBudgetAndSatisfiesPjr) {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 300; ++trial) {
    int n = oracle::uniform_int(rng, 1, 12);
    int m = oracle::uniform_int(rng, 1, 14);
    int k = oracle::uniform_int(rng, 1, std::min(m, 5));
    Election e = oracle::random_election(rng, m, n, k, trial % 2 ? 0.2 : 0.5);
    int violations = 0;
    Watched<onabc::GreedyBudgetingPolicy> policy(
        [&](const onabc::GreedyBudgetingPolicy& p, bool) {
          Rational expected = Rational(n) - p.charged_selections() * p.price();
          if (p.total_balance() != expected) ++violations;
          for (int v = 1; v <= n; ++v)
            if (p.balances()[v] < 0) ++violations;
        });
    Committee w = onabc::replay(e, policy);
    ASSERT_EQ(violations, 0);
    ASSERT_LE(policy.inner.charged_selections(), k);
    ASSERT_TRUE(onabc::check_pjr(e, w, Rational(1)).pass);
  }
}

// --- OGCA ----------------------------------------------------------------------

TEST(Ogca, Examples) {
  // n=4, k=2: H(2)=3/2, l=1 needs 3 approvers, l=2 needs 6 > n.
  Election e(4, 2, {{1, 2}, {1, 2, 3}, {1, 2, 3, 4}, {4}, {1}});
  onabc::OgcaPolicy policy;
  auto trace = onabc::replay_traced(e, policy);
  EXPECT_EQ(trace.decisions[0], Decision::kReject);
  EXPECT_EQ(trace.decisions[1], Decision::kAccept);
  // Voters 1-3 now hold one approval; only voter 4 is below l=1.
  EXPECT_EQ(trace.decisions[2], Decision::kReject);
  EXPECT_EQ(policy.prefill_selections(), 1);
  EXPECT_EQ(policy.payments()[1], Rational(2, 3));
  EXPECT_EQ(policy.payments()[4], Rational(0));
}

TEST(Ogca, WitnessLevelCountsUnderSatisfiedApprovers) {
  // n=6, k=3: H(3)=11/6, thresholds ceil(11 l/3): 4, 8 (> 6).
  onabc::OgcaPolicy policy;
  policy.start({10, 6, 3});
  std::vector<onabc::VoterId> four = {1, 2, 3, 4};
  std::vector<onabc::VoterId> three = {1, 2, 3};
  EXPECT_EQ(policy.witness_level(four), 1);
  EXPECT_EQ(policy.witness_level(three), 0);
}

TEST(Ogca, LedgerAndHkEjr) {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 300; ++trial) {
    int n = oracle::uniform_int(rng, 1, 12);
    int m = oracle::uniform_int(rng, 1, 14);
    int k = oracle::uniform_int(rng, 1, std::min(m, 5));
    Election e = oracle::random_election(rng, m, n, k, trial % 2 ? 0.2 : 0.5);
    onabc::OgcaPolicy policy;
    auto trace = onabc::replay_traced(e, policy);
    ASSERT_LE(policy.max_payment(), Rational(1));
    ASSERT_LE(policy.prefill_selections(), k);
    auto counts = onabc::voter_counts(e, trace.committee);
    for (int v = 1; v <= n; ++v) ASSERT_EQ(policy.counters()[v], counts[v]);
    ASSERT_TRUE(
        onabc::check_ejr(e, trace.committee, onabc::harmonic(k)).pass);
  }
}

// --- SGBR ----------------------------------------------------------------------

TEST(Sgbr, Examples) {
  // n=4, k=2: alpha=2, price 4, type-1 floor 4, type-2 floor 8 > n.
  Election e(4, 2, {{1, 2, 3}, {1, 2, 3, 4}, {1, 2, 3, 4}, {}});
  onabc::SgbrPolicy policy;
  auto trace = onabc::replay_traced(e, policy);
  EXPECT_EQ(policy.alpha(), 2);
  EXPECT_EQ(trace.decisions[0], Decision::kReject);
  EXPECT_EQ(trace.decisions[1], Decision::kAccept);
  for (int v = 1; v <= 4; ++v) {
    EXPECT_EQ(policy.coins(v, 1), Rational(0));
    EXPECT_EQ(policy.coins(v, 2), Rational(1));
  }
  // Type-1 coins are exhausted and type 2 is out of reach.
  EXPECT_EQ(trace.decisions[2], Decision::kReject);
  EXPECT_EQ(policy.prefill_selections(), 1);
  EXPECT_EQ(policy.spent()[1], Rational(4));
}

TEST(Sgbr, ChargesTheRichestApprovers) {
  // n=8, k=4: alpha=2, price 4, floors ceil(8*2/4)=4 and ceil(8*4/4)=8.
  Election e(8, 4, {{1, 2, 3, 4}, {1, 2, 3, 4, 5, 6, 7, 8}, {}, {}, {}});
  onabc::SgbrPolicy policy;
  auto trace = onabc::replay_traced(e, policy);
  EXPECT_EQ(trace.decisions[0], Decision::kAccept);  // type 1, s=4
  // Second arrival: type 2 with all eight voters, 1/2 each.
  EXPECT_EQ(trace.decisions[1], Decision::kAccept);
  EXPECT_EQ(policy.coins(1, 1), Rational(0));
  EXPECT_EQ(policy.coins(5, 1), Rational(1));
  EXPECT_EQ(policy.coins(1, 2), Rational(1, 2));
  EXPECT_EQ(policy.coins(8, 2), Rational(1, 2));
}

TEST(Sgbr, ConservesCoinsAndSatisfiesEjr) {
  std::mt19937_64 rng(81);
  for (int trial = 0; trial < 200; ++trial) {
    int n = oracle::uniform_int(rng, 1, 20);
    int m = oracle::uniform_int(rng, 1, 14);
    int k = oracle::uniform_int(rng, 1, std::min(m, 8));
    Election e = oracle::random_election(rng, m, n, k, trial % 2 ? 0.2 : 0.5);
    onabc::SgbrPolicy policy;
    Committee w = onabc::replay(e, policy);
    ASSERT_LE(policy.prefill_selections(), k);
    for (int i = 1; i <= policy.alpha(); ++i) {
      ASSERT_LE(policy.spent()[i], Rational(n));
      for (int v = 1; v <= n; ++v) ASSERT_GE(policy.coins(v, i), 0);
    }
    int a = policy.alpha();
    ASSERT_TRUE(onabc::check_ejr(e, w, Rational(a * a)).pass);
  }
}

}  // namespace
