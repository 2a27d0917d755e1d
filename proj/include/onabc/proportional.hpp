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

// Budget-based online rules with proportionality guarantees.
//
//   greedy-budget  every voter holds 1 dollar, a candidate costs n/k and is
//                  bought as soon as its approvers can pay (PJR)
//   ogca           accept when some l has at least H(k) l n / k approvers
//                  that approve fewer than l selected candidates (H(k)-EJR)
//   sgbr           alpha = ceil(w(k)) coin types; a candidate is bought with
//                  the highest coin type some approver group can afford
//                  (ceil(w(k))^2-EJR)
//
// Seats left open by a rule are filled by the replay harness.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "onabc/election.hpp"
#include "onabc/rational.hpp"
#include "onabc/replay.hpp"

namespace onabc {

// The x >= 1 with x^x = i, by bisection on x ln x = ln i.
inline double w_inverse(double i) {
  if (!(i >= 1)) throw std::invalid_argument("w_inverse needs i >= 1");
  if (i == 1) return 1;
  long double target = std::log(static_cast<long double>(i));
  long double lo = 1, hi = 2;
  while (hi * std::log(hi) < target) hi *= 2;
  for (int step = 0; step < 200 && hi - lo > 0; ++step) {
    long double mid = lo + (hi - lo) / 2;
    if (mid == lo || mid == hi) break;
    if (mid * std::log(mid) < target)
      lo = mid;
    else
      hi = mid;
  }
  return static_cast<double>(lo + (hi - lo) / 2);
}

namespace detail {

// a^a compared against k without overflow.
inline bool self_power_at_least(std::uint64_t a, std::uint64_t k) {
  unsigned __int128 p = 1;
  for (std::uint64_t j = 0; j < a; ++j) {
    p *= a;
    if (p >= k) return true;
  }
  return p >= k;
}

}  // namespace detail

// ceil(w(k)): the smallest integer a >= 1 with a^a >= k. The float estimate
// is corrected with exact integer powers.
inline int ceil_w(std::uint64_t k) {
  if (k < 1) throw std::invalid_argument("ceil_w needs k >= 1");
  auto a = static_cast<std::uint64_t>(std::ceil(w_inverse(static_cast<double>(k))));
  a = std::max<std::uint64_t>(a, 1);
  while (!detail::self_power_at_least(a, k)) ++a;
  while (a > 1 && detail::self_power_at_least(a - 1, k)) --a;
  return static_cast<int>(a);
}

// Splits `price` over voters with the given balances so that the largest
// individual charge is as small as possible: everybody pays min(balance,
// lambda) for the unique level lambda raising exactly `price`.
inline std::vector<Rational> water_fill(const std::vector<Rational>& balances,
                                        const Rational& price) {
  Rational total = 0;
  for (const auto& b : balances) total += b;
  if (total < price)
    throw std::invalid_argument("water_fill: balances below price");
  std::vector<std::size_t> order(balances.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    return balances[x] < balances[y];
  });
  std::vector<Rational> charges(balances.size(), Rational(0));
  Rational remaining = price;
  for (std::size_t r = 0; r < order.size(); ++r) {
    std::size_t left = order.size() - r;
    const Rational& b = balances[order[r]];
    if (b * left >= remaining) {
      Rational level = remaining / left;
      for (std::size_t j = r; j < order.size(); ++j) charges[order[j]] = level;
      return charges;
    }
    charges[order[r]] = b;
    remaining -= b;
  }
  return charges;  // price == 0 with no voters
}

class GreedyBudgetingPolicy : public OnlinePolicy {
 public:
  std::string name() const override { return "greedy-budget"; }

  void start(const ElectionShape& shape) override {
    balances_.assign(shape.n + 1, Rational(1));
    balances_[0] = 0;
    price_ = Rational(shape.n, shape.k);
    charged_ = 0;
  }

  Decision decide(const ReplayState&,
                  std::span<const VoterId> approvers) override {
    Rational total = 0;
    for (VoterId v : approvers) total += balances_[v];
    return total >= price_ ? Decision::kAccept : Decision::kReject;
  }

  void commit(const ReplayState&, std::span<const VoterId> approvers,
              Decision d, bool forced) override {
    if (forced || d != Decision::kAccept) return;
    std::vector<Rational> held;
    held.reserve(approvers.size());
    for (VoterId v : approvers) held.push_back(balances_[v]);
    auto charges = water_fill(held, price_);
    for (std::size_t j = 0; j < approvers.size(); ++j)
      balances_[approvers[j]] -= charges[j];
    ++charged_;
  }

  // Indexed by voter id, entry 0 unused.
  const std::vector<Rational>& balances() const { return balances_; }
  Rational total_balance() const {
    Rational sum = 0;
    for (const auto& b : balances_) sum += b;
    return sum;
  }
  const Rational& price() const { return price_; }
  // Selections made by the rule itself, before the harness fills seats.
  int charged_selections() const { return charged_; }

 private:
  std::vector<Rational> balances_;
  Rational price_;
  int charged_ = 0;
};

// The payment ledger runs alongside the rule: every accepted candidate's
// price n/k is split equally over the under-satisfied approvers for the
// smallest l that triggered acceptance. Each such voter pays at most
// 1/(H(k) l) while holding fewer than l selected approvals, so no voter ever
// pays more than 1 in total.
class OgcaPolicy : public OnlinePolicy {
 public:
  std::string name() const override { return "ogca"; }

  void start(const ElectionShape& shape) override {
    shape_ = shape;
    counters_.assign(shape.n + 1, 0);
    payments_.assign(shape.n + 1, Rational(0));
    prefill_ = 0;
    pending_level_ = 0;
    // Acceptance at level l needs ceil(H(k) l n / k) under-satisfied
    // approvers; levels whose threshold exceeds n can never fire.
    Rational h = harmonic(shape.k);
    thresholds_.assign(shape.k + 1, -1);
    for (int l = 1; l <= shape.k; ++l) {
      Integer need = ceil_of(h * l * shape.n / shape.k);
      if (need <= shape.n) thresholds_[l] = need.convert_to<long long>();
    }
  }

  Decision decide(const ReplayState&,
                  std::span<const VoterId> approvers) override {
    pending_level_ = witness_level(approvers);
    return pending_level_ > 0 ? Decision::kAccept : Decision::kReject;
  }

  void commit(const ReplayState&, std::span<const VoterId> approvers,
              Decision d, bool forced) override {
    if (d != Decision::kAccept) return;
    if (!forced) {
      int l = pending_level_;
      std::vector<VoterId> payers;
      for (VoterId v : approvers)
        if (counters_[v] < l) payers.push_back(v);
      Rational share = Rational(shape_.n, shape_.k) / payers.size();
      for (VoterId v : payers) payments_[v] += share;
      ++prefill_;
    }
    for (VoterId v : approvers) ++counters_[v];
  }

  // Smallest l with enough under-satisfied approvers, 0 if none.
  int witness_level(std::span<const VoterId> approvers) const {
    // below[c] = approvers whose counter is exactly c (c < k).
    std::vector<long long> below(shape_.k + 1, 0);
    for (VoterId v : approvers)
      if (counters_[v] < shape_.k) ++below[counters_[v]];
    long long under = 0;  // approvers with counter < l
    for (int l = 1; l <= shape_.k; ++l) {
      under += below[l - 1];
      if (thresholds_[l] >= 0 && under >= thresholds_[l]) return l;
    }
    return 0;
  }

  const std::vector<int>& counters() const { return counters_; }
  const std::vector<Rational>& payments() const { return payments_; }
  Rational max_payment() const {
    Rational best = 0;
    for (const auto& p : payments_) best = std::max(best, p);
    return best;
  }
  int prefill_selections() const { return prefill_; }

 private:
  ElectionShape shape_;
  std::vector<int> counters_;
  std::vector<Rational> payments_;
  std::vector<long long> thresholds_;
  int prefill_ = 0;
  int pending_level_ = 0;
};

class SgbrPolicy : public OnlinePolicy {
 public:
  std::string name() const override { return "sgbr"; }

  void start(const ElectionShape& shape) override {
    shape_ = shape;
    alpha_ = ceil_w(shape.k);
    std::size_t cells = static_cast<std::size_t>(shape.n + 1) * alpha_;
    coins_.assign(cells, Rational(1));
    approx_.assign(cells, 1.0);
    spent_.assign(alpha_ + 1, Rational(0));
    price_ = Rational(static_cast<long long>(shape.n) * alpha_, shape.k);
    price_approx_ = to_double(price_);
    min_group_.assign(alpha_ + 1, 0);
    Integer power = 1;
    for (int i = 1; i <= alpha_; ++i) {
      power *= alpha_;
      Integer need = ceil_of(Rational(power * shape.n, shape.k));
      min_group_[i] = need > shape.n ? shape.n + 1LL : need.convert_to<long long>();
    }
    prefill_ = 0;
  }

  Decision decide(const ReplayState&,
                  std::span<const VoterId> approvers) override {
    pending_.clear();
    const long long size = static_cast<long long>(approvers.size());
    for (int i = alpha_; i >= 1; --i) {
      if (min_group_[i] > size) continue;
      std::vector<VoterId> order(approvers.begin(), approvers.end());
      std::sort(order.begin(), order.end(), [&](VoterId x, VoterId y) {
        int c = compare_coins(x, y, i);
        return c != 0 ? c > 0 : x < y;
      });
      for (long long s = size; s >= min_group_[i]; --s) {
        if (!affords(order[s - 1], i, s)) continue;
        pending_type_ = i;
        pending_.assign(order.begin(), order.begin() + s);
        return Decision::kAccept;
      }
    }
    return Decision::kReject;
  }

  void commit(const ReplayState&, std::span<const VoterId>, Decision d,
              bool forced) override {
    if (forced || d != Decision::kAccept) return;
    Rational each = price_ / static_cast<long long>(pending_.size());
    for (VoterId v : pending_) {
      auto& cell = coins_[index(v, pending_type_)];
      cell -= each;
      approx_[index(v, pending_type_)] = to_double(cell);
    }
    spent_[pending_type_] += price_;
    ++prefill_;
  }

  int alpha() const { return alpha_; }
  const Rational& coins(VoterId v, int type) const {
    return coins_[index(v, type)];
  }
  // Coins of type i spent so far (index 0 unused).
  const std::vector<Rational>& spent() const { return spent_; }
  int prefill_selections() const { return prefill_; }

 private:
  std::size_t index(VoterId v, int type) const {
    return static_cast<std::size_t>(v) * alpha_ + (type - 1);
  }

  // Sign of coins(x) - coins(y) for type i; doubles decide unless close.
  int compare_coins(VoterId x, VoterId y, int i) const {
    double dx = approx_[index(x, i)], dy = approx_[index(y, i)];
    if (std::abs(dx - dy) > 1e-9) return dx > dy ? 1 : -1;
    const Rational& rx = coins_[index(x, i)];
    const Rational& ry = coins_[index(y, i)];
    return rx == ry ? 0 : (rx > ry ? 1 : -1);
  }

  // coins(v, i) >= price / s
  bool affords(VoterId v, int i, long long s) const {
    double lhs = approx_[index(v, i)] * static_cast<double>(s);
    if (std::abs(lhs - price_approx_) > 1e-9 * std::max(1.0, price_approx_))
      return lhs > price_approx_;
    return coins_[index(v, i)] * s >= price_;
  }

  ElectionShape shape_;
  int alpha_ = 1;
  std::vector<Rational> coins_;
  std::vector<double> approx_;
  std::vector<Rational> spent_;
  std::vector<long long> min_group_;
  Rational price_;
  double price_approx_ = 0;
  int prefill_ = 0;
  int pending_type_ = 0;
  std::vector<VoterId> pending_;
};

}  // namespace onabc
