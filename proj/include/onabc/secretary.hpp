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

// Prior-free secretary policy for submodular Thiele functions.
//
// The stream is cut into k contiguous parts. Each part first observes a
// window of arrivals without selecting, remembering the best marginal gain
// seen; afterwards it takes the first arrival with a positive gain that
// reaches that level, or its own last arrival if none does. One selection per part.

#pragma once

#include <algorithm>
#include <boost/math/constants/constants.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>
#include <cstdint>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "onabc/election.hpp"
#include "onabc/rational.hpp"
#include "onabc/replay.hpp"
#include "onabc/thiele.hpp"

namespace onabc {

struct PartitionPlan {
  int m = 0;
  int k = 0;
  std::vector<int> first;    // first arrival of each part (1-based)
  std::vector<int> sizes;    // part sizes
  std::vector<int> cutoffs;  // observation window length of each part

  int part_of(int t) const {
    if (t < 1 || t > m) throw std::out_of_range("arrival outside plan");
    // Parts are in order, so a binary search over first[] is enough.
    auto it = std::upper_bound(first.begin(), first.end(), t);
    return static_cast<int>(it - first.begin()) - 1;
  }
  int last_of(int part) const { return first[part] + sizes[part] - 1; }
};

// ceil(m / (k e)), evaluated in 50-digit binary floating point. The quotient
// is irrational, so it is never within rounding distance of an integer.
inline int observation_window(int m, int k) {
  using Float = boost::multiprecision::cpp_bin_float_50;
  Float q = Float(m) / (Float(k) * boost::math::constants::e<Float>());
  return boost::multiprecision::ceil(q).convert_to<int>();
}

inline PartitionPlan make_partition(int m, int k) {
  if (k < 1) throw std::invalid_argument("partition needs k >= 1");
  if (m < k) throw std::invalid_argument("partition needs m >= k");
  PartitionPlan plan{m, k, {}, {}, {}};
  int big = m / k + (m % k ? 1 : 0), small = m / k;
  int window = observation_window(m, k);
  int next = 1;
  for (int i = 0; i < k; ++i) {
    int size = i < m % k ? big : small;
    plan.first.push_back(next);
    plan.sizes.push_back(size);
    plan.cutoffs.push_back(std::min(window, size - 1));
    next += size;
  }
  return plan;
}

namespace detail {

// Value is int64 (scaled weights) or Rational.
template <typename Value>
class SecretaryImpl : public OnlinePolicy {
 public:
  explicit SecretaryImpl(std::vector<Value> weights)
      : weights_(std::move(weights)) {}

  std::string name() const override { return "secretary"; }

  void start(const ElectionShape& shape) override {
    plan_ = make_partition(shape.m, shape.k);
    counts_.assign(shape.n + 1, 0);
    part_ = -1;
  }

  Decision decide(const ReplayState& state,
                  std::span<const VoterId> approvers) override {
    enter(state.t);
    if (done_) return Decision::kReject;
    int position = state.t - plan_.first[part_] + 1;
    if (position <= plan_.cutoffs[part_]) return Decision::kReject;
    // A zero gain never meets the floored threshold, so a part that sees
    // nothing of value falls through to its last arrival.
    Value g = gain(approvers);
    if (g >= threshold_ && g > Value(0)) return Decision::kAccept;
    return state.t == plan_.last_of(part_) ? Decision::kAccept
                                           : Decision::kReject;
  }

  void commit(const ReplayState& state, std::span<const VoterId> approvers,
              Decision d, bool) override {
    enter(state.t);
    int position = state.t - plan_.first[part_] + 1;
    if (position <= plan_.cutoffs[part_]) {
      Value g = gain(approvers);
      if (g > threshold_) threshold_ = g;  // strict: earliest max is kept
    }
    if (d == Decision::kAccept) {
      done_ = true;
      for (VoterId v : approvers) ++counts_[v];
    }
  }

  const PartitionPlan& plan() const { return plan_; }

 private:
  void enter(int t) {
    int p = plan_.part_of(t);
    if (p == part_) return;
    part_ = p;
    done_ = false;
    threshold_ = Value(0);
  }

  Value gain(std::span<const VoterId> approvers) const {
    Value g(0);
    for (VoterId v : approvers) {
      int next = counts_[v] + 1;
      if (next < static_cast<int>(weights_.size())) g += weights_[next];
    }
    return g;
  }

  std::vector<Value> weights_;  // [j] = w_j for j = 1..k, [0] unused
  PartitionPlan plan_;
  std::vector<int> counts_;
  int part_ = -1;
  bool done_ = false;
  Value threshold_{0};
};

}  // namespace detail

// Weights are scaled per election in start(), so one instance can replay
// elections of any shape.
class SecretaryPolicy : public OnlinePolicy {
 public:
  explicit SecretaryPolicy(ThieleFunction f) : f_(std::move(f)) {}

  std::string name() const override { return "secretary"; }

  void start(const ElectionShape& shape) override {
    if (auto scaled = scale_weights(f_, shape.k, shape.n)) {
      impl_ = std::make_unique<detail::SecretaryImpl<std::int64_t>>(
          scaled->weights);
    } else {
      std::vector<Rational> ws(shape.k + 1, Rational(0));
      for (int j = 1; j <= shape.k; ++j) ws[j] = f_.weight(j);
      impl_ = std::make_unique<detail::SecretaryImpl<Rational>>(std::move(ws));
    }
    impl_->start(shape);
  }
  Decision decide(const ReplayState& state,
                  std::span<const VoterId> approvers) override {
    return impl_->decide(state, approvers);
  }
  void commit(const ReplayState& state, std::span<const VoterId> approvers,
              Decision d, bool forced) override {
    impl_->commit(state, approvers, d, forced);
  }

  const ThieleFunction& function() const { return f_; }

 private:
  ThieleFunction f_;
  std::unique_ptr<OnlinePolicy> impl_;
};

}  // namespace onabc
