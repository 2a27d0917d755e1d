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

// Thiele satisfaction functions and committee scoring.
//
// A Thiele function is stored through its marginal weights w_1, w_2, ...
// with f(r) = w_1 + ... + w_r. Built-ins:
//   mav   w_j = 1
//   pav   w_j = 1/j
//   cc    w_1 = 1, w_j = 0 for j >= 2
//   vec   explicit w_1..w_L, and w_j = 0 beyond L

#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "onabc/election.hpp"
#include "onabc/rational.hpp"

namespace onabc {

class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ThieleFunction {
 public:
  enum class Kind { kMav, kPav, kCc, kVector };

  static ThieleFunction mav() { return ThieleFunction(Kind::kMav, {}); }
  static ThieleFunction pav() { return ThieleFunction(Kind::kPav, {}); }
  static ThieleFunction cc() { return ThieleFunction(Kind::kCc, {}); }
  static ThieleFunction from_marginals(std::vector<Rational> marginals) {
    for (const auto& w : marginals)
      if (w < 0)
        throw std::invalid_argument("Thiele marginals must be non-negative");
    return ThieleFunction(Kind::kVector, std::move(marginals));
  }
  // (1, 1/2, 0, ..., 0)
  static ThieleFunction truncated_pav() {
    return from_marginals({Rational(1), Rational(1, 2)});
  }

  // "mav" | "pav" | "cc" | "vec:w1,w2,...,wk" with exact rational literals.
  static ThieleFunction parse(std::string_view text) {
    if (text == "mav") return mav();
    if (text == "pav") return pav();
    if (text == "cc") return cc();
    if (text == "tpav") return truncated_pav();
    if (text.rfind("vec:", 0) == 0) {
      std::vector<Rational> ws;
      std::string_view rest = text.substr(4);
      while (true) {
        auto comma = rest.find(',');
        ws.push_back(parse_rational(rest.substr(0, comma)));
        if (comma == std::string_view::npos) break;
        rest = rest.substr(comma + 1);
      }
      return from_marginals(std::move(ws));
    }
    throw std::invalid_argument("unknown Thiele function '" +
                                std::string(text) + "'");
  }

  Kind kind() const { return kind_; }

  // w_j for j >= 1.
  Rational weight(int j) const {
    if (j < 1) throw std::invalid_argument("Thiele weight index must be >= 1");
    switch (kind_) {
      case Kind::kMav:
        return 1;
      case Kind::kPav:
        return Rational(1, j);
      case Kind::kCc:
        return j == 1 ? 1 : 0;
      case Kind::kVector:
        return j <= static_cast<int>(marginals_.size()) ? marginals_[j - 1]
                                                        : Rational(0);
    }
    return 0;
  }

  // f(r) = w_1 + ... + w_r.
  Rational value(int r) const {
    Rational sum = 0;
    for (int j = 1; j <= r; ++j) sum += weight(j);
    return sum;
  }

  // Smallest d <= k with w_j = 0 for every j > d (k if there is none).
  int saturation(int k) const {
    int last = 0;
    switch (kind_) {
      case Kind::kMav:
      case Kind::kPav:
        return k;
      case Kind::kCc:
        last = 1;
        break;
      case Kind::kVector:
        for (int j = static_cast<int>(marginals_.size()); j >= 1; --j)
          if (marginals_[j - 1] != 0) {
            last = j;
            break;
          }
        break;
    }
    return std::min(last, k);
  }

  // True when some weight beyond a fixed index is zero for every k.
  bool has_bounded_support() const {
    return kind_ == Kind::kCc || kind_ == Kind::kVector;
  }

  std::string spec() const {
    switch (kind_) {
      case Kind::kMav:
        return "mav";
      case Kind::kPav:
        return "pav";
      case Kind::kCc:
        return "cc";
      case Kind::kVector: {
        std::string s = "vec:";
        for (std::size_t i = 0; i < marginals_.size(); ++i) {
          if (i) s += ",";
          s += to_string(marginals_[i]);
        }
        return s;
      }
    }
    return "?";
  }

  const std::vector<Rational>& explicit_marginals() const {
    return marginals_;
  }

 private:
  ThieleFunction(Kind kind, std::vector<Rational> marginals)
      : kind_(kind), marginals_(std::move(marginals)) {}

  Kind kind_;
  std::vector<Rational> marginals_;
};

// Submodularity of W -> f-sc(W) holds iff w_1 >= w_2 >= ... (non-increasing
// marginals). The built-ins all qualify.
inline bool is_submodular(const ThieleFunction& f) {
  if (f.kind() != ThieleFunction::Kind::kVector) return true;
  const auto& ws = f.explicit_marginals();
  for (std::size_t j = 1; j < ws.size(); ++j)
    if (ws[j] > ws[j - 1]) return false;
  return true;
}

// f-sc(W) = sum over voters of f(|A(i) ∩ W|).
inline Rational score(const Election& e, const Committee& w,
                      const ThieleFunction& f) {
  auto counts = voter_counts(e, w);
  std::vector<long long> histogram(w.size() + 1, 0);
  for (int v = 1; v <= e.n(); ++v) ++histogram[counts[v]];
  Rational total = 0;
  Rational fr = 0;
  for (int r = 1; r <= w.size(); ++r) {
    fr += f.weight(r);
    if (histogram[r]) total += fr * histogram[r];
  }
  return total;
}

// score(W ∪ {c}) − score(W) = sum over i in N(c) of w_{|A(i)∩W|+1}.
inline Rational marginal_gain(const Election& e, const Committee& w, int c,
                              const ThieleFunction& f) {
  if (c < 1 || c > e.m())
    throw std::out_of_range("candidate " + std::to_string(c) + " out of range");
  if (w.contains(c))
    throw std::invalid_argument("candidate " + std::to_string(c) +
                                " already in committee");
  auto counts = voter_counts(e, w);
  Rational gain = 0;
  for (VoterId v : e.approvers(c)) gain += f.weight(counts[v] + 1);
  return gain;
}

struct OptimumResult {
  Committee committee;
  Rational score;
};

inline constexpr std::uint64_t kDefaultEnumerationBudget = 10'000'000;

// Number of size-k subsets of an m-set, saturating at uint64 max.
inline std::uint64_t binomial_saturating(int m, int k) {
  if (k < 0 || k > m) return 0;
  k = std::min(k, m - k);
  unsigned __int128 r = 1;
  for (int i = 1; i <= k; ++i) {
    r = r * static_cast<unsigned>(m - k + i) / static_cast<unsigned>(i);
    if (r > std::numeric_limits<std::uint64_t>::max())
      return std::numeric_limits<std::uint64_t>::max();
  }
  return static_cast<std::uint64_t>(r);
}

struct ScaledWeights {
  Integer scale;                      // common denominator of w_1..w_k
  std::vector<std::int64_t> weights;  // weights[j] = w_j * scale, [0] unused
};

// Integer weights for fast exact scoring, available when every score of an
// n-voter election with committees of size <= k fits in int64 with headroom.
inline std::optional<ScaledWeights> scale_weights(const ThieleFunction& f,
                                                  int k, long long n) {
  std::vector<Rational> ws(k + 1, Rational(0));
  Integer lcm = 1;
  for (int j = 1; j <= k; ++j) {
    ws[j] = f.weight(j);
    lcm = boost::multiprecision::lcm(lcm, denominator_of(ws[j]));
  }
  Integer max_scaled = 0;
  for (int j = 1; j <= k; ++j)
    max_scaled = std::max<Integer>(max_scaled, numerator_of(ws[j] * lcm));
  Integer bound = max_scaled * n * k;
  if (bound >= Integer(std::numeric_limits<std::int64_t>::max() / 4))
    return std::nullopt;
  ScaledWeights out{lcm, std::vector<std::int64_t>(k + 1, 0)};
  for (int j = 1; j <= k; ++j)
    out.weights[j] = numerator_of(ws[j] * lcm).convert_to<std::int64_t>();
  return out;
}

namespace detail {

// Depth-first enumeration of size-k committees in lexicographic order,
// maintaining voter counts incrementally. Value is any ordered additive type
// (int64 for scaled weights, Rational otherwise).
template <typename Value>
class CommitteeSearch {
 public:
  CommitteeSearch(const Election& e, std::vector<Value> weights)
      : e_(e), weights_(std::move(weights)), counts_(e.n() + 1, 0) {}

  std::pair<std::vector<int>, Value> run() {
    current_.reserve(e_.k());
    dfs(1, Value(0));
    return {best_, best_value_};
  }

 private:
  void dfs(int from, Value value) {
    int depth = static_cast<int>(current_.size());
    if (depth == e_.k()) {
      if (!have_best_ || value > best_value_) {
        best_value_ = value;
        best_ = current_;
        have_best_ = true;
      }
      return;
    }
    int last_start = e_.m() - (e_.k() - depth) + 1;
    for (int c = from; c <= last_start; ++c) {
      Value gain(0);
      for (VoterId v : e_.approvers(c)) gain += weights_[++counts_[v]];
      current_.push_back(c);
      dfs(c + 1, value + gain);
      current_.pop_back();
      for (VoterId v : e_.approvers(c)) --counts_[v];
    }
  }

  const Election& e_;
  std::vector<Value> weights_;  // weights_[j] = w_j, index 0 unused
  std::vector<int> counts_;
  std::vector<int> current_;
  std::vector<int> best_;
  Value best_value_{};
  bool have_best_ = false;
};

}  // namespace detail

// Exhaustive offline optimum over all size-k committees. Ties go to the
// lexicographically smallest sorted member list.
inline OptimumResult offline_optimum(
    const Election& e, const ThieleFunction& f,
    std::uint64_t budget = kDefaultEnumerationBudget) {
  std::uint64_t count = binomial_saturating(e.m(), e.k());
  if (count > budget)
    throw BudgetExceeded("offline optimum needs C(" + std::to_string(e.m()) +
                         "," + std::to_string(e.k()) + ") = " +
                         (count == std::numeric_limits<std::uint64_t>::max()
                              ? std::string("> 2^64")
                              : std::to_string(count)) +
                         " committees, budget is " + std::to_string(budget));
  if (auto scaled = scale_weights(f, e.k(), e.n())) {
    auto [best, value] =
        detail::CommitteeSearch<std::int64_t>(e, scaled->weights).run();
    return {Committee(best), Rational(Integer(value), scaled->scale)};
  }
  std::vector<Rational> ws(e.k() + 1, Rational(0));
  for (int j = 1; j <= e.k(); ++j) ws[j] = f.weight(j);
  auto [best, value] = detail::CommitteeSearch<Rational>(e, ws).run();
  return {Committee(best), value};
}

}  // namespace onabc
