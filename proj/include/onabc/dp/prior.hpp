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

// Approval priors. Every voter approves every arriving candidate
// independently; under the uniform prior all voters share one probability p,
// under the typed prior voters are split into consecutive id blocks
// (clusters) with one probability per block.

#pragma once

#include <numeric>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "onabc/rational.hpp"

namespace onabc {

// C(n, j) p^j (1-p)^(n-j), exact.
inline Rational binom_prob(int n, int j, const Rational& p) {
  if (n < 0 || j < 0) throw std::invalid_argument("binom_prob: negative count");
  if (j > n) throw std::invalid_argument("binom_prob: j > n");
  if (p < 0 || p > 1) throw std::invalid_argument("binom_prob: p outside [0,1]");
  Integer c = 1;
  for (int i = 1; i <= j; ++i) c = c * (n - j + i) / i;
  Rational q = Rational(1) - p;
  Rational pj = power(p, static_cast<unsigned>(j));
  Rational qj = power(q, static_cast<unsigned>(n - j));
  return Rational(c) * pj * qj;
}

// Full binomial pmf, index j = 0..n.
inline std::vector<Rational> binomial_pmf(int n, const Rational& p) {
  std::vector<Rational> out(n + 1);
  for (int j = 0; j <= n; ++j) out[j] = binom_prob(n, j, p);
  return out;
}

class ApprovalPrior {
 public:
  static ApprovalPrior uniform(Rational p) {
    if (p < 0 || p > 1)
      throw std::invalid_argument("approval probability outside [0,1]");
    ApprovalPrior prior;
    prior.probabilities_ = {std::move(p)};
    return prior;
  }

  static ApprovalPrior typed(std::vector<int> sizes,
                             std::vector<Rational> probabilities) {
    if (sizes.empty() || sizes.size() != probabilities.size())
      throw std::invalid_argument("typed prior needs one p per cluster");
    for (int s : sizes)
      if (s < 0) throw std::invalid_argument("negative cluster size");
    for (const auto& p : probabilities)
      if (p < 0 || p > 1)
        throw std::invalid_argument("approval probability outside [0,1]");
    ApprovalPrior prior;
    prior.sizes_ = std::move(sizes);
    prior.probabilities_ = std::move(probabilities);
    return prior;
  }

  bool is_uniform() const { return sizes_.empty(); }
  const Rational& uniform_p() const {
    if (!is_uniform()) throw std::logic_error("prior is typed");
    return probabilities_.front();
  }

  // Cluster sizes for n voters (a single cluster of size n when uniform).
  std::vector<int> cluster_sizes(int n) const {
    if (is_uniform()) return {n};
    int total = std::accumulate(sizes_.begin(), sizes_.end(), 0);
    if (total != n)
      throw std::invalid_argument("typed prior cluster sizes sum to " +
                                  std::to_string(total) + ", election has n=" +
                                  std::to_string(n));
    return sizes_;
  }
  const std::vector<Rational>& cluster_probabilities() const {
    return probabilities_;
  }
  int clusters() const { return static_cast<int>(probabilities_.size()); }

  // Cluster index of a 1-based voter id.
  int cluster_of(int voter, int n) const {
    if (is_uniform()) return 0;
    auto sizes = cluster_sizes(n);
    int upto = 0;
    for (std::size_t q = 0; q < sizes.size(); ++q) {
      upto += sizes[q];
      if (voter <= upto) return static_cast<int>(q);
    }
    throw std::out_of_range("voter id beyond prior clusters");
  }

  const Rational& p_of(int voter, int n) const {
    return probabilities_[cluster_of(voter, n)];
  }

  // P_j: probability that exactly j of the n voters approve a candidate.
  // Typed priors convolve the per-cluster binomials.
  std::vector<Rational> approval_count_pmf(int n) const {
    auto sizes = cluster_sizes(n);
    std::vector<Rational> acc = {Rational(1)};
    for (std::size_t q = 0; q < sizes.size(); ++q) {
      auto part = binomial_pmf(sizes[q], probabilities_[q]);
      std::vector<Rational> next(acc.size() + part.size() - 1, Rational(0));
      for (std::size_t a = 0; a < acc.size(); ++a) {
        if (acc[a] == 0) continue;
        for (std::size_t b = 0; b < part.size(); ++b)
          next[a + b] += acc[a] * part[b];
      }
      acc = std::move(next);
    }
    return acc;
  }

  std::string describe() const {
    if (is_uniform()) return "uniform:" + to_string(probabilities_.front());
    std::string s = "typed:";
    for (std::size_t q = 0; q < sizes_.size(); ++q) {
      if (q) s += ",";
      s += std::to_string(sizes_[q]) + "@" + to_string(probabilities_[q]);
    }
    return s;
  }

 private:
  ApprovalPrior() = default;
  std::vector<int> sizes_;
  std::vector<Rational> probabilities_;
};

// "uniform:p", a bare "p", or "typed:size@p,size@p,...".
inline ApprovalPrior parse_prior(std::string_view text) {
  if (text.rfind("typed:", 0) == 0) {
    std::vector<int> sizes;
    std::vector<Rational> ps;
    std::string_view rest = text.substr(6);
    while (!rest.empty()) {
      auto comma = rest.find(',');
      std::string_view item = rest.substr(0, comma);
      auto at = item.find('@');
      if (at == std::string_view::npos)
        throw std::invalid_argument("typed prior entries look like size@p");
      Rational size = parse_rational(item.substr(0, at));
      if (denominator_of(size) != 1 || size < 0)
        throw std::invalid_argument("cluster size must be a whole number");
      sizes.push_back(numerator_of(size).convert_to<int>());
      ps.push_back(parse_rational(item.substr(at + 1)));
      if (comma == std::string_view::npos) break;
      rest = rest.substr(comma + 1);
    }
    return ApprovalPrior::typed(std::move(sizes), std::move(ps));
  }
  if (text.rfind("uniform:", 0) == 0) text = text.substr(8);
  return ApprovalPrior::uniform(parse_rational(text));
}

}  // namespace onabc
