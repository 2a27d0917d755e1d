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

// Optimal safe policy for a general Thiele function f.
//
// Voters are anonymized within each prior cluster. A voter's level is the
// number of selected candidates it approves, capped at the saturation d of f
// (beyond d every marginal weight is zero). A state is
//
//   (alpha, beta, L, A)
//
// with L[q][c] the number of cluster-q voters at level c and A[q][c] <= L[q][c]
// the number of those approving the current candidate. Accepting earns
// sum_{q,c} A[q][c] * w_{c+1} and moves the approvers one level up.
//
// The state space is a product of compositions per cluster, so its size is
// estimated before anything is allocated and checked against a budget.

#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "onabc/dp/prior.hpp"
#include "onabc/dp/tables.hpp"
#include "onabc/election.hpp"
#include "onabc/rational.hpp"
#include "onabc/replay.hpp"
#include "onabc/thiele.hpp"

namespace onabc {

inline constexpr std::uint64_t kDefaultStateBudget = 5'000'000;
// PAV and MAV never saturate below k, so their level histograms grow with
// both n and k; larger electorates are refused unless the caller opts in.
inline constexpr int kDefaultUnboundedVoterCap = 8;

struct ThieleTableOptions {
  std::uint64_t state_budget = kDefaultStateBudget;
  int unbounded_voter_cap = kDefaultUnboundedVoterCap;
};

class ThieleTable {
 public:
  using Histogram = std::vector<int>;  // flattened [cluster][level]

  const ElectionShape& shape() const { return shape_; }
  const ThieleFunction& function() const { return f_; }
  const ApprovalPrior& prior() const { return prior_; }
  int saturation() const { return d_; }
  int levels() const { return d_ + 1; }
  int clusters() const { return static_cast<int>(sizes_.size()); }
  // Cluster of each voter id (entry 0 unused).
  const std::vector<int>& voter_clusters() const { return voter_cluster_; }

  std::size_t size() const { return values_.size(); }
  std::size_t configurations() const { return configs_.size(); }

  bool contains(int alpha, int beta, const Histogram& levels,
                const Histogram& approving) const {
    if (alpha < 1 || alpha > shape_.m) return false;
    if (beta < detail::beta_min(shape_.m, shape_.k, alpha) ||
        beta > detail::beta_max(shape_.k, alpha))
      return false;
    auto it = config_index_.find(levels);
    if (it == config_index_.end()) return false;
    if (approving.size() != levels.size()) return false;
    for (std::size_t i = 0; i < levels.size(); ++i)
      if (approving[i] < 0 || approving[i] > levels[i]) return false;
    return true;
  }

  TableEntry at(int alpha, int beta, const Histogram& levels,
                const Histogram& approving) const {
    if (!contains(alpha, beta, levels, approving))
      throw std::out_of_range("Thiele state not in table (alpha=" +
                              std::to_string(alpha) +
                              ", beta=" + std::to_string(beta) + ")");
    int c = config_index_.at(levels);
    std::size_t slot = slot_of(alpha, beta) + offsets_[c] +
                       split_index(configs_[c], approving);
    return {decisions_[slot] ? Decision::kAccept : Decision::kReject,
            values_[slot]};
  }

  // sum over splits A of P(A | L) V*(alpha, beta, L, A)
  Rational expected(int alpha, int beta, const Histogram& levels) const {
    auto it = config_index_.find(levels);
    if (it == config_index_.end())
      throw std::out_of_range("level histogram not in table");
    return expected_at(alpha, beta, it->second);
  }

  Rational initial_value() const { return expected_at(1, 0, 0); }

  const std::vector<std::pair<int, int>>& tie_rows() const { return ties_; }
  std::size_t ties() const { return ties_.size(); }

  void dump(std::ostream& out) const {
    out << "# rule=thiele f=" << f_.spec() << " m=" << shape_.m
        << " n=" << shape_.n << " k=" << shape_.k
        << " prior=" << prior_.describe() << " levels=" << levels() << "\n";
    out << "# V_init=" << format_fraction(initial_value()) << "\n";
    out << "# alpha beta L A decision value  (L, A flattened cluster-major)\n";
    for (int a = shape_.m; a >= 1; --a)
      for (int b = detail::beta_max(shape_.k, a);
           b >= detail::beta_min(shape_.m, shape_.k, a); --b)
        for (std::size_t c = 0; c < configs_.size(); ++c)
          for (std::size_t s = 0; s < splits_[c].size(); ++s) {
            std::size_t slot = slot_of(a, b) + offsets_[c] + s;
            out << a << ' ' << b << ' ' << join(configs_[c]) << ' '
                << join(splits_[c][s].approving) << ' '
                << (decisions_[slot] ? "yes" : "no") << ' '
                << format_fraction(values_[slot]) << '\n';
          }
  }

 private:
  friend ThieleTable build_thiele_table(int, int, int, const ThieleFunction&,
                                        const ApprovalPrior&,
                                        const ThieleTableOptions&);
  friend BellmanAudit audit_bellman(const ThieleTable&);

  struct Split {
    Histogram approving;
    Rational probability;  // P(A | L)
    Rational reward;       // sum A[q][c] * w_{c+1}
    int successor;         // configuration index of L after accepting
  };

  ThieleTable(ElectionShape shape, ThieleFunction f, ApprovalPrior prior)
      : shape_(shape), f_(std::move(f)), prior_(std::move(prior)) {}

  static std::string join(const Histogram& h) {
    std::string s;
    for (std::size_t i = 0; i < h.size(); ++i) {
      if (i) s += ',';
      s += std::to_string(h[i]);
    }
    return s;
  }

  // Mixed-radix position of A among the splits of L.
  static std::size_t split_index(const Histogram& levels,
                                 const Histogram& approving) {
    std::size_t index = 0, stride = 1;
    for (std::size_t i = 0; i < levels.size(); ++i) {
      index += approving[i] * stride;
      stride *= levels[i] + 1;
    }
    return index;
  }

  std::size_t slot_of(int alpha, int beta) const {
    return block_start_[static_cast<std::size_t>(alpha - 1) * (shape_.k + 1) +
                        beta];
  }

  const Rational& expected_at(int alpha, int beta, int c) const {
    return expectations_[(static_cast<std::size_t>(alpha - 1) * (shape_.k + 1) +
                          beta) *
                             configs_.size() +
                         c];
  }

  // Recomputed from the stored state values.
  Rational sum_expected(int alpha, int beta, int c) const {
    Rational v = 0;
    std::size_t base = slot_of(alpha, beta) + offsets_[c];
    for (std::size_t s = 0; s < splits_[c].size(); ++s)
      v += splits_[c][s].probability * values_[base + s];
    return v;
  }

  ElectionShape shape_;
  ThieleFunction f_;
  ApprovalPrior prior_;
  int d_ = 0;
  std::vector<int> sizes_;
  std::vector<int> voter_cluster_;
  std::vector<Histogram> configs_;
  std::map<Histogram, int> config_index_;
  std::vector<std::vector<Split>> splits_;
  std::vector<std::size_t> offsets_;      // per configuration
  std::vector<std::size_t> block_start_;  // per (alpha, beta)
  std::vector<Rational> values_;
  std::vector<std::uint8_t> decisions_;
  std::vector<Rational> expectations_;  // per (alpha, beta, configuration)
  std::vector<std::pair<int, int>> ties_;  // (alpha, beta) rows with a tie
};

namespace detail {

// All ways to write `total` as an ordered sum of `parts` non-negative ints.
inline void compositions(int total, int parts, std::vector<int>& prefix,
                         std::vector<std::vector<int>>& out) {
  if (parts == 1) {
    prefix.push_back(total);
    out.push_back(prefix);
    prefix.pop_back();
    return;
  }
  for (int x = 0; x <= total; ++x) {
    prefix.push_back(x);
    compositions(total - x, parts - 1, prefix, out);
    prefix.pop_back();
  }
}

inline std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b) {
  if (a != 0 && b > UINT64_MAX / a) return UINT64_MAX;
  return a * b;
}

}  // namespace detail

inline ThieleTable build_thiele_table(
    int m, int n, int k, const ThieleFunction& f, const ApprovalPrior& prior,
    const ThieleTableOptions& options = {}) {
  detail::check_dims(m, n, k);
  if (!f.has_bounded_support() && n > options.unbounded_voter_cap)
    throw BudgetExceeded("Thiele table for f=" + f.spec() + " needs n <= " +
                         std::to_string(options.unbounded_voter_cap) +
                         " (f never saturates below k), got n=" +
                         std::to_string(n));
  ThieleTable t({m, n, k}, f, prior);
  t.d_ = f.saturation(k);
  t.sizes_ = prior.cluster_sizes(n);
  const int levels = t.d_ + 1;
  const int clusters = static_cast<int>(t.sizes_.size());
  t.voter_cluster_.assign(n + 1, 0);
  for (int v = 1; v <= n; ++v) t.voter_cluster_[v] = prior.cluster_of(v, n);

  // Splits per configuration: prod over clusters of sum over compositions of
  // prod (L+1). Estimate that, times the (alpha, beta) blocks, up front.
  std::vector<std::vector<std::vector<int>>> per_cluster(clusters);
  std::uint64_t splits_total = 1;
  for (int q = 0; q < clusters; ++q) {
    std::vector<int> prefix;
    detail::compositions(t.sizes_[q], levels, prefix, per_cluster[q]);
    std::uint64_t cluster_splits = 0;
    for (const auto& comp : per_cluster[q]) {
      std::uint64_t s = 1;
      for (int x : comp) s = detail::saturating_mul(s, x + 1);
      cluster_splits += s;
    }
    splits_total = detail::saturating_mul(splits_total, cluster_splits);
  }
  std::uint64_t blocks = 0;
  for (int a = 1; a <= m; ++a)
    blocks += detail::beta_max(k, a) - detail::beta_min(m, k, a) + 1;
  std::uint64_t estimate = detail::saturating_mul(splits_total, blocks);
  if (estimate > options.state_budget)
    throw BudgetExceeded("Thiele table needs an estimated " +
                         std::to_string(estimate) + " states, budget is " +
                         std::to_string(options.state_budget));

  // Configurations as the cartesian product of per-cluster compositions. The
  // all-zero-level configuration comes first.
  {
    std::vector<std::size_t> pick(clusters, 0);
    while (true) {
      ThieleTable::Histogram h;
      h.reserve(clusters * levels);
      for (int q = 0; q < clusters; ++q) {
        // compositions() lists the all-at-top-level vector first; reverse
        // each so index 0 has everybody at level 0.
        const auto& comp = per_cluster[q][pick[q]];
        h.insert(h.end(), comp.rbegin(), comp.rend());
      }
      t.config_index_.emplace(h, static_cast<int>(t.configs_.size()));
      t.configs_.push_back(std::move(h));
      int q = 0;
      while (q < clusters && ++pick[q] == per_cluster[q].size()) pick[q++] = 0;
      if (q == clusters) break;
    }
  }

  const auto& ps = prior.cluster_probabilities();
  std::vector<Rational> weights(levels);
  for (int c = 0; c < levels; ++c)
    weights[c] = c < t.d_ ? f.weight(c + 1) : Rational(0);

  t.splits_.resize(t.configs_.size());
  t.offsets_.resize(t.configs_.size());
  std::size_t per_block = 0;
  for (std::size_t ci = 0; ci < t.configs_.size(); ++ci) {
    const auto& L = t.configs_[ci];
    t.offsets_[ci] = per_block;
    ThieleTable::Histogram A(L.size(), 0);
    while (true) {
      ThieleTable::Split split;
      split.approving = A;
      split.probability = 1;
      split.reward = 0;
      ThieleTable::Histogram next = L;
      for (int q = 0; q < clusters; ++q)
        for (int c = 0; c < levels; ++c) {
          int i = q * levels + c;
          split.probability *= binom_prob(L[i], A[i], ps[q]);
          split.reward += weights[c] * A[i];
          next[i] -= A[i];
          next[q * levels + std::min(c + 1, t.d_)] += A[i];
        }
      split.successor = t.config_index_.at(next);
      t.splits_[ci].push_back(std::move(split));
      std::size_t i = 0;
      while (i < A.size() && ++A[i] > L[i]) A[i++] = 0;
      if (i == A.size()) break;
    }
    per_block += t.splits_[ci].size();
  }

  t.block_start_.assign(static_cast<std::size_t>(m) * (k + 1), 0);
  std::size_t total = 0;
  for (int a = 1; a <= m; ++a)
    for (int b = detail::beta_min(m, k, a); b <= detail::beta_max(k, a); ++b) {
      t.block_start_[static_cast<std::size_t>(a - 1) * (k + 1) + b] = total;
      total += per_block;
    }
  t.values_.assign(total, Rational(0));
  t.decisions_.assign(total, 0);
  t.expectations_.assign(
      static_cast<std::size_t>(m) * (k + 1) * t.configs_.size(), Rational(0));

  for (int a = m; a >= 1; --a)
    for (int b = detail::beta_min(m, k, a); b <= detail::beta_max(k, a); ++b) {
      bool full = b == k;
      bool tight = b + (m - a + 1) == k;
      bool tie_seen = false;
      if (full) continue;  // value 0, decision no
      for (std::size_t ci = 0; ci < t.configs_.size(); ++ci) {
        Rational v_no = 0;
        if (!tight && a < m) v_no = t.expected_at(a + 1, b, ci);
        std::size_t base = t.slot_of(a, b) + t.offsets_[ci];
        for (std::size_t s = 0; s < t.splits_[ci].size(); ++s) {
          const auto& split = t.splits_[ci][s];
          Rational v_yes = split.reward;
          if (a < m) v_yes += t.expected_at(a + 1, b + 1, split.successor);
          if (!tight && v_yes == v_no) tie_seen = true;
          if (tight || v_yes >= v_no) {
            t.values_[base + s] = std::move(v_yes);
            t.decisions_[base + s] = 1;
          } else {
            t.values_[base + s] = v_no;
          }
        }
      }
      if (tie_seen) t.ties_.emplace_back(a, b);
      std::size_t row =
          (static_cast<std::size_t>(a - 1) * (k + 1) + b) * t.configs_.size();
      for (std::size_t ci = 0; ci < t.configs_.size(); ++ci)
        t.expectations_[row + ci] = t.sum_expected(a, b, ci);
    }
  return t;
}

inline BellmanAudit audit_bellman(const ThieleTable& t) {
  BellmanAudit audit;
  const auto [m, n, k] = t.shape_;
  // Expectations recomputed from the stored values, independent of the cache
  // kept by the builder.
  std::vector<std::optional<Rational>> recomputed(t.expectations_.size());
  auto expect = [&](int a, int b, int ci) -> const Rational& {
    auto& slot = recomputed[(static_cast<std::size_t>(a - 1) * (k + 1) + b) *
                                t.configs_.size() +
                            ci];
    if (!slot) slot = t.sum_expected(a, b, ci);
    return *slot;
  };
  for (int a = 1; a <= m; ++a)
    for (int b = detail::beta_min(m, k, a); b <= detail::beta_max(k, a); ++b) {
      bool full = b == k;
      bool tight = b + (m - a + 1) == k;
      for (std::size_t ci = 0; ci < t.configs_.size(); ++ci) {
        std::size_t base = t.slot_of(a, b) + t.offsets_[ci];
        for (std::size_t s = 0; s < t.splits_[ci].size(); ++s) {
          ++audit.states;
          const Rational& stored = t.values_[base + s];
          bool yes = t.decisions_[base + s] != 0;
          if (full) {
            if (yes || stored != 0) ++audit.mismatches;
            continue;
          }
          const auto& split = t.splits_[ci][s];
          Rational v_yes = split.reward;
          if (a < m) v_yes += expect(a + 1, b + 1, split.successor);
          if (tight) {
            if (!yes || stored != v_yes) ++audit.mismatches;
            continue;
          }
          ++audit.decisions;
          Rational v_no = a < m ? expect(a + 1, b, static_cast<int>(ci))
                                : Rational(0);
          bool want_yes = v_yes >= v_no;
          if (yes != want_yes || stored != (want_yes ? v_yes : v_no))
            ++audit.mismatches;
        }
      }
    }
  return audit;
}

class ThieleTablePolicy : public OnlinePolicy {
 public:
  explicit ThieleTablePolicy(std::shared_ptr<const ThieleTable> table)
      : table_(std::move(table)) {}
  std::string name() const override { return "dp-thiele"; }
  void start(const ElectionShape& shape) override {
    detail::require_shape(table_->shape(), shape);
    level_.assign(shape.n + 1, 0);
    histogram_.assign(table_->clusters() * table_->levels(), 0);
    const auto& clusters = table_->voter_clusters();
    for (int v = 1; v <= shape.n; ++v)
      ++histogram_[clusters[v] * table_->levels()];
  }
  Decision decide(const ReplayState& state,
                  std::span<const VoterId> approvers) override {
    ThieleTable::Histogram approving(histogram_.size(), 0);
    for (VoterId v : approvers) ++approving[slot(v)];
    return table_
        ->at(state.t, state.selected.size(), histogram_, approving)
        .decision;
  }
  void commit(const ReplayState&, std::span<const VoterId> approvers,
              Decision d, bool) override {
    if (d != Decision::kAccept) return;
    for (VoterId v : approvers) {
      if (level_[v] == table_->saturation()) continue;
      --histogram_[slot(v)];
      ++level_[v];
      ++histogram_[slot(v)];
    }
  }

 private:
  std::size_t slot(VoterId v) const {
    return table_->voter_clusters()[v] * table_->levels() + level_[v];
  }

  std::shared_ptr<const ThieleTable> table_;
  std::vector<int> level_;
  ThieleTable::Histogram histogram_;
};

inline std::unique_ptr<OnlinePolicy> as_policy(
    std::shared_ptr<const ThieleTable> table) {
  return std::make_unique<ThieleTablePolicy>(std::move(table));
}

}  // namespace onabc
