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

// Optimal safe policies for MAV and CC under a known approval prior,
// computed by backward induction over alpha = m, m-1, ..., 1.
//
// MAV state (alpha, beta, gamma): arrivals seen including the current one,
// candidates selected so far, approvals of the current candidate.
//
//   V(a,b,g,no)  =     sum_j P_j V*(a+1, b,   j)
//   V(a,b,g,yes) = g + sum_j P_j V*(a+1, b+1, j)
//
// CC state (alpha, beta, gamma, delta): delta voters approve no selected
// candidate, gamma of them approve the current one.
//
//   V(a,b,g,d,no)  =     sum_i p(i,d)   V*(a+1, b,   i, d)
//   V(a,b,g,d,yes) = g + sum_i p(i,d-g) V*(a+1, b+1, i, d-g)
//
// Full states (beta = k) map to "no" with value 0; tight states
// (beta + m - alpha + 1 = k) map to "yes". When both actions have the same
// value the table decides "yes" and records the tie.
//
// Values are exact rationals, so Bellman audits compare with ==.

#pragma once

#include <array>
#include <memory>
#include <ostream>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "onabc/dp/prior.hpp"
#include "onabc/election.hpp"
#include "onabc/rational.hpp"
#include "onabc/replay.hpp"

namespace onabc {

struct TableEntry {
  Decision decision = Decision::kReject;
  Rational value;
};

struct BellmanAudit {
  std::size_t states = 0;      // stored states inspected
  std::size_t decisions = 0;   // states where the policy had a choice
  std::size_t mismatches = 0;  // value or decision not reproduced
  bool ok() const { return mismatches == 0; }
};

namespace detail {

inline void check_dims(int m, int n, int k) {
  if (n < 1) throw std::invalid_argument("need n >= 1");
  if (k < 1) throw std::invalid_argument("need k >= 1");
  if (m < k) throw std::invalid_argument("need m >= k (no safe policy)");
}

// Selected-count range of states a safe run can be in at arrival alpha.
inline int beta_min(int m, int k, int alpha) {
  return std::max(0, k - (m - alpha + 1));
}
inline int beta_max(int k, int alpha) { return std::min(k, alpha - 1); }

}  // namespace detail

class MavTable {
 public:
  const ElectionShape& shape() const { return shape_; }
  const ApprovalPrior& prior() const { return prior_; }
  // P_j, j = 0..n.
  const std::vector<Rational>& approval_pmf() const { return pmf_; }

  bool contains(int alpha, int beta, int gamma) const {
    return alpha >= 1 && alpha <= shape_.m &&
           beta >= detail::beta_min(shape_.m, shape_.k, alpha) &&
           beta <= detail::beta_max(shape_.k, alpha) && gamma >= 0 &&
           gamma <= shape_.n;
  }
  const TableEntry& at(int alpha, int beta, int gamma) const {
    if (!contains(alpha, beta, gamma))
      throw std::out_of_range("MAV state (" + std::to_string(alpha) + "," +
                              std::to_string(beta) + "," +
                              std::to_string(gamma) + ") not in table");
    return entries_[index(alpha, beta, gamma)];
  }

  // sum_gamma P_gamma V*(1, 0, gamma)
  Rational initial_value() const {
    Rational v = 0;
    for (int g = 0; g <= shape_.n; ++g) v += pmf_[g] * at(1, 0, g).value;
    return v;
  }

  // sum_j P_j V*(alpha, beta, j)
  Rational expected(int alpha, int beta) const {
    Rational v = 0;
    for (int j = 0; j <= shape_.n; ++j) v += pmf_[j] * at(alpha, beta, j).value;
    return v;
  }

  std::size_t size() const {
    std::size_t count = 0;
    for (int a = 1; a <= shape_.m; ++a)
      for (int b = detail::beta_min(shape_.m, shape_.k, a);
           b <= detail::beta_max(shape_.k, a); ++b)
        count += shape_.n + 1;
    return count;
  }

  const std::vector<std::array<int, 3>>& ties() const { return ties_; }

  void dump(std::ostream& out) const {
    out << "# rule=mav m=" << shape_.m << " n=" << shape_.n
        << " k=" << shape_.k << " prior=" << prior_.describe() << "\n";
    out << "# V_init=" << format_fraction(initial_value()) << "\n";
    out << "# alpha beta gamma decision value\n";
    for (int a = shape_.m; a >= 1; --a)
      for (int b = detail::beta_max(shape_.k, a);
           b >= detail::beta_min(shape_.m, shape_.k, a); --b)
        for (int g = 0; g <= shape_.n; ++g) {
          const auto& e = at(a, b, g);
          out << a << ' ' << b << ' ' << g << ' ' << to_string(e.decision)
              << ' ' << format_fraction(e.value) << '\n';
        }
  }

 private:
  friend MavTable build_mav_table(int, int, int, const ApprovalPrior&);
  friend BellmanAudit audit_bellman(const MavTable&);

  MavTable(ElectionShape shape, ApprovalPrior prior)
      : shape_(shape), prior_(std::move(prior)) {}

  std::size_t index(int a, int b, int g) const {
    return (static_cast<std::size_t>(a - 1) * (shape_.k + 1) + b) *
               (shape_.n + 1) +
           g;
  }

  ElectionShape shape_;
  ApprovalPrior prior_;
  std::vector<Rational> pmf_;
  std::vector<TableEntry> entries_;
  std::vector<std::array<int, 3>> ties_;
};

inline MavTable build_mav_table(int m, int n, int k,
                                const ApprovalPrior& prior) {
  detail::check_dims(m, n, k);
  MavTable table({m, n, k}, prior);
  table.pmf_ = prior.approval_count_pmf(n);
  table.entries_.resize(static_cast<std::size_t>(m) * (k + 1) * (n + 1));
  // expected_next[b] = sum_j P_j V*(alpha+1, b, j), refreshed per alpha.
  std::vector<Rational> expected_next(k + 2, Rational(0));
  for (int a = m; a >= 1; --a) {
    int lo = detail::beta_min(m, k, a), hi = detail::beta_max(k, a);
    for (int b = lo; b <= hi; ++b) {
      bool full = b == k;
      bool tight = b + (m - a + 1) == k;
      for (int g = 0; g <= n; ++g) {
        TableEntry& entry = table.entries_[table.index(a, b, g)];
        if (full) {
          entry = {Decision::kReject, Rational(0)};
        } else if (tight) {
          Rational rest = a < m ? expected_next[b + 1] : Rational(0);
          entry = {Decision::kAccept, Rational(g) + rest};
        } else {
          const Rational& v_no = expected_next[b];
          Rational v_yes = Rational(g) + expected_next[b + 1];
          if (v_yes == v_no) table.ties_.push_back({a, b, g});
          if (v_yes >= v_no)
            entry = {Decision::kAccept, std::move(v_yes)};
          else
            entry = {Decision::kReject, v_no};
        }
      }
    }
    std::vector<Rational> current(k + 2, Rational(0));
    for (int b = lo; b <= hi; ++b) current[b] = table.expected(a, b);
    expected_next = std::move(current);
  }
  return table;
}

// Recomputes every stored value from the stored successor values.
inline BellmanAudit audit_bellman(const MavTable& t) {
  BellmanAudit audit;
  const auto [m, n, k] = t.shape();
  for (int a = 1; a <= m; ++a)
    for (int b = detail::beta_min(m, k, a); b <= detail::beta_max(k, a); ++b)
      for (int g = 0; g <= n; ++g) {
        ++audit.states;
        const auto& e = t.at(a, b, g);
        if (b == k) {
          if (e.decision != Decision::kReject || e.value != 0)
            ++audit.mismatches;
          continue;
        }
        Rational v_yes = Rational(g) + (a < m ? t.expected(a + 1, b + 1)
                                              : Rational(0));
        if (b + (m - a + 1) == k) {
          if (e.decision != Decision::kAccept || e.value != v_yes)
            ++audit.mismatches;
          continue;
        }
        ++audit.decisions;
        Rational v_no = t.expected(a + 1, b);
        Rational best = v_yes >= v_no ? v_yes : v_no;
        Decision d = v_yes >= v_no ? Decision::kAccept : Decision::kReject;
        if (e.value != best || e.decision != d) ++audit.mismatches;
      }
  return audit;
}

class CcTable {
 public:
  const ElectionShape& shape() const { return shape_; }
  const ApprovalPrior& prior() const { return prior_; }

  bool contains(int alpha, int beta, int gamma, int delta) const {
    if (alpha < 1 || alpha > shape_.m) return false;
    if (beta < detail::beta_min(shape_.m, shape_.k, alpha) ||
        beta > detail::beta_max(shape_.k, alpha))
      return false;
    if (delta < 0 || delta > shape_.n) return false;
    if (beta == 0 && delta != shape_.n) return false;
    return gamma >= 0 && gamma <= delta;
  }
  const TableEntry& at(int alpha, int beta, int gamma, int delta) const {
    if (!contains(alpha, beta, gamma, delta))
      throw std::out_of_range("CC state (" + std::to_string(alpha) + "," +
                              std::to_string(beta) + "," +
                              std::to_string(gamma) + "," +
                              std::to_string(delta) + ") not in table");
    return entries_[index(alpha, beta, gamma, delta)];
  }

  // sum_i p(i, delta) V*(alpha, beta, i, delta)
  Rational expected(int alpha, int beta, int delta) const {
    Rational v = 0;
    for (int i = 0; i <= delta; ++i)
      v += pmf_[delta][i] * at(alpha, beta, i, delta).value;
    return v;
  }

  Rational initial_value() const { return expected(1, 0, shape_.n); }

  std::size_t size() const {
    std::size_t count = 0;
    for (int a = 1; a <= shape_.m; ++a)
      for (int b = detail::beta_min(shape_.m, shape_.k, a);
           b <= detail::beta_max(shape_.k, a); ++b)
        for (int d = b == 0 ? shape_.n : 0; d <= shape_.n; ++d)
          count += d + 1;
    return count;
  }

  const std::vector<std::array<int, 4>>& ties() const { return ties_; }

  void dump(std::ostream& out) const {
    out << "# rule=cc m=" << shape_.m << " n=" << shape_.n
        << " k=" << shape_.k << " prior=" << prior_.describe() << "\n";
    out << "# V_init=" << format_fraction(initial_value()) << "\n";
    out << "# alpha beta gamma delta decision value\n";
    for (int a = shape_.m; a >= 1; --a)
      for (int b = detail::beta_max(shape_.k, a);
           b >= detail::beta_min(shape_.m, shape_.k, a); --b)
        for (int d = b == 0 ? shape_.n : 0; d <= shape_.n; ++d)
          for (int g = 0; g <= d; ++g) {
            const auto& e = at(a, b, g, d);
            out << a << ' ' << b << ' ' << g << ' ' << d << ' '
                << to_string(e.decision) << ' ' << format_fraction(e.value)
                << '\n';
          }
  }

 private:
  friend CcTable build_cc_table(int, int, int, const ApprovalPrior&);

  CcTable(ElectionShape shape, ApprovalPrior prior)
      : shape_(shape), prior_(std::move(prior)) {}

  std::size_t index(int a, int b, int g, int d) const {
    std::size_t n1 = shape_.n + 1;
    return ((static_cast<std::size_t>(a - 1) * (shape_.k + 1) + b) * n1 + d) *
               n1 +
           g;
  }

  ElectionShape shape_;
  ApprovalPrior prior_;
  std::vector<std::vector<Rational>> pmf_;  // pmf_[delta][i] = p(i, delta)
  std::vector<TableEntry> entries_;
  std::vector<std::array<int, 4>> ties_;
};

inline CcTable build_cc_table(int m, int n, int k, const ApprovalPrior& prior) {
  detail::check_dims(m, n, k);
  if (!prior.is_uniform())
    throw std::invalid_argument("CC tables support the uniform prior only");
  CcTable table({m, n, k}, prior);
  const Rational& p = prior.uniform_p();
  table.pmf_.resize(n + 1);
  for (int d = 0; d <= n; ++d) table.pmf_[d] = binomial_pmf(d, p);
  std::size_t n1 = n + 1;
  table.entries_.resize(static_cast<std::size_t>(m) * (k + 1) * n1 * n1);

  for (int a = m; a >= 1; --a) {
    for (int b = detail::beta_min(m, k, a); b <= detail::beta_max(k, a); ++b) {
      bool full = b == k;
      bool tight = b + (m - a + 1) == k;
      for (int d = b == 0 ? n : 0; d <= n; ++d) {
        // V(no) does not depend on gamma.
        Rational v_no = (!full && !tight) ? table.expected(a + 1, b, d)
                                          : Rational(0);
        for (int g = 0; g <= d; ++g) {
          TableEntry& entry = table.entries_[table.index(a, b, g, d)];
          if (full) {
            entry = {Decision::kReject, Rational(0)};
            continue;
          }
          Rational v_yes =
              Rational(g) +
              (a < m ? table.expected(a + 1, b + 1, d - g) : Rational(0));
          if (tight) {
            entry = {Decision::kAccept, std::move(v_yes)};
          } else {
            if (v_yes == v_no) table.ties_.push_back({a, b, g, d});
            if (v_yes >= v_no)
              entry = {Decision::kAccept, std::move(v_yes)};
            else
              entry = {Decision::kReject, v_no};
          }
        }
      }
    }
  }
  return table;
}

inline BellmanAudit audit_bellman(const CcTable& t) {
  BellmanAudit audit;
  const auto [m, n, k] = t.shape();
  for (int a = 1; a <= m; ++a)
    for (int b = detail::beta_min(m, k, a); b <= detail::beta_max(k, a); ++b)
      for (int d = b == 0 ? n : 0; d <= n; ++d)
        for (int g = 0; g <= d; ++g) {
          ++audit.states;
          const auto& e = t.at(a, b, g, d);
          if (b == k) {
            if (e.decision != Decision::kReject || e.value != 0)
              ++audit.mismatches;
            continue;
          }
          Rational v_yes = Rational(g) + (a < m ? t.expected(a + 1, b + 1, d - g)
                                                : Rational(0));
          if (b + (m - a + 1) == k) {
            if (e.decision != Decision::kAccept || e.value != v_yes)
              ++audit.mismatches;
            continue;
          }
          ++audit.decisions;
          Rational v_no = t.expected(a + 1, b, d);
          Rational best = v_yes >= v_no ? v_yes : v_no;
          Decision dec = v_yes >= v_no ? Decision::kAccept : Decision::kReject;
          if (e.value != best || e.decision != dec) ++audit.mismatches;
        }
  return audit;
}

namespace detail {

inline void require_shape(const ElectionShape& table,
                          const ElectionShape& election) {
  if (!(table == election))
    throw std::invalid_argument(
        "policy table built for m=" + std::to_string(table.m) +
        " n=" + std::to_string(table.n) + " k=" + std::to_string(table.k) +
        ", election has m=" + std::to_string(election.m) +
        " n=" + std::to_string(election.n) +
        " k=" + std::to_string(election.k));
}

}  // namespace detail

class MavTablePolicy : public OnlinePolicy {
 public:
  explicit MavTablePolicy(std::shared_ptr<const MavTable> table)
      : table_(std::move(table)) {}
  std::string name() const override { return "dp-mav"; }
  void start(const ElectionShape& shape) override {
    detail::require_shape(table_->shape(), shape);
  }
  Decision decide(const ReplayState& state,
                  std::span<const VoterId> approvers) override {
    return table_
        ->at(state.t, state.selected.size(), static_cast<int>(approvers.size()))
        .decision;
  }

 private:
  std::shared_ptr<const MavTable> table_;
};

class CcTablePolicy : public OnlinePolicy {
 public:
  explicit CcTablePolicy(std::shared_ptr<const CcTable> table)
      : table_(std::move(table)) {}
  std::string name() const override { return "dp-cc"; }
  void start(const ElectionShape& shape) override {
    detail::require_shape(table_->shape(), shape);
    satisfied_.assign(shape.n + 1, false);
    unsatisfied_ = shape.n;
  }
  Decision decide(const ReplayState& state,
                  std::span<const VoterId> approvers) override {
    int gamma = 0;
    for (VoterId v : approvers)
      if (!satisfied_[v]) ++gamma;
    return table_->at(state.t, state.selected.size(), gamma, unsatisfied_)
        .decision;
  }
  void commit(const ReplayState&, std::span<const VoterId> approvers,
              Decision d, bool) override {
    if (d != Decision::kAccept) return;
    for (VoterId v : approvers)
      if (!satisfied_[v]) {
        satisfied_[v] = true;
        --unsatisfied_;
      }
  }

 private:
  std::shared_ptr<const CcTable> table_;
  std::vector<bool> satisfied_;
  int unsatisfied_ = 0;
};

inline std::unique_ptr<OnlinePolicy> as_policy(
    std::shared_ptr<const MavTable> table) {
  return std::make_unique<MavTablePolicy>(std::move(table));
}
inline std::unique_ptr<OnlinePolicy> as_policy(
    std::shared_ptr<const CcTable> table) {
  return std::make_unique<CcTablePolicy>(std::move(table));
}

}  // namespace onabc
