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

// Exact JR / alpha-PJR / alpha-EJR audits.
//
// A group S violates alpha-EJR for l when |S| >= alpha l n / k, its members
// share l approved candidates T, and each approves fewer than l members of
// W. For fixed T and l the largest such S is
//
//   { i : T ⊆ A(i), |A(i) ∩ W| < l },
//
// so it suffices to enumerate l-sets T. For alpha-PJR the condition is
// |∪_{i∈S} A(i) ∩ W| < l, which holds iff every member's W-approvals fit in
// one (l-1)-subset Y of W; the maximal group for (T, Y) is
//
//   { i : T ⊆ A(i), A(i) ∩ W ⊆ Y }.
//
// T is built depth-first in increasing candidate order while the running
// group is intersected with each new N(c); branches whose group falls under
// the size threshold are cut. The first witness reported has the smallest l
// and, within it, the lexicographically smallest T.

#pragma once

#include <algorithm>
#include <cstdint>
#include <iterator>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "onabc/election.hpp"
#include "onabc/rational.hpp"
#include "onabc/thiele.hpp"

namespace onabc {

enum class Axiom { kJr, kPjr, kEjr };

inline const char* to_string(Axiom a) {
  switch (a) {
    case Axiom::kJr:
      return "jr";
    case Axiom::kPjr:
      return "pjr";
    case Axiom::kEjr:
      return "ejr";
  }
  return "?";
}

inline Axiom parse_axiom(const std::string& text) {
  if (text == "jr") return Axiom::kJr;
  if (text == "pjr") return Axiom::kPjr;
  if (text == "ejr") return Axiom::kEjr;
  throw std::invalid_argument("unknown axiom '" + text + "'");
}

struct Witness {
  int ell = 0;
  std::vector<int> candidates;  // T, |T| = ell
  std::vector<VoterId> group;   // S, the maximal violating group for T
  std::vector<int> covered;     // PJR only: Y ⊆ W with A(i) ∩ W ⊆ Y on S
};

struct AuditReport {
  Axiom axiom = Axiom::kEjr;
  Rational alpha = 1;
  bool pass = true;
  std::optional<Witness> witness;
  std::uint64_t nodes = 0;  // search nodes visited
};

inline constexpr std::uint64_t kDefaultAuditBudget = 50'000'000;

struct AuditOptions {
  std::uint64_t node_budget = kDefaultAuditBudget;
  int max_ell = 0;  // 0 = up to k
};

namespace detail {

class TSearch {
 public:
  TSearch(const Election& e, std::uint64_t budget, std::uint64_t& nodes)
      : e_(e), budget_(budget), nodes_(nodes) {}

  // Lexicographically first l-set T whose common approvers inside `pool`
  // number at least `need`; `pool` is sorted.
  std::optional<std::pair<std::vector<int>, std::vector<VoterId>>> first(
      int ell, long long need, const std::vector<VoterId>& pool) {
    ell_ = ell;
    need_ = need;
    chosen_.clear();
    found_.reset();
    if (static_cast<long long>(pool.size()) >= need) dfs(1, pool);
    return found_;
  }

 private:
  bool dfs(int from, const std::vector<VoterId>& group) {
    if (static_cast<int>(chosen_.size()) == ell_) {
      found_ = std::make_pair(chosen_, group);
      return true;
    }
    int last = e_.m() - (ell_ - static_cast<int>(chosen_.size())) + 1;
    std::vector<VoterId> next;
    for (int c = from; c <= last; ++c) {
      if (++nodes_ > budget_)
        throw BudgetExceeded("audit search exceeded " +
                             std::to_string(budget_) + " nodes");
      const auto& approvers = e_.approvers(c);
      if (static_cast<long long>(approvers.size()) < need_) continue;
      next.clear();
      std::set_intersection(group.begin(), group.end(), approvers.begin(),
                            approvers.end(), std::back_inserter(next));
      if (static_cast<long long>(next.size()) < need_) continue;
      chosen_.push_back(c);
      if (dfs(c + 1, next)) return true;
      chosen_.pop_back();
    }
    return false;
  }

  const Election& e_;
  std::uint64_t budget_;
  std::uint64_t& nodes_;
  int ell_ = 0;
  long long need_ = 0;
  std::vector<int> chosen_;
  std::optional<std::pair<std::vector<int>, std::vector<VoterId>>> found_;
};

// ceil(alpha l n / k), or -1 when it exceeds n (no group can reach it).
inline long long group_threshold(const Rational& alpha, int ell, int n, int k) {
  Integer need = ceil_of(alpha * ell * n / k);
  if (need > n) return -1;
  return std::max<long long>(1, need.convert_to<long long>());
}

// Largest approval count of any candidate; no group can be wider.
inline long long widest_support(const Election& e) {
  std::size_t widest = 0;
  for (int c = 1; c <= e.m(); ++c)
    widest = std::max(widest, e.approvers(c).size());
  return static_cast<long long>(widest);
}

inline void check_alpha(const Rational& alpha) {
  if (alpha <= 0) throw std::invalid_argument("audit needs alpha > 0");
}

inline int ell_limit(const Election& e, const AuditOptions& options) {
  return options.max_ell > 0 ? std::min(options.max_ell, e.k()) : e.k();
}

}  // namespace detail

inline AuditReport check_ejr(const Election& e, const Committee& w,
                             const Rational& alpha,
                             const AuditOptions& options = {}) {
  detail::check_alpha(alpha);
  AuditReport report{Axiom::kEjr, alpha, true, std::nullopt, 0};
  auto counts = voter_counts(e, w);
  detail::TSearch search(e, options.node_budget, report.nodes);
  const long long widest = detail::widest_support(e);
  for (int ell = 1; ell <= detail::ell_limit(e, options); ++ell) {
    long long need = detail::group_threshold(alpha, ell, e.n(), e.k());
    if (need < 0 || need > widest) break;  // thresholds grow with l
    std::vector<VoterId> pool;
    for (int v = 1; v <= e.n(); ++v)
      if (counts[v] < ell) pool.push_back(v);
    if (auto hit = search.first(ell, need, pool)) {
      report.pass = false;
      report.witness = Witness{ell, hit->first, hit->second, {}};
      return report;
    }
  }
  return report;
}

inline AuditReport check_jr(const Election& e, const Committee& w,
                            const AuditOptions& options = {}) {
  AuditOptions jr = options;
  jr.max_ell = 1;
  AuditReport report = check_ejr(e, w, Rational(1), jr);
  report.axiom = Axiom::kJr;
  return report;
}

inline AuditReport check_pjr(const Election& e, const Committee& w,
                             const Rational& alpha,
                             const AuditOptions& options = {}) {
  detail::check_alpha(alpha);
  check_committee(e, w);
  if (w.size() > 64)
    throw std::invalid_argument("PJR audit supports committees of <= 64");
  AuditReport report{Axiom::kPjr, alpha, true, std::nullopt, 0};
  // Bit j of masks[v] is set when voter v approves the j-th member of W.
  std::vector<std::uint64_t> masks(e.n() + 1, 0);
  for (int j = 0; j < w.size(); ++j)
    for (VoterId v : e.approvers(w.members()[j])) masks[v] |= 1ULL << j;
  const int size = w.size();
  detail::TSearch search(e, options.node_budget, report.nodes);
  const long long widest = detail::widest_support(e);

  for (int ell = 1; ell <= detail::ell_limit(e, options); ++ell) {
    long long need = detail::group_threshold(alpha, ell, e.n(), e.k());
    if (need < 0 || need > widest) break;
    int r = std::min(ell - 1, size);
    std::optional<Witness> best;
    // Enumerate r-subsets Y of W as bitmasks in increasing order.
    std::vector<int> pick(r);
    std::iota(pick.begin(), pick.end(), 0);
    while (true) {
      if (++report.nodes > options.node_budget)
        throw BudgetExceeded("audit search exceeded " +
                             std::to_string(options.node_budget) + " nodes");
      std::uint64_t y = 0;
      for (int j : pick) y |= 1ULL << j;
      std::vector<VoterId> pool;
      for (int v = 1; v <= e.n(); ++v)
        if ((masks[v] & ~y) == 0) pool.push_back(v);
      if (auto hit = search.first(ell, need, pool)) {
        if (!best || hit->first < best->candidates) {
          std::vector<int> covered;
          for (int j : pick) covered.push_back(w.members()[j]);
          best = Witness{ell, hit->first, hit->second, covered};
        }
      }
      int i = r - 1;
      while (i >= 0 && pick[i] == size - r + i) --i;
      if (i < 0) break;
      ++pick[i];
      for (int j = i + 1; j < r; ++j) pick[j] = pick[j - 1] + 1;
    }
    if (best) {
      report.pass = false;
      report.witness = std::move(best);
      return report;
    }
  }
  return report;
}

inline AuditReport check_axiom(const Election& e, const Committee& w,
                               Axiom axiom, const Rational& alpha,
                               const AuditOptions& options = {}) {
  switch (axiom) {
    case Axiom::kJr:
      return check_jr(e, w, options);
    case Axiom::kPjr:
      return check_pjr(e, w, alpha, options);
    case Axiom::kEjr:
      return check_ejr(e, w, alpha, options);
  }
  throw std::logic_error("unreachable");
}

// Re-evaluates a failing report against the definitions directly.
inline bool verify_witness(const Election& e, const Committee& w,
                           const AuditReport& report) {
  if (report.pass || !report.witness) return false;
  const Witness& x = *report.witness;
  const Rational alpha = report.axiom == Axiom::kJr ? Rational(1) : report.alpha;
  if (x.ell < 1 || x.ell > e.k()) return false;
  if (static_cast<int>(x.candidates.size()) != x.ell) return false;
  if (Rational(static_cast<long long>(x.group.size())) <
      alpha * x.ell * e.n() / e.k())
    return false;
  auto ballots = e.ballots();
  std::vector<VoterId> group = x.group;
  std::sort(group.begin(), group.end());
  if (std::adjacent_find(group.begin(), group.end()) != group.end())
    return false;
  for (VoterId v : group) {
    if (v < 1 || v > e.n()) return false;
    for (int c : x.candidates)
      if (!std::binary_search(ballots[v].begin(), ballots[v].end(), c))
        return false;
  }
  if (report.axiom == Axiom::kPjr) {
    std::vector<int> uni;
    for (VoterId v : group)
      for (int c : ballots[v])
        if (w.contains(c)) uni.push_back(c);
    std::sort(uni.begin(), uni.end());
    uni.erase(std::unique(uni.begin(), uni.end()), uni.end());
    return static_cast<int>(uni.size()) < x.ell;
  }
  for (VoterId v : group) {
    int have = 0;
    for (int c : ballots[v])
      if (w.contains(c)) ++have;
    if (have >= x.ell) return false;
  }
  return true;
}

}  // namespace onabc
