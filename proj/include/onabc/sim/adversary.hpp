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

// Adversarial stream against (1 - eps) H(k)-EJR.
//
// With c = (1 - eps) H(k), round i = 1..floor(k / c) brings
//
//   m_i = floor(k / (i c))           candidates,
//   g_i = ceil(i c n / k)            approvers each,
//
// the groups of one round being disjoint blocks of consecutive voter ids
// (voters are reused from round to round). Every constructed candidate is
// must-accept: rejecting it and seeing only unapproved candidates afterwards
// leaves its group unrepresented. Once sum m_i > k no online rule can accept
// them all.
//
// For large k the electorate is huge (n grows like 180 k at eps = 1/4), so
// the stream is kept in structural form and only materialized on request.

#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "onabc/audit.hpp"
#include "onabc/election.hpp"
#include "onabc/rational.hpp"
#include "onabc/replay.hpp"

namespace onabc::sim {

struct AdversarySpec {
  int k = 0;
  Rational epsilon = Rational(1, 4);
  long long n = 0;  // 0 picks the smallest workable electorate
  long long m = 0;  // pad with dummies up to m; 0 pads only up to k
};

struct AdversaryRound {
  int index = 0;            // i, 1-based
  long long count = 0;      // m_i
  long long group_size = 0; // g_i
  long long first = 0;      // arrival position of the round's first candidate
};

namespace detail {

// c = (1 - eps) H(k) as an unreduced fraction num/den of big integers, which
// keeps the per-round divisions cheap even when H(k) has thousands of digits.
struct Scale {
  Integer num;
  Integer den;
};

inline Scale make_scale(int k, const Rational& epsilon) {
  if (epsilon <= 0 || epsilon >= 1)
    throw std::invalid_argument("adversary needs 0 < epsilon < 1");
  Integer hn = 0, hd = 1;  // H(k) = hn / hd, unreduced until the end
  for (int j = 1; j <= k; ++j) {
    hn = hn * j + hd;
    hd *= j;
    if (j % 64 == 0) {
      Integer g = boost::multiprecision::gcd(hn, hd);
      hn /= g;
      hd /= g;
    }
  }
  Rational keep = Rational(1) - epsilon;
  return {numerator_of(keep) * hn, denominator_of(keep) * hd};
}

// floor(k / (i c))
inline long long round_count(int k, long long i, const Scale& c) {
  Integer q = (Integer(k) * c.den) / (Integer(i) * c.num);
  return q.convert_to<long long>();
}

// ceil(i c n / k)
inline long long group_size(long long i, long long n, int k, const Scale& c) {
  Integer top = Integer(i) * c.num * n;
  Integer bottom = c.den * k;
  Integer q = top / bottom;
  if (q * bottom != top) q += 1;
  return q.convert_to<long long>();
}

// Number of rounds: floor(k / c).
inline long long round_total(int k, const Scale& c) {
  return round_count(k, 1, c);
}

}  // namespace detail

// Smallest n > 0 with (1 - eps) n / k integral.
inline long long integrality_unit(int k, const Rational& epsilon) {
  Rational per_voter = (Rational(1) - epsilon) / k;  // (1 - eps) / k
  return denominator_of(per_voter).convert_to<long long>();
}

// sum_i m_i, exactly.
inline long long must_accept_count(int k, const Rational& epsilon) {
  auto c = detail::make_scale(k, epsilon);
  long long rounds = detail::round_total(k, c), total = 0;
  for (long long i = 1; i <= rounds; ++i) total += detail::round_count(k, i, c);
  return total;
}

struct OverflowPoint {
  int k = 0;            // smallest k with sum m_i > k, 0 if none up to k_max
  long long total = 0;  // sum m_i at that k
  int exact_fallbacks = 0;
};

// Scans k = 1..k_max. Floors are taken in long double and recomputed
// exactly whenever a quotient lies within 1e-9 of an integer.
inline OverflowPoint smallest_overflow_k(const Rational& epsilon, int k_max) {
  if (epsilon <= 0 || epsilon >= 1)
    throw std::invalid_argument("adversary needs 0 < epsilon < 1");
  const long double keep = 1.0L - static_cast<long double>(to_double(epsilon));
  OverflowPoint out;
  long double h = 0;
  for (int k = 1; k <= k_max; ++k) {
    h += 1.0L / k;
    long double c = keep * h;
    bool doubtful = false;
    long long total = 0;
    for (long long i = 1;; ++i) {
      long double q = k / (i * c);
      long double fl = std::floor(q);
      if (q - fl < 1e-9L || fl + 1 - q < 1e-9L) doubtful = true;
      if (fl < 1) break;
      total += static_cast<long long>(fl);
    }
    if (doubtful) {
      ++out.exact_fallbacks;
      total = must_accept_count(k, epsilon);
    }
    if (total > k) {
      out.k = k;
      out.total = total;
      return out;
    }
  }
  return out;
}

class AdversaryStream {
 public:
  const AdversarySpec& spec() const { return spec_; }
  int k() const { return spec_.k; }
  long long n() const { return n_; }
  long long m() const { return m_; }
  const std::vector<AdversaryRound>& rounds() const { return rounds_; }
  long long must_accept_total() const { return constructed_; }
  bool overflows() const { return constructed_ > spec_.k; }

  bool must_accept(long long t) const { return t >= 1 && t <= constructed_; }

  // (round index into rounds(), position within the round) of arrival t.
  std::pair<std::size_t, long long> locate(long long t) const {
    if (!must_accept(t)) throw std::out_of_range("not a constructed arrival");
    std::size_t lo = 0, hi = rounds_.size();
    while (hi - lo > 1) {
      std::size_t mid = (lo + hi) / 2;
      if (rounds_[mid].first <= t)
        lo = mid;
      else
        hi = mid;
    }
    return {lo, t - rounds_[lo].first};
  }

  // N(c_t): the j-th group of round i is voters j g_i + 1 .. (j + 1) g_i.
  ApprovalSet approvers(long long t) const {
    if (!must_accept(t)) return {};
    auto [r, j] = locate(t);
    long long g = rounds_[r].group_size;
    ApprovalSet out;
    out.reserve(g);
    for (long long v = j * g + 1; v <= (j + 1) * g; ++v)
      out.push_back(static_cast<VoterId>(v));
    return out;
  }

  // The stream with every arrival after `last_real` (if given) replaced by
  // an unapproved dummy.
  Election materialize(std::optional<long long> last_real = std::nullopt) const {
    long long keep = last_real ? std::min(*last_real, constructed_)
                               : constructed_;
    std::vector<ApprovalSet> approvals(m_);
    for (long long t = 1; t <= keep; ++t) approvals[t - 1] = approvers(t);
    return Election(static_cast<int>(n_), spec_.k, std::move(approvals));
  }

  // Total approvals in the materialized stream (its memory footprint).
  long long approval_volume(std::optional<long long> last_real = std::nullopt) const {
    long long keep = last_real ? std::min(*last_real, constructed_)
                               : constructed_;
    long long total = 0;
    for (const auto& r : rounds_) {
      long long in = std::min(r.count, std::max(0LL, keep - r.first + 1));
      total += in * r.group_size;
    }
    return total;
  }

 private:
  friend AdversaryStream adversary_stream(const AdversarySpec&);

  AdversarySpec spec_;
  long long n_ = 0;
  long long m_ = 0;
  long long constructed_ = 0;
  std::vector<AdversaryRound> rounds_;
};

inline AdversaryStream adversary_stream(const AdversarySpec& spec) {
  if (spec.k < 1) throw std::invalid_argument("adversary needs k >= 1");
  auto c = detail::make_scale(spec.k, spec.epsilon);
  long long rounds = detail::round_total(spec.k, c);
  if (rounds < 1)
    throw std::invalid_argument("adversary has no rounds: (1-eps)H(k) > k");
  std::vector<long long> counts(rounds + 1, 0);
  for (long long i = 1; i <= rounds; ++i)
    counts[i] = detail::round_count(spec.k, i, c);

  const long long unit = integrality_unit(spec.k, spec.epsilon);
  auto fits = [&](long long n) {
    for (long long i = 1; i <= rounds; ++i)
      if (counts[i] * detail::group_size(i, n, spec.k, c) > n) return false;
    return true;
  };
  long long n = spec.n;
  if (n == 0) {
    // The rounds get harder to fit as n shrinks; search upward by unit.
    n = unit;
    while (!fits(n)) {
      n += unit;
      if (n > 2'000'000'000LL)
        throw std::invalid_argument("adversary electorate exceeds int range");
    }
  } else {
    if (n % unit != 0)
      throw std::invalid_argument(
          "adversary needs (1-eps) n / k integral; n must be a multiple of " +
          std::to_string(unit));
    if (!fits(n))
      throw std::invalid_argument(
          "adversary groups of one round do not fit disjointly in n=" +
          std::to_string(n));
  }

  AdversaryStream s;
  s.spec_ = spec;
  s.n_ = n;
  long long position = 1;
  for (long long i = 1; i <= rounds; ++i) {
    s.rounds_.push_back({static_cast<int>(i), counts[i],
                         detail::group_size(i, n, spec.k, c), position});
    position += counts[i];
  }
  s.constructed_ = position - 1;
  if (spec.m != 0 && spec.m < s.constructed_)
    throw std::invalid_argument("requested m below the constructed count " +
                                std::to_string(s.constructed_));
  s.m_ = spec.m != 0 ? std::max(spec.m, s.constructed_)
                      : std::max<long long>(s.constructed_, spec.k);
  if (s.m_ < spec.k)
    throw std::invalid_argument("adversary stream shorter than k");
  return s;
}

// Accepts exactly the listed arrivals when asked; the harness fills the rest.
class ScriptedPolicy : public OnlinePolicy {
 public:
  explicit ScriptedPolicy(std::vector<bool> accept) : accept_(std::move(accept)) {}
  std::string name() const override { return "scripted"; }
  void start(const ElectionShape&) override {}
  Decision decide(const ReplayState& state, std::span<const VoterId>) override {
    return state.t <= static_cast<int>(accept_.size()) && accept_[state.t - 1]
               ? Decision::kAccept
               : Decision::kReject;
  }

 private:
  std::vector<bool> accept_;
};

// Committee reached by a rule that accepts every must-accept arrival before
// `rejected`, rejects that one, and then sees only dummies.
inline Committee truncated_committee(const Election& truncated,
                                     long long rejected) {
  std::vector<bool> accept(truncated.m(), false);
  for (long long t = 1; t < rejected && t <= truncated.m(); ++t)
    accept[t - 1] = true;
  ScriptedPolicy policy(std::move(accept));
  return replay(truncated, policy);
}

struct StressAudit {
  std::string label;
  Rational alpha;
  std::optional<bool> pass;  // empty when the audit ran out of budget
  std::optional<Witness> witness;
};

struct StressReport {
  std::string policy;
  int k = 0;
  long long n = 0;
  long long m = 0;
  long long must_accept_total = 0;
  long long must_accept_taken = 0;
  std::optional<long long> first_rejected;  // first must-accept turned down
  std::optional<long long> full_at;         // arrival that filled the committee
  bool impossible = false;                  // sum m_i > k
  Committee committee;
  std::vector<StressAudit> audits;
};

inline StressReport stress(OnlinePolicy& policy, const AdversaryStream& s,
                           const AuditOptions& audit_options = {}) {
  Election e = s.materialize();
  ReplayTrace trace = replay_traced(e, policy);
  StressReport report;
  report.policy = policy.name();
  report.k = s.k();
  report.n = s.n();
  report.m = s.m();
  report.must_accept_total = s.must_accept_total();
  report.impossible = s.overflows();
  report.committee = trace.committee;
  int selected = 0;
  for (long long t = 1; t <= e.m(); ++t) {
    bool yes = trace.decisions[t - 1] == Decision::kAccept;
    if (yes && ++selected == s.k() && !report.full_at) report.full_at = t;
    if (!s.must_accept(t)) continue;
    if (yes)
      ++report.must_accept_taken;
    else if (!report.first_rejected)
      report.first_rejected = t;
  }
  Rational h = harmonic(s.k());
  for (auto [label, alpha] :
       {std::pair<std::string, Rational>{"ejr@H(k)", h},
        std::pair<std::string, Rational>{"ejr@(1-eps)H(k)",
                                         (Rational(1) - s.spec().epsilon) * h}}) {
    StressAudit a{label, alpha, std::nullopt, std::nullopt};
    try {
      auto r = check_ejr(e, trace.committee, alpha, audit_options);
      a.pass = r.pass;
      a.witness = r.witness;
    } catch (const BudgetExceeded&) {
    }
    report.audits.push_back(std::move(a));
  }
  return report;
}

}  // namespace onabc::sim
