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

// Monte Carlo evaluation of online policies on elections sampled from an
// approval prior.
//
// Trial t of a GenSpec is always the same election: voter v approves the
// candidate arriving at position c iff counter_hash(seed, t, c, v) falls
// below the Bernoulli cut of v's cluster. Per-trial results are stored by
// index and reduced in trial order, so summaries do not depend on the
// number of worker threads.

#pragma once

#include <cmath>
#include <cstdint>
#include <exception>
#include <functional>
#include <memory>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "onabc/audit.hpp"
#include "onabc/dp/prior.hpp"
#include "onabc/election.hpp"
#include "onabc/rational.hpp"
#include "onabc/replay.hpp"
#include "onabc/sim/rng.hpp"
#include "onabc/thiele.hpp"

namespace onabc::sim {

struct GenSpec {
  int m = 0;
  int n = 0;
  int k = 0;
  ApprovalPrior prior = ApprovalPrior::uniform(Rational(1, 2));
  std::uint64_t seed = 0;
  int trials = 1;
};

inline void validate(const GenSpec& g) {
  if (g.trials < 1) throw std::invalid_argument("need trials >= 1");
  if (g.n < 1 || g.k < 1 || g.m < g.k)
    throw std::invalid_argument("need n >= 1 and 1 <= k <= m");
  g.prior.cluster_sizes(g.n);
}

inline Election sample_election(const GenSpec& g, int trial = 0) {
  validate(g);
  std::vector<BernoulliThreshold> cuts;
  for (const auto& p : g.prior.cluster_probabilities()) cuts.emplace_back(p);
  std::vector<int> cluster(g.n + 1, 0);
  {
    auto sizes = g.prior.cluster_sizes(g.n);
    int v = 1;
    for (std::size_t q = 0; q < sizes.size(); ++q)
      for (int j = 0; j < sizes[q]; ++j) cluster[v++] = static_cast<int>(q);
  }
  std::vector<ApprovalSet> approvals(g.m);
  for (int c = 1; c <= g.m; ++c)
    for (int v = 1; v <= g.n; ++v)
      if (cuts[cluster[v]](counter_hash(
              g.seed, {static_cast<std::uint64_t>(trial),
                       static_cast<std::uint64_t>(c),
                       static_cast<std::uint64_t>(v)})))
        approvals[c - 1].push_back(v);
  return Election(g.n, g.k, std::move(approvals));
}

using PolicyFactory = std::function<std::unique_ptr<OnlinePolicy>()>;

struct NamedPolicy {
  std::string name;
  PolicyFactory make;
};

struct AuditRequest {
  Axiom axiom = Axiom::kEjr;
  Rational alpha = 1;

  std::string label() const {
    std::string s = to_string(axiom);
    if (axiom != Axiom::kJr && alpha != 1) s += "@" + onabc::to_string(alpha);
    return s;
  }
};

struct EvalOptions {
  std::vector<AuditRequest> audits;
  bool ratios = true;  // needs the offline optimum per trial
  int threads = 1;
  std::uint64_t optimum_budget = kDefaultEnumerationBudget;
  AuditOptions audit;
};

// Mean and sample standard error of a sequence, accumulated in order.
class RunningStats {
 public:
  void add(double x) {
    ++count_;
    double delta = x - mean_;
    mean_ += delta / count_;
    m2_ += delta * (x - mean_);
  }
  long long count() const { return count_; }
  double mean() const { return mean_; }
  double stddev() const {
    return count_ > 1 ? std::sqrt(m2_ / (count_ - 1)) : 0.0;
  }
  double stderr_of_mean() const {
    return count_ > 0 ? stddev() / std::sqrt(static_cast<double>(count_)) : 0.0;
  }

 private:
  long long count_ = 0;
  double mean_ = 0;
  double m2_ = 0;
};

struct AuditRate {
  std::string label;
  double pass_rate = 0;
  long long passed = 0;
  long long checked = 0;
};

struct PolicySummary {
  std::string policy;
  long long trials = 0;
  double mean = 0;
  double stderr_mean = 0;
  double ratio_mean = 0;
  double ratio_stderr = 0;
  bool has_ratio = false;
  std::vector<AuditRate> audits;
};

struct SimSummary {
  GenSpec spec;
  std::string function;
  double optimum_mean = 0;
  std::vector<PolicySummary> policies;
};

// Score ratio against the optimum; an election where every committee scores
// 0 counts as ratio 1.
inline double score_ratio(const Rational& score, const Rational& optimum) {
  if (optimum == 0) return 1.0;
  return to_double(score / optimum);
}

// Runs body(i) for i in [0, count) on up to `threads` workers. The first
// exception thrown by any worker is rethrown here.
inline void parallel_for(int count, int threads,
                         const std::function<void(int)>& body) {
  threads = std::max(1, std::min(threads, count));
  if (threads == 1) {
    for (int i = 0; i < count; ++i) body(i);
    return;
  }
  std::vector<std::exception_ptr> errors(threads);
  std::vector<std::thread> pool;
  for (int w = 0; w < threads; ++w)
    pool.emplace_back([&, w] {
      try {
        for (int i = w; i < count; i += threads) body(i);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  for (auto& th : pool) th.join();
  for (auto& err : errors)
    if (err) std::rethrow_exception(err);
}

inline SimSummary evaluate(const GenSpec& g,
                           const std::vector<NamedPolicy>& policies,
                           const ThieleFunction& f,
                           const EvalOptions& options = {}) {
  validate(g);
  struct Trial {
    Rational optimum;
    std::vector<Rational> scores;
    std::vector<std::vector<char>> passed;  // [policy][audit]
  };
  std::vector<Trial> results(g.trials);
  parallel_for(g.trials, options.threads, [&](int t) {
    Election e = sample_election(g, t);
    Trial& out = results[t];
    if (options.ratios)
      out.optimum = offline_optimum(e, f, options.optimum_budget).score;
    for (const auto& p : policies) {
      auto policy = p.make();
      Committee w = replay(e, *policy);
      out.scores.push_back(score(e, w, f));
      std::vector<char> verdicts;
      for (const auto& a : options.audits)
        verdicts.push_back(
            check_axiom(e, w, a.axiom, a.alpha, options.audit).pass);
      out.passed.push_back(std::move(verdicts));
    }
  });

  SimSummary summary;
  summary.spec = g;
  summary.function = f.spec();
  RunningStats optimum;
  for (const auto& r : results) optimum.add(to_double(r.optimum));
  summary.optimum_mean = options.ratios ? optimum.mean() : 0.0;
  for (std::size_t p = 0; p < policies.size(); ++p) {
    RunningStats scores, ratios;
    std::vector<long long> passes(options.audits.size(), 0);
    for (const auto& r : results) {
      scores.add(to_double(r.scores[p]));
      if (options.ratios) ratios.add(score_ratio(r.scores[p], r.optimum));
      for (std::size_t a = 0; a < options.audits.size(); ++a)
        passes[a] += r.passed[p][a];
    }
    PolicySummary s;
    s.policy = policies[p].name;
    s.trials = g.trials;
    s.mean = scores.mean();
    s.stderr_mean = scores.stderr_of_mean();
    s.has_ratio = options.ratios;
    s.ratio_mean = ratios.mean();
    s.ratio_stderr = ratios.stderr_of_mean();
    for (std::size_t a = 0; a < options.audits.size(); ++a)
      s.audits.push_back({options.audits[a].label(),
                          static_cast<double>(passes[a]) / g.trials, passes[a],
                          g.trials});
    summary.policies.push_back(std::move(s));
  }
  return summary;
}

}  // namespace onabc::sim
