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

// Online replay of an arrival stream. Every rule in the library is an
// OnlinePolicy; the replay harness owns the full/tight overrides so that
// every run selects exactly k candidates.

#pragma once

#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "onabc/election.hpp"

namespace onabc {

enum class Decision { kReject, kAccept };

inline const char* to_string(Decision d) {
  return d == Decision::kAccept ? "yes" : "no";
}

struct ReplayState {
  int t = 1;  // arrival index of the current candidate
  ElectionShape shape;
  Committee selected;
  int decided = 0;

  int remaining() const { return shape.m - t + 1; }  // includes c_t
  bool full() const { return selected.size() == shape.k; }
  bool tight() const { return selected.size() + remaining() == shape.k; }
};

// A policy sees the shape up front, then one approval set per arrival.
// decide() is only called in states that are neither full nor tight;
// commit() is called for every arrival with the final decision.
class OnlinePolicy {
 public:
  virtual ~OnlinePolicy() = default;
  virtual std::string name() const = 0;
  virtual void start(const ElectionShape& shape) = 0;
  virtual Decision decide(const ReplayState& state,
                          std::span<const VoterId> approvers) = 0;
  virtual void commit(const ReplayState& /*state*/,
                      std::span<const VoterId> /*approvers*/,
                      Decision /*final_decision*/, bool /*forced*/) {}
};

struct ReplayTrace {
  Committee committee;
  std::vector<Decision> decisions;  // one per arrival
  std::vector<bool> consulted;      // false where an override applied
};

inline ReplayTrace replay_traced(const Election& e, OnlinePolicy& policy) {
  if (e.m() < e.k())
    throw std::invalid_argument("replay needs m >= k (no safe policy)");
  ReplayTrace trace;
  trace.decisions.reserve(e.m());
  trace.consulted.reserve(e.m());
  ReplayState state;
  state.shape = e.shape();
  policy.start(state.shape);
  for (int t = 1; t <= e.m(); ++t) {
    state.t = t;
    state.decided = t - 1;
    std::span<const VoterId> approvers(e.approvers(t));
    Decision d;
    bool forced = true;
    if (state.full()) {
      d = Decision::kReject;
    } else if (state.tight()) {
      d = Decision::kAccept;
    } else {
      d = policy.decide(state, approvers);
      forced = false;
    }
    policy.commit(state, approvers, d, forced);
    trace.decisions.push_back(d);
    trace.consulted.push_back(!forced);
    if (d == Decision::kAccept) state.selected.insert(t);
  }
  if (state.selected.size() != e.k())
    throw std::logic_error("replay selected " +
                           std::to_string(state.selected.size()) +
                           " candidates, expected " + std::to_string(e.k()));
  trace.committee = state.selected;
  return trace;
}

inline Committee replay(const Election& e, OnlinePolicy& policy) {
  return replay_traced(e, policy).committee;
}

// Accepts every candidate it is asked about; the first k arrivals win.
class AcceptAllPolicy : public OnlinePolicy {
 public:
  std::string name() const override { return "first-k"; }
  void start(const ElectionShape&) override {}
  Decision decide(const ReplayState&, std::span<const VoterId>) override {
    return Decision::kAccept;
  }
};

// Rejects everything it is asked about; the last k arrivals win.
class RejectAllPolicy : public OnlinePolicy {
 public:
  std::string name() const override { return "last-k"; }
  void start(const ElectionShape&) override {}
  Decision decide(const ReplayState&, std::span<const VoterId>) override {
    return Decision::kReject;
  }
};

}  // namespace onabc
