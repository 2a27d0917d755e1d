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

// Policies by name. DP policies build their table on first use for the
// election shape they are started on and share it across instances made by
// the same factory.

#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include "onabc/dp/prior.hpp"
#include "onabc/dp/tables.hpp"
#include "onabc/dp/thiele_table.hpp"
#include "onabc/proportional.hpp"
#include "onabc/replay.hpp"
#include "onabc/secretary.hpp"
#include "onabc/thiele.hpp"

namespace onabc {

class UnknownPolicy : public std::invalid_argument {
 public:
  explicit UnknownPolicy(const std::string& name)
      : std::invalid_argument("unknown policy '" + name + "'") {}
};

inline const std::vector<std::string>& policy_names() {
  static const std::vector<std::string> names = {
      "dp-mav", "dp-cc",  "dp-thiele", "secretary", "greedy-budget",
      "ogca",   "sgbr",   "first-k",   "last-k"};
  return names;
}

struct PolicyConfig {
  ThieleFunction f = ThieleFunction::mav();  // secretary and dp-thiele
  std::optional<ApprovalPrior> prior;        // dp-*
  ThieleTableOptions thiele;
};

using PolicyFactory = std::function<std::unique_ptr<OnlinePolicy>()>;

namespace detail {

template <typename Table>
class TableCache {
 public:
  using Builder = std::function<Table(const ElectionShape&)>;
  explicit TableCache(Builder build) : build_(std::move(build)) {}

  std::shared_ptr<const Table> get(const ElectionShape& shape) {
    std::lock_guard<std::mutex> lock(mutex_);
    auto key = std::make_tuple(shape.m, shape.n, shape.k);
    auto it = tables_.find(key);
    if (it != tables_.end()) return it->second;
    auto table = std::make_shared<const Table>(build_(shape));
    tables_.emplace(key, table);
    return table;
  }

 private:
  Builder build_;
  std::mutex mutex_;
  std::map<std::tuple<int, int, int>, std::shared_ptr<const Table>> tables_;
};

template <typename Table>
class LazyTablePolicy : public OnlinePolicy {
 public:
  LazyTablePolicy(std::string name, std::shared_ptr<TableCache<Table>> cache)
      : name_(std::move(name)), cache_(std::move(cache)) {}

  std::string name() const override { return name_; }
  void start(const ElectionShape& shape) override {
    inner_ = as_policy(cache_->get(shape));
    inner_->start(shape);
  }
  Decision decide(const ReplayState& state,
                  std::span<const VoterId> approvers) override {
    return inner_->decide(state, approvers);
  }
  void commit(const ReplayState& state, std::span<const VoterId> approvers,
              Decision d, bool forced) override {
    inner_->commit(state, approvers, d, forced);
  }

 private:
  std::string name_;
  std::shared_ptr<TableCache<Table>> cache_;
  std::unique_ptr<OnlinePolicy> inner_;
};

template <typename Table>
PolicyFactory lazy_factory(const std::string& name,
                           typename TableCache<Table>::Builder build) {
  auto cache = std::make_shared<TableCache<Table>>(std::move(build));
  return [name, cache] {
    return std::make_unique<LazyTablePolicy<Table>>(name, cache);
  };
}

}  // namespace detail

inline PolicyFactory make_policy_factory(const std::string& name,
                                         const PolicyConfig& config = {}) {
  auto need_prior = [&]() -> const ApprovalPrior& {
    if (!config.prior)
      throw std::invalid_argument("policy " + name +
                                  " needs an approval prior");
    return *config.prior;
  };
  if (name == "dp-mav") {
    ApprovalPrior prior = need_prior();
    return detail::lazy_factory<MavTable>(name, [prior](const ElectionShape& s) {
      return build_mav_table(s.m, s.n, s.k, prior);
    });
  }
  if (name == "dp-cc") {
    ApprovalPrior prior = need_prior();
    if (!prior.is_uniform())
      throw std::invalid_argument("dp-cc supports the uniform prior only");
    return detail::lazy_factory<CcTable>(name, [prior](const ElectionShape& s) {
      return build_cc_table(s.m, s.n, s.k, prior);
    });
  }
  if (name == "dp-thiele") {
    ApprovalPrior prior = need_prior();
    ThieleFunction f = config.f;
    ThieleTableOptions options = config.thiele;
    return detail::lazy_factory<ThieleTable>(
        name, [prior, f, options](const ElectionShape& s) {
          return build_thiele_table(s.m, s.n, s.k, f, prior, options);
        });
  }
  if (name == "secretary") {
    ThieleFunction f = config.f;
    return [f] { return std::make_unique<SecretaryPolicy>(f); };
  }
  if (name == "greedy-budget")
    return [] { return std::make_unique<GreedyBudgetingPolicy>(); };
  if (name == "ogca") return [] { return std::make_unique<OgcaPolicy>(); };
  if (name == "sgbr") return [] { return std::make_unique<SgbrPolicy>(); };
  if (name == "first-k")
    return [] { return std::make_unique<AcceptAllPolicy>(); };
  if (name == "last-k")
    return [] { return std::make_unique<RejectAllPolicy>(); };
  throw UnknownPolicy(name);
}

inline std::unique_ptr<OnlinePolicy> make_policy(
    const std::string& name, const PolicyConfig& config = {}) {
  return make_policy_factory(name, config)();
}

}  // namespace onabc
