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

// Election data model and the v1 text format.
//
// Candidates are identified by their arrival position t = 1..m and voters by
// ids 1..n. An election file looks like
//
//   # optional comments
//   3 2 1        <- m n k
//   1 2          <- voters approving the candidate arriving at t = 1
//   -            <- nobody approves t = 2
//   2
//
// serialize_election() always writes the canonical form: no comments, single
// spaces, ascending voter ids, LF line endings.

#pragma once

#include <algorithm>
#include <charconv>
#include <cstdint>
#include <initializer_list>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace onabc {

using VoterId = int;
using ApprovalSet = std::vector<VoterId>;

class ParseError : public std::runtime_error {
 public:
  ParseError(int line, const std::string& what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what),
        line_(line) {}
  int line() const { return line_; }

 private:
  int line_;
};

// Committee sizes and counts of an election, known before the first arrival.
struct ElectionShape {
  int m = 0;
  int n = 0;
  int k = 0;
  bool operator==(const ElectionShape&) const = default;
};

class Election {
 public:
  Election() = default;

  // approvals[t - 1] is N(c_t). Sets are sorted and validated here.
  Election(int n, int k, std::vector<ApprovalSet> approvals)
      : n_(n), k_(k), approvals_(std::move(approvals)) {
    if (n_ < 1) throw std::invalid_argument("election needs n >= 1");
    if (k_ < 1) throw std::invalid_argument("election needs k >= 1");
    if (k_ > m()) throw std::invalid_argument("election needs k <= m");
    for (std::size_t t = 0; t < approvals_.size(); ++t) {
      auto& set = approvals_[t];
      std::sort(set.begin(), set.end());
      if (std::adjacent_find(set.begin(), set.end()) != set.end())
        throw std::invalid_argument("duplicate voter in approval set of t=" +
                                    std::to_string(t + 1));
      if (!set.empty() && (set.front() < 1 || set.back() > n_))
        throw std::invalid_argument("voter id out of range at t=" +
                                    std::to_string(t + 1));
    }
  }

  int m() const { return static_cast<int>(approvals_.size()); }
  int n() const { return n_; }
  int k() const { return k_; }
  ElectionShape shape() const { return {m(), n_, k_}; }

  // N(c_t), 1-based arrival position.
  const ApprovalSet& approvers(int t) const { return approvals_.at(t - 1); }
  const std::vector<ApprovalSet>& approvals() const { return approvals_; }

  // A(i) for every voter, indexed by voter id (entry 0 unused).
  std::vector<std::vector<int>> ballots() const {
    std::vector<std::vector<int>> out(n_ + 1);
    for (int t = 1; t <= m(); ++t)
      for (VoterId v : approvers(t)) out[v].push_back(t);
    return out;
  }

  bool operator==(const Election&) const = default;

 private:
  int n_ = 0;
  int k_ = 0;
  std::vector<ApprovalSet> approvals_;
};

// A set of arrival positions, kept sorted.
class Committee {
 public:
  Committee() = default;
  Committee(std::initializer_list<int> members) : members_(members) {
    normalize();
  }
  explicit Committee(std::vector<int> members) : members_(std::move(members)) {
    normalize();
  }

  void insert(int t) {
    auto it = std::lower_bound(members_.begin(), members_.end(), t);
    if (it == members_.end() || *it != t) members_.insert(it, t);
  }
  bool contains(int t) const {
    return std::binary_search(members_.begin(), members_.end(), t);
  }
  int size() const { return static_cast<int>(members_.size()); }
  bool empty() const { return members_.empty(); }
  const std::vector<int>& members() const { return members_; }
  auto begin() const { return members_.begin(); }
  auto end() const { return members_.end(); }

  bool operator==(const Committee&) const = default;

 private:
  void normalize() {
    std::sort(members_.begin(), members_.end());
    members_.erase(std::unique(members_.begin(), members_.end()),
                   members_.end());
  }
  std::vector<int> members_;
};

inline std::string to_string(const Committee& w) {
  std::string out = "{";
  for (std::size_t i = 0; i < w.members().size(); ++i) {
    if (i) out += ",";
    out += std::to_string(w.members()[i]);
  }
  return out + "}";
}

// Throws std::out_of_range if a member is not an arrival position of e.
inline void check_committee(const Election& e, const Committee& w) {
  for (int t : w)
    if (t < 1 || t > e.m())
      throw std::out_of_range("committee member " + std::to_string(t) +
                              " outside [1, " + std::to_string(e.m()) + "]");
}

// |A(i) ∩ W| for every voter, indexed by voter id (entry 0 unused).
inline std::vector<int> voter_counts(const Election& e, const Committee& w) {
  check_committee(e, w);
  std::vector<int> counts(e.n() + 1, 0);
  for (int t : w)
    for (VoterId v : e.approvers(t)) ++counts[v];
  return counts;
}

namespace detail {

inline std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t') ++j;
    if (j > i) out.push_back(line.substr(i, j - i));
    i = j;
  }
  return out;
}

inline bool parse_int(std::string_view token, long long& out) {
  if (token.empty()) return false;
  auto [ptr, ec] =
      std::from_chars(token.data(), token.data() + token.size(), out);
  return ec == std::errc() && ptr == token.data() + token.size();
}

}  // namespace detail

inline Election parse_election(std::string_view text) {
  struct Line {
    int number;
    std::string_view body;
  };
  std::vector<Line> lines;
  int number = 0;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view body = text.substr(pos, end - pos);
    if (!body.empty() && body.back() == '\r') body.remove_suffix(1);
    ++number;
    pos = end + 1;
    if (!body.empty() && body.front() == '#') continue;
    lines.push_back({number, body});
  }
  if (lines.empty()) throw ParseError(1, "missing header 'm n k'");
  const Line& head = lines.front();
  auto tokens = detail::split_ws(head.body);
  long long mm = 0, nn = 0, kk = 0;
  if (tokens.size() != 3 || !detail::parse_int(tokens[0], mm) ||
      !detail::parse_int(tokens[1], nn) || !detail::parse_int(tokens[2], kk))
    throw ParseError(head.number, "malformed header, expected 'm n k'");
  if (mm < 1 || nn < 1 || kk < 1)
    throw ParseError(head.number, "m, n and k must be positive");
  if (kk > mm) throw ParseError(head.number, "k > m");
  if (mm > 100'000'000 || nn > 100'000'000)
    throw ParseError(head.number, "dimensions too large");

  std::size_t expected = static_cast<std::size_t>(mm) + 1;
  if (lines.size() != expected) {
    int at = lines.size() < expected ? number + 1 : lines[expected].number;
    throw ParseError(at, "expected " + std::to_string(mm) +
                             " approval lines, found " +
                             std::to_string(lines.size() - 1));
  }

  std::vector<ApprovalSet> approvals;
  approvals.reserve(mm);
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const Line& line = lines[i];
    auto toks = detail::split_ws(line.body);
    ApprovalSet set;
    if (toks.size() == 1 && toks[0] == "-") {
      approvals.push_back(std::move(set));
      continue;
    }
    if (toks.empty())
      throw ParseError(line.number, "empty approval line (use '-')");
    for (auto tok : toks) {
      long long v = 0;
      if (!detail::parse_int(tok, v))
        throw ParseError(line.number,
                         "invalid voter id '" + std::string(tok) + "'");
      if (v < 1 || v > nn)
        throw ParseError(line.number,
                         "voter id " + std::to_string(v) + " out of range");
      set.push_back(static_cast<VoterId>(v));
    }
    std::sort(set.begin(), set.end());
    if (std::adjacent_find(set.begin(), set.end()) != set.end())
      throw ParseError(line.number, "duplicate voter id");
    approvals.push_back(std::move(set));
  }
  return Election(static_cast<int>(nn), static_cast<int>(kk),
                  std::move(approvals));
}

inline std::string serialize_election(const Election& e) {
  std::ostringstream out;
  out << e.m() << ' ' << e.n() << ' ' << e.k() << '\n';
  for (const auto& set : e.approvals()) {
    if (set.empty()) {
      out << "-\n";
      continue;
    }
    for (std::size_t i = 0; i < set.size(); ++i) {
      if (i) out << ' ';
      out << set[i];
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace onabc
