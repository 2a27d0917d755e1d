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

// Counter-based randomness. Every draw is a pure function of (seed, stream
// coordinates), built from the SplitMix64 finalizer, so elections can be
// generated in any order or in parallel and still come out identical.

#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>
#include <stdexcept>
#include <vector>

#include "onabc/rational.hpp"

namespace onabc::sim {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Hash of a seed and any number of coordinates.
inline std::uint64_t counter_hash(std::uint64_t seed,
                                  std::initializer_list<std::uint64_t> keys) {
  std::uint64_t h = splitmix64(seed);
  for (std::uint64_t key : keys) h = splitmix64(h ^ splitmix64(key));
  return h;
}

// Exact Bernoulli(p) test on a uniform 64-bit word u: success iff
// u < floor(p 2^64), with p = 1 always succeeding.
class BernoulliThreshold {
 public:
  explicit BernoulliThreshold(const Rational& p) {
    if (p < 0 || p > 1)
      throw std::invalid_argument("probability outside [0,1]");
    always_ = p == 1;
    if (!always_) {
      Integer scaled = floor_of(p * (Integer(1) << 64));
      cut_ = scaled.convert_to<std::uint64_t>();
    }
  }
  bool operator()(std::uint64_t u) const { return always_ || u < cut_; }

 private:
  bool always_ = false;
  std::uint64_t cut_ = 0;
};

// Sequential draws from one coordinate tuple.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0)
      : key_(counter_hash(seed, {a, b})) {}

  std::uint64_t next() { return splitmix64(key_ + counter_++); }

  // Uniform in [0, bound), rejection sampling without modulo bias.
  std::uint64_t below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("empty range");
    std::uint64_t limit =
        std::numeric_limits<std::uint64_t>::max() -
        std::numeric_limits<std::uint64_t>::max() % bound;
    while (true) {
      std::uint64_t u = next();
      if (u < limit) return u % bound;
    }
  }

  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

// Fisher-Yates permutation of 0..size-1.
inline std::vector<int> permutation(Stream& rng, int size) {
  std::vector<int> out(size);
  for (int i = 0; i < size; ++i) out[i] = i;
  for (int i = size - 1; i > 0; --i) {
    int j = static_cast<int>(rng.below(static_cast<std::uint64_t>(i) + 1));
    std::swap(out[i], out[j]);
  }
  return out;
}

}  // namespace onabc::sim
