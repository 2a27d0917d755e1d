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

// Exact rational arithmetic shared by every module. All scores, budgets,
// probabilities and table values are exact; doubles only appear in reports.

#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <cctype>
#include <stdexcept>
#include <string>
#include <string_view>

namespace onabc {

using Rational = boost::multiprecision::mpq_rational;
using Integer = boost::multiprecision::mpz_int;

inline Integer numerator_of(const Rational& r) {
  return boost::multiprecision::numerator(r);
}
inline Integer denominator_of(const Rational& r) {
  return boost::multiprecision::denominator(r);
}

// Parses "p", "p/q", or a decimal literal such as "0.25" or "-1.5" into an
// exact rational. Decimals never go through binary floating point.
inline Rational parse_rational(std::string_view text) {
  auto fail = [&]() -> Rational {
    throw std::invalid_argument("invalid rational literal '" +
                                std::string(text) + "'");
  };
  if (text.empty()) return fail();
  bool negative = false;
  std::size_t pos = 0;
  if (text[0] == '-' || text[0] == '+') {
    negative = text[0] == '-';
    pos = 1;
  }
  auto digits = [&](std::string_view s) {
    if (s.empty()) return false;
    for (char ch : s) {
      if (!std::isdigit(static_cast<unsigned char>(ch))) return false;
    }
    return true;
  };
  std::string_view body = text.substr(pos);
  Rational value;
  if (auto slash = body.find('/'); slash != std::string_view::npos) {
    std::string_view num = body.substr(0, slash);
    std::string_view den = body.substr(slash + 1);
    if (!digits(num) || !digits(den)) return fail();
    Integer d{std::string(den)};
    if (d == 0) throw std::invalid_argument("zero denominator in '" +
                                            std::string(text) + "'");
    value = Rational(Integer(std::string(num)), d);
  } else if (auto dot = body.find('.'); dot != std::string_view::npos) {
    std::string_view whole = body.substr(0, dot);
    std::string_view frac = body.substr(dot + 1);
    if ((whole.empty() && frac.empty()) ||
        (!whole.empty() && !digits(whole)) || (!frac.empty() && !digits(frac)))
      return fail();
    Integer scale = 1;
    for (std::size_t i = 0; i < frac.size(); ++i) scale *= 10;
    Integer w = whole.empty() ? Integer(0) : Integer(std::string(whole));
    Integer f = frac.empty() ? Integer(0) : Integer(std::string(frac));
    value = Rational(w * scale + f, scale);
  } else {
    if (!digits(body)) return fail();
    value = Rational(Integer(std::string(body)));
  }
  return negative ? Rational(-value) : value;
}

// "p/q" always, including integers ("3/1", "0/1"). Used by table dumps.
inline std::string format_fraction(const Rational& r) {
  return numerator_of(r).str() + "/" + denominator_of(r).str();
}

// "p/q", or "p" when the denominator is one.
inline std::string to_string(const Rational& r) { return r.str(); }

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

// Smallest integer >= r.
inline Integer ceil_of(const Rational& r) {
  Integer num = numerator_of(r);
  Integer den = denominator_of(r);
  Integer q = num / den;  // truncates toward zero
  if (q * den != num && num > 0) q += 1;
  return q;
}

// Largest integer <= r.
inline Integer floor_of(const Rational& r) {
  Integer num = numerator_of(r);
  Integer den = denominator_of(r);
  Integer q = num / den;
  if (q * den != num && num < 0) q -= 1;
  return q;
}

// r^e by repeated squaring.
inline Rational power(Rational base, unsigned e) {
  Rational out = 1;
  while (e) {
    if (e & 1) out *= base;
    base *= base;
    e >>= 1;
  }
  return out;
}

// H(i) = 1 + 1/2 + ... + 1/i, with H(0) = 0.
inline Rational harmonic(int i) {
  if (i < 0) throw std::invalid_argument("harmonic: negative index");
  Rational h = 0;
  for (int j = 1; j <= i; ++j) h += Rational(1, j);
  return h;
}

}  // namespace onabc
