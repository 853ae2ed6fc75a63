// SPDX-License-Identifier: Apache-2.0
// Copyright (c) lyra contributors.

#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace lyra {

/// Exact arbitrary-precision rational. Always kept canonical (reduced, positive denominator).
using Rational = mpq_class;

inline bool is_zero(const Rational& r) { return sgn(r) == 0; }

/// Parses "3", "-3", "3/4", "0.9999", "4.603e-5" into an exact rational.
/// Throws std::invalid_argument on malformed input.
Rational parse_rational(std::string_view text);

/// "p" for integers, "p/q" otherwise.
std::string to_string(const Rational& r);

/// Exact binary value of a finite double.
Rational from_double(double v);

/// Nearest multiple of 1/denominator, reduced.
Rational round_to_denominator(double v, std::int64_t denominator);

/// Smallest multiple of 10^-digits that is >= sqrt(r), for r >= 0.
Rational sqrt_upper(const Rational& r, int digits = 6);

/// base^exp for a non-negative exponent.
Rational pow(const Rational& base, unsigned exp);

double to_double(const Rational& r);

}  // namespace lyra
