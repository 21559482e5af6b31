#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace galelab {

using Rational = mpq_class;
using BigInt = mpz_class;

// Accepts "p/q", integers, and finite decimals ("0.3" -> 3/10). Result is canonical.
Rational parse_rational(std::string_view text);

// Always "num/den", e.g. "1/1", "3/8".
std::string format_rational(const Rational& value);

// log2 of a positive integer, accurate to about 1e-16 relative to the mantissa.
long double log2_of(const BigInt& value);

// log2 of a non-negative rational; -infinity at zero.
long double log2_of(const Rational& value);

// Only meaningful for values within long double range.
long double to_long_double(const Rational& value);

Rational pow2(long exponent);

}  // namespace galelab
