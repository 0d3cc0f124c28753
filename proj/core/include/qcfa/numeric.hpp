#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace qcfa {

using Integer = mpz_class;
using Rational = mpq_class;

// 2^e for any signed exponent.
Rational pow2(long e);
Integer ipow(const Integer& base, unsigned long e);

// Largest r <= x (resp. smallest r >= x) with at most `bits` significant bits.
Rational roundDown(const Rational& x, unsigned bits);
Rational roundUp(const Rational& x, unsigned bits);

enum class Rounding { Down, Up, Nearest };

// Decimal rendering with `digits` significant digits. Values that have a short
// exact decimal expansion are printed exactly regardless of direction.
std::string toDecimal(const Rational& x, int digits, Rounding dir);

// Accepts "0.125", "1/8", "1e-3", "3".
Rational parseRational(std::string_view text);

std::string toString(const Integer& z);

}  // namespace qcfa
