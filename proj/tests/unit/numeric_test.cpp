#include <cmath>

#include <gtest/gtest.h>

#include "qcfa/error.hpp"
#include "qcfa/interval.hpp"
#include "qcfa/numeric.hpp"

using namespace qcfa;

TEST(Numeric, Pow2HandlesBothSigns) {
  EXPECT_EQ(pow2(10), Rational(1024));
  EXPECT_EQ(pow2(-3), Rational(1, 8));
  EXPECT_EQ(pow2(0), Rational(1));
}

TEST(Numeric, ParseRationalForms) {
  EXPECT_EQ(parseRational("0.125"), Rational(1, 8));
  EXPECT_EQ(parseRational("1/8"), Rational(1, 8));
  EXPECT_EQ(parseRational("1e-3"), Rational(1, 1000));
  EXPECT_EQ(parseRational("3"), Rational(3));
  EXPECT_EQ(parseRational("010"), Rational(10));
  EXPECT_EQ(parseRational("017/08"), Rational(17, 8));
  EXPECT_THROW(parseRational("abc"), FormatError);
  EXPECT_THROW(parseRational("1/0"), FormatError);
}

TEST(Numeric, RoundingBracketsTheValue) {
  const Rational third(1, 3);
  for (unsigned bits : {4U, 17U, 64U}) {
    Rational lo = roundDown(third, bits), hi = roundUp(third, bits);
    EXPECT_LE(lo, third);
    EXPECT_GE(hi, third);
    EXPECT_LE(hi - lo, pow2(-static_cast<long>(bits)));
    // Dyadic results only.
    Integer den = lo.get_den();
    EXPECT_EQ(mpz_popcount(den.get_mpz_t()), 1U);
  }
  EXPECT_EQ(roundDown(Rational(3, 4), 8), Rational(3, 4));
  EXPECT_EQ(roundUp(Rational(-1, 3), 4), -roundDown(Rational(1, 3), 4));
}

TEST(Numeric, DecimalRendering) {
  EXPECT_EQ(toDecimal(Rational(1, 8), 20, Rounding::Down), "0.125");
  EXPECT_EQ(toDecimal(Rational(1, 3), 5, Rounding::Down), "0.33333");
  EXPECT_EQ(toDecimal(Rational(1, 3), 5, Rounding::Up), "0.33334");
  EXPECT_EQ(toDecimal(Rational(-1, 3), 3, Rounding::Down), "-0.334");
  EXPECT_EQ(toDecimal(Rational(0), 3, Rounding::Up), "0");
}

TEST(Interval, ArithmeticEnclosesPointwiseResults) {
  Interval a(Rational(-1, 2), Rational(3, 2)), b(Rational(2), Rational(3));
  Interval p = a * b;
  EXPECT_EQ(p.lo(), Rational(-3, 2));
  EXPECT_EQ(p.hi(), Rational(9, 2));
  Interval d = a - b;
  EXPECT_EQ(d.lo(), Rational(-7, 2));
  EXPECT_EQ(d.hi(), Rational(-1, 2));
  EXPECT_THROW(Interval(Rational(1), Rational(0)), PrecisionInsufficient);
}

TEST(Interval, TightenedRoundsOutwardAndKeepsPoints) {
  Interval x(Rational(1, 3), Rational(2, 3));
  Interval t = x.tightened(10);
  EXPECT_LE(t.lo(), x.lo());
  EXPECT_GE(t.hi(), x.hi());
  Interval point(Rational(1, 3));
  EXPECT_EQ(point.tightened(4), point);
}

// sin^2(k sqrt2 pi) cross-checked against long double evaluation.
TEST(Interval, SinSquaredAgreesWithLongDouble) {
  const long double pi = 3.141592653589793238462643383279502884L;
  const long double r2 = 1.414213562373095048801688724209698079L;
  for (long long k = -40; k <= 400; ++k) {
    Interval x = sinSquaredTurns(k, 128);
    if (k == 0) {
      EXPECT_TRUE(x.isPoint());
      EXPECT_EQ(x.lo(), Rational(0));
      continue;
    }
    long double s = std::sin(static_cast<long double>(k) * r2 * pi);
    long double ref = s * s;
    EXPECT_LE(x.lo().get_d(), static_cast<double>(ref) + 1e-12) << "k=" << k;
    EXPECT_GE(x.hi().get_d(), static_cast<double>(ref) - 1e-12) << "k=" << k;
    EXPECT_LE(x.width(), pow2(-128));
    EXPECT_GT(x.lo(), Rational(0));
  }
}

TEST(Interval, SinSquaredWidthFollowsPrecision) {
  for (unsigned bits : {16U, 64U, 256U}) {
    Interval x = sinSquaredTurns(7, bits);
    EXPECT_LE(x.width(), pow2(-static_cast<long>(bits)));
  }
  // Higher precision nests inside lower precision.
  Interval coarse = sinSquaredTurns(29, 32), fine = sinSquaredTurns(29, 200);
  EXPECT_LE(coarse.lo(), fine.lo());
  EXPECT_GE(coarse.hi(), fine.hi());
}
