#pragma once

#include <string>

#include "qcfa/numeric.hpp"

namespace qcfa {

// Closed interval with exact rational endpoints. Arithmetic is exact; callers
// bound the size of endpoints with tightened(), which rounds outward and leaves
// point intervals untouched.
class Interval {
 public:
  Interval() = default;
  explicit Interval(const Rational& x) : lo_(x), hi_(x) {}
  Interval(const Rational& lo, const Rational& hi);

  static Interval point(const Rational& x) { return Interval(x); }

  const Rational& lo() const { return lo_; }
  const Rational& hi() const { return hi_; }
  bool isPoint() const { return lo_ == hi_; }
  bool contains(const Rational& x) const { return lo_ <= x && x <= hi_; }
  Rational width() const { return hi_ - lo_; }

  Interval tightened(unsigned bits) const;

  friend Interval operator+(const Interval& a, const Interval& b);
  friend Interval operator-(const Interval& a, const Interval& b);
  friend Interval operator*(const Interval& a, const Interval& b);
  friend Interval operator/(const Interval& a, const Interval& b);
  friend bool operator==(const Interval& a, const Interval& b) {
    return a.lo_ == b.lo_ && a.hi_ == b.hi_;
  }

  // Decimal endpoints rounded outward.
  std::string loString(int digits = 20) const;
  std::string hiString(int digits = 20) const;

 private:
  Rational lo_{0};
  Rational hi_{0};
};

// Certified enclosure of sin^2(k * sqrt(2) * pi) whose width is at most
// 2^-bits. k = 0 yields the exact point 0.
Interval sinSquaredTurns(long long k, unsigned bits);

}  // namespace qcfa
