#pragma once

#include <array>
#include <cstdint>
#include <string_view>

#include "qcfa/numeric.hpp"

namespace qcfa {

using Matrix3 = std::array<std::array<Rational, 3>, 3>;

// Exact state of a three-dimensional real register.
struct RationalVector {
  std::array<Rational, 3> c;

  Rational normSquared() const { return c[0] * c[0] + c[1] * c[1] + c[2] * c[2]; }
  friend bool operator==(const RationalVector& a, const RationalVector& b) { return a.c == b.c; }
};

RationalVector apply(const Matrix3& m, const RationalVector& v);
Matrix3 multiply(const Matrix3& a, const Matrix3& b);
Matrix3 transpose(const Matrix3& m);
Matrix3 identity3();

// Net number of base-angle rotations applied to the EqLen qubit.
struct AngleIndex {
  std::int64_t k = 0;
};

// Rotations by arccos(3/5) about the z axis (symbol 0) and x axis (symbol 1).
struct PalMatrices {
  Matrix3 u0;
  Matrix3 u1;
  RationalVector start;

  const Matrix3& forSymbol(char s) const { return s == '0' ? u0 : u1; }
};

const PalMatrices& palMatrices();

// Register state after the two Rejection Test passes over p.
RationalVector palRejectionState(std::string_view p);

// Probability that the Rejection Test rejects p: 1 - <start, final>^2.
Rational palRejectProbability(std::string_view p);

// The 2|p|-matrix product realized by the two passes, as an exact matrix.
Matrix3 palRoundTripProduct(std::string_view p);

}  // namespace qcfa
