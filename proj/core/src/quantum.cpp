#include "qcfa/quantum.hpp"

#include <map>
#include <mutex>
#include <string>

#include "qcfa/error.hpp"

namespace qcfa {

RationalVector apply(const Matrix3& m, const RationalVector& v) {
  RationalVector r;
  for (int i = 0; i < 3; ++i) r.c[i] = m[i][0] * v.c[0] + m[i][1] * v.c[1] + m[i][2] * v.c[2];
  return r;
}

Matrix3 multiply(const Matrix3& a, const Matrix3& b) {
  Matrix3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j] + a[i][2] * b[2][j];
  return r;
}

Matrix3 transpose(const Matrix3& m) {
  Matrix3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = m[j][i];
  return r;
}

Matrix3 identity3() {
  Matrix3 r;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) r[i][j] = i == j ? 1 : 0;
  return r;
}

const PalMatrices& palMatrices() {
  static const PalMatrices m = [] {
    const Rational a(3, 5), b(4, 5);
    PalMatrices p;
    p.u0 = {{{a, -b, 0}, {b, a, 0}, {0, 0, 1}}};
    p.u1 = {{{1, 0, 0}, {0, a, -b}, {0, b, a}}};
    p.start.c = {0, 1, 0};
    return p;
  }();
  return m;
}

namespace {

// Integer numerators of 5*U; the inverse of a rotation is its transpose.
using IMat = std::array<std::array<long, 3>, 3>;
constexpr IMat kA0 = {{{3, -4, 0}, {4, 3, 0}, {0, 0, 5}}};
constexpr IMat kA1 = {{{5, 0, 0}, {0, 3, -4}, {0, 4, 3}}};

void applyScaled(const IMat& a, bool inverse, std::array<Integer, 3>& v) {
  std::array<Integer, 3> r;
  for (int i = 0; i < 3; ++i) {
    r[i] = 0;
    for (int j = 0; j < 3; ++j) {
      long e = inverse ? a[j][i] : a[i][j];
      if (e != 0) r[i] += v[j] * e;
    }
  }
  v = r;
}

void checkBits(std::string_view p) {
  for (char s : p) {
    if (s != '0' && s != '1') throw PreconditionViolation("palindrome prefix must be over {0,1}");
  }
}

}  // namespace

RationalVector palRejectionState(std::string_view p) {
  checkBits(p);
  std::array<Integer, 3> v = {0, 1, 0};
  for (char s : p) applyScaled(s == '0' ? kA0 : kA1, false, v);
  for (char s : p) applyScaled(s == '0' ? kA0 : kA1, true, v);
  Integer den = ipow(5, 2 * p.size());
  RationalVector r;
  for (int i = 0; i < 3; ++i) {
    r.c[i] = Rational(v[i], den);
    r.c[i].canonicalize();
  }
  return r;
}

Rational palRejectProbability(std::string_view p) {
  static std::mutex mu;
  static std::map<std::string, Rational, std::less<>> cache;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(p);
    if (it != cache.end()) return it->second;
  }
  RationalVector v = palRejectionState(p);
  Rational r = 1 - v.c[1] * v.c[1];
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(std::string(p), r);
  return r;
}

Matrix3 palRoundTripProduct(std::string_view p) {
  checkBits(p);
  const PalMatrices& m = palMatrices();
  Matrix3 acc = identity3();
  for (char s : p) acc = multiply(m.forSymbol(s), acc);
  for (char s : p) acc = multiply(transpose(m.forSymbol(s)), acc);
  return acc;
}

}  // namespace qcfa
