#include "qcfa/interval.hpp"

#include <mpfr.h>

#include <algorithm>
#include <cstdlib>
#include <map>
#include <mutex>
#include <utility>

#include "qcfa/error.hpp"

namespace qcfa {

Interval::Interval(const Rational& lo, const Rational& hi) : lo_(lo), hi_(hi) {
  if (hi_ < lo_) throw PrecisionInsufficient("interval with lo > hi");
}

Interval Interval::tightened(unsigned bits) const {
  if (isPoint()) return *this;
  return Interval(roundDown(lo_, bits), roundUp(hi_, bits));
}

Interval operator+(const Interval& a, const Interval& b) {
  return Interval(a.lo_ + b.lo_, a.hi_ + b.hi_);
}

Interval operator-(const Interval& a, const Interval& b) {
  return Interval(a.lo_ - b.hi_, a.hi_ - b.lo_);
}

Interval operator*(const Interval& a, const Interval& b) {
  if (a.isPoint() && b.isPoint()) return Interval(a.lo_ * b.lo_);
  Rational c[4] = {a.lo_ * b.lo_, a.lo_ * b.hi_, a.hi_ * b.lo_, a.hi_ * b.hi_};
  return Interval(*std::min_element(c, c + 4), *std::max_element(c, c + 4));
}

Interval operator/(const Interval& a, const Interval& b) {
  if (b.lo_ <= 0 && b.hi_ >= 0) throw PrecisionInsufficient("division by an interval containing 0");
  Interval inv(1 / b.hi_, 1 / b.lo_);
  if (b.isPoint()) inv = Interval(1 / b.lo_);
  return a * inv;
}

std::string Interval::loString(int digits) const { return toDecimal(lo_, digits, Rounding::Down); }
std::string Interval::hiString(int digits) const { return toDecimal(hi_, digits, Rounding::Up); }

namespace {

struct Mpfr {
  mpfr_t v;
  explicit Mpfr(mpfr_prec_t prec) { mpfr_init2(v, prec); }
  ~Mpfr() { mpfr_clear(v); }
  Mpfr(const Mpfr&) = delete;
  Mpfr& operator=(const Mpfr&) = delete;
};

Rational toRational(const mpfr_t x) {
  Rational q;
  mpfr_get_q(q.get_mpq_t(), x);
  return q;
}

// Enclosure of sin(x) over the real interval [xl, xh], returned as rationals.
std::pair<Rational, Rational> sinRange(const mpfr_t xl, const mpfr_t xh, mpfr_prec_t prec) {
  Mpfr a(prec), b(prec), c(prec), d(prec), cl(prec), ch(prec);
  mpfr_sin(a.v, xl, MPFR_RNDD);
  mpfr_sin(b.v, xl, MPFR_RNDU);
  mpfr_sin(c.v, xh, MPFR_RNDD);
  mpfr_sin(d.v, xh, MPFR_RNDU);
  Rational lo = std::min(toRational(a.v), toRational(c.v));
  Rational hi = std::max(toRational(b.v), toRational(d.v));
  // The argument interval is far narrower than pi, so it holds at most one
  // extremum; a sign change of cos locates it.
  mpfr_cos(cl.v, xl, MPFR_RNDN);
  mpfr_cos(ch.v, xh, MPFR_RNDN);
  int sl = mpfr_sgn(cl.v);
  int sh = mpfr_sgn(ch.v);
  Mpfr tiny(prec);
  mpfr_set_ui_2exp(tiny.v, 1, -(prec / 2), MPFR_RNDN);
  bool flat = mpfr_cmpabs(cl.v, tiny.v) < 0 || mpfr_cmpabs(ch.v, tiny.v) < 0;
  if (flat || sl != sh) {
    if (flat || sl > 0) hi = 1;
    if (flat || sl < 0) lo = -1;
  }
  return {lo, hi};
}

Interval computeSinSquared(long long k, unsigned bits) {
  if (k == 0) return Interval(Rational(0));
  unsigned long long ak = static_cast<unsigned long long>(k < 0 ? -k : k);
  mpfr_prec_t prec = static_cast<mpfr_prec_t>(bits) + 96 + 64;
  Mpfr s2lo(prec), s2hi(prec), pilo(prec), pihi(prec), xl(prec), xh(prec);
  mpfr_sqrt_ui(s2lo.v, 2, MPFR_RNDD);
  mpfr_sqrt_ui(s2hi.v, 2, MPFR_RNDU);
  mpfr_const_pi(pilo.v, MPFR_RNDD);
  mpfr_const_pi(pihi.v, MPFR_RNDU);
  mpfr_mul(xl.v, s2lo.v, pilo.v, MPFR_RNDD);
  mpfr_mul(xh.v, s2hi.v, pihi.v, MPFR_RNDU);
  mpfr_mul_ui(xl.v, xl.v, static_cast<unsigned long>(ak), MPFR_RNDD);
  mpfr_mul_ui(xh.v, xh.v, static_cast<unsigned long>(ak), MPFR_RNDU);
  auto [slo, shi] = sinRange(xl.v, xh.v, prec);
  Rational lo, hi;
  if (slo <= 0 && shi >= 0) {
    lo = 0;
    hi = std::max(slo * slo, shi * shi);
  } else {
    Rational a = slo * slo, b = shi * shi;
    lo = std::min(a, b);
    hi = std::max(a, b);
  }
  if (hi > 1) hi = 1;
  Interval r = Interval(lo, hi).tightened(bits + 32);
  if (r.width() > pow2(-static_cast<long>(bits))) {
    throw PrecisionInsufficient("sin^2 enclosure wider than requested for k = " + std::to_string(k));
  }
  return r;
}

}  // namespace

Interval sinSquaredTurns(long long k, unsigned bits) {
  static std::mutex mu;
  static std::map<std::pair<long long, unsigned>, Interval> cache;
  long long key = k < 0 ? -k : k;
  {
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find({key, bits});
    if (it != cache.end()) return it->second;
  }
  Interval r = computeSinSquared(key, bits);
  std::lock_guard<std::mutex> lock(mu);
  cache.emplace(std::make_pair(key, bits), r);
  return r;
}

}  // namespace qcfa
