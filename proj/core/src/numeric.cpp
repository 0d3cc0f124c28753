#include "qcfa/numeric.hpp"

#include <algorithm>
#include <cctype>
#include <stdexcept>

#include "qcfa/error.hpp"

namespace qcfa {

Rational pow2(long e) {
  Integer p;
  mpz_ui_pow_ui(p.get_mpz_t(), 2, static_cast<unsigned long>(e < 0 ? -e : e));
  if (e >= 0) return Rational(p);
  Rational r(Integer(1), p);
  r.canonicalize();
  return r;
}

Integer ipow(const Integer& base, unsigned long e) {
  Integer r;
  mpz_pow_ui(r.get_mpz_t(), base.get_mpz_t(), e);
  return r;
}

namespace {

// floor(log2 x) for x > 0.
long floorLog2(const Rational& x) {
  long e = static_cast<long>(mpz_sizeinbase(x.get_num_mpz_t(), 2)) -
           static_cast<long>(mpz_sizeinbase(x.get_den_mpz_t(), 2));
  // 2^(e-1) < x < 2^(e+1); settle which side of 2^e we are on.
  return x >= pow2(e) ? e : e - 1;
}

Rational roundImpl(const Rational& x, unsigned bits, bool up) {
  if (x == 0) return x;
  if (x < 0) return -roundImpl(-x, bits, !up);
  long shift = static_cast<long>(bits) - 1 - floorLog2(x);
  Rational scaled = x * pow2(shift);
  Integer q;
  if (up) {
    mpz_cdiv_q(q.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
  } else {
    mpz_fdiv_q(q.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
  }
  Rational r = Rational(q) * pow2(-shift);
  r.canonicalize();
  return r;
}

std::string withPoint(const std::string& digits, long fracDigits) {
  std::string s = digits;
  if (fracDigits <= 0) return s + std::string(static_cast<std::size_t>(-fracDigits), '0');
  if (static_cast<long>(s.size()) <= fracDigits) {
    s = std::string(static_cast<std::size_t>(fracDigits - static_cast<long>(s.size()) + 1), '0') + s;
  }
  s.insert(s.size() - static_cast<std::size_t>(fracDigits), ".");
  while (s.back() == '0') s.pop_back();
  if (s.back() == '.') s.pop_back();
  return s;
}

// Exact decimal expansion when the denominator is 2^a 5^b and the result is short.
bool exactDecimal(const Rational& x, std::string& out) {
  Integer den = x.get_den();
  unsigned long a = mpz_remove(den.get_mpz_t(), den.get_mpz_t(), Integer(2).get_mpz_t());
  unsigned long b = mpz_remove(den.get_mpz_t(), den.get_mpz_t(), Integer(5).get_mpz_t());
  if (den != 1) return false;
  unsigned long s = std::max(a, b);
  Integer scaled = x.get_num() * ipow(10, s) / x.get_den();
  std::string digits = scaled.get_str();
  std::string trimmed = digits;
  while (trimmed.size() > 1 && trimmed.back() == '0') trimmed.pop_back();
  if (trimmed.size() > 40 || s > 40) return false;
  out = withPoint(digits, static_cast<long>(s));
  return true;
}

}  // namespace

Rational roundDown(const Rational& x, unsigned bits) { return roundImpl(x, bits, false); }
Rational roundUp(const Rational& x, unsigned bits) { return roundImpl(x, bits, true); }

std::string toDecimal(const Rational& x, int digits, Rounding dir) {
  if (x == 0) return "0";
  if (x < 0) {
    Rounding flipped = dir == Rounding::Up ? Rounding::Down : dir == Rounding::Down ? Rounding::Up : dir;
    return "-" + toDecimal(-x, digits, flipped);
  }
  std::string exact;
  if (exactDecimal(x, exact)) return exact;

  long e10 = static_cast<long>(mpz_sizeinbase(x.get_num_mpz_t(), 10)) -
             static_cast<long>(mpz_sizeinbase(x.get_den_mpz_t(), 10));
  auto pow10 = [](long e) {
    Rational r = e >= 0 ? Rational(ipow(10, static_cast<unsigned long>(e)))
                        : Rational(Integer(1), ipow(10, static_cast<unsigned long>(-e)));
    r.canonicalize();
    return r;
  };
  while (x < pow10(e10)) --e10;
  while (x >= pow10(e10 + 1)) ++e10;

  Rational scaled = x * pow10(digits - 1 - e10);
  Integer m;
  switch (dir) {
    case Rounding::Down:
      mpz_fdiv_q(m.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
      break;
    case Rounding::Up:
      mpz_cdiv_q(m.get_mpz_t(), scaled.get_num_mpz_t(), scaled.get_den_mpz_t());
      break;
    case Rounding::Nearest: {
      Rational half = scaled + Rational(1, 2);
      mpz_fdiv_q(m.get_mpz_t(), half.get_num_mpz_t(), half.get_den_mpz_t());
      break;
    }
  }
  if (m == ipow(10, static_cast<unsigned long>(digits))) {
    m /= 10;
    ++e10;
  }
  std::string ds = m.get_str();
  if (e10 < -6 || e10 > 20) {
    std::string mant = withPoint(ds, digits - 1);
    return mant + "e" + std::to_string(e10);
  }
  return withPoint(ds, digits - 1 - e10);
}

Rational parseRational(std::string_view text) {
  std::string t(text);
  t.erase(std::remove_if(t.begin(), t.end(), [](unsigned char c) { return std::isspace(c); }), t.end());
  if (t.empty()) throw FormatError("empty number");
  try {
    auto slash = t.find('/');
    if (slash != std::string::npos) {
      Rational r(Integer(t.substr(0, slash), 10), Integer(t.substr(slash + 1), 10));
      if (r.get_den() == 0) throw FormatError("zero denominator in '" + t + "'");
      r.canonicalize();
      return r;
    }
    long exp10 = 0;
    auto epos = t.find_first_of("eE");
    std::string mant = t;
    if (epos != std::string::npos) {
      exp10 = std::stol(t.substr(epos + 1));
      mant = t.substr(0, epos);
    }
    bool neg = !mant.empty() && mant[0] == '-';
    if (neg || (!mant.empty() && mant[0] == '+')) mant = mant.substr(1);
    auto dot = mant.find('.');
    std::string digits = mant;
    if (dot != std::string::npos) {
      digits = mant.substr(0, dot) + mant.substr(dot + 1);
      exp10 -= static_cast<long>(mant.size() - dot - 1);
    }
    if (digits.empty() || !std::all_of(digits.begin(), digits.end(), [](unsigned char c) { return std::isdigit(c); })) {
      throw FormatError("not a number: '" + t + "'");
    }
    Rational r{Integer(digits, 10)};
    if (exp10 >= 0) {
      r *= ipow(10, static_cast<unsigned long>(exp10));
    } else {
      r /= ipow(10, static_cast<unsigned long>(-exp10));
    }
    r.canonicalize();
    return neg ? Rational(-r) : r;
  } catch (const std::invalid_argument&) {
    throw FormatError("not a number: '" + t + "'");
  } catch (const std::out_of_range&) {
    throw FormatError("number out of range: '" + t + "'");
  }
}

std::string toString(const Integer& z) { return z.get_str(); }

}  // namespace qcfa
