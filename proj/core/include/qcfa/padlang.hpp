#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qcfa/counter3.hpp"
#include "qcfa/numeric.hpp"
#include "qcfa/tape.hpp"

namespace qcfa {

// Largest instance the generators will write out.
inline constexpr std::int64_t kMaterializeLimit = 2'000'000;

// loInv(q) = q * 2^(q+1) - 1, the length of the ruler string r_q.
Integer loInv(const Integer& q);
// Partial inverse of loInv; throws NotInDomain when n is not a ruler length.
Integer lo(const Integer& n);

// r_i for 1 <= i <= 14.
std::string rulerString(int i);
// Core length q when s == r_q, nothing otherwise.
std::optional<std::int64_t> rulerIndex(std::string_view s);

// A component length that may be too large to write down; in that case only
// a symbolic form such as "loInv(16)" is kept.
struct BigLength {
  std::optional<Integer> exact;
  std::string symbolic;

  static BigLength of(const Integer& v) { return BigLength{v, {}}; }
  static BigLength loInvOf(const Integer& q);
  std::string toString() const { return exact ? qcfa::toString(*exact) : symbolic; }
};

struct PadPlan {
  enum class Family { I, Alpha };
  Family family = Family::I;
  int i = 0;               // family I
  std::int64_t level = 0;  // family I: l; family alpha: input encoded by the history
  std::string bundle;      // family alpha
  std::int64_t m = 0;      // family alpha: |pi_2|

  std::vector<std::pair<std::string, BigLength>> components;  // x, pi_1, ..., pad
  BigLength n;
  BigLength rulerIndex;    // |core(w_II)|
  bool layoutFits = false; // all components fit with at least one '#' of padding
  bool feasible = false;   // layoutFits and n within the materialization limit
  std::string note;

  const BigLength& length(const std::string& name) const;
};

PadPlan planI(int i, std::int64_t l);

struct PaddedInstance {
  TwoTrackString w;
  PadPlan plan;
};

// Builds x * pi_1 % ... % pi_(i+1) % #^pad over the ruler r_(l^(2^i)). The
// default prefix is 0^j 1 0^j.
PaddedInstance generateWellPaddedI(int i, std::int64_t l, std::optional<std::string> prefix = std::nullopt,
                                   std::int64_t maxCells = kMaterializeLimit);

// loInv(l) when n = loInv(l^(2^i)) for an integer l >= 2.
std::optional<Integer> fIEval(int i, const Integer& n);

struct FamilyI {
  int i;
};
struct FamilyAlpha {
  CmProgram prog;
};
using Family = std::variant<FamilyI, FamilyAlpha>;

struct Verdict {
  bool shapeOK = false;
  bool wellPadded = false;
  bool prefixPalindrome = false;
  bool member = false;
  std::string firstViolation;
};

Verdict membershipOracle(const TwoTrackString& w, const Family& family);

PadPlan bestFitAlphaPlan(const AlphaBundle& bundle, std::int64_t m);

struct FoolingPair {
  std::string uI, uII;  // always empty
  std::string vI, vII;
  TwoTrackString s;
  TwoTrackString sPrime;
};

// w and w' are the first floor(m/2) cells of an instance whose prefix has
// length m; v completes w to a member, so s' = w'v differs only in the prefix.
FoolingPair foolingPair(const TwoTrackString& w, const TwoTrackString& wPrime, int i);

}  // namespace qcfa
