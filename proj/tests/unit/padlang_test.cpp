#include <cmath>
#include <string>

#include <gtest/gtest.h>

#include "qcfa/error.hpp"
#include "qcfa/padlang.hpp"

using namespace qcfa;

namespace {

// Recursive ruler definition written out independently of the library.
std::string rulerRef(int i) {
  if (i == 1) return "1#1";
  std::string ones(static_cast<std::size_t>(i), '1');
  std::string s = ones;
  for (long b = 1; b < (1L << i); ++b) s += "#" + ones;
  return s + "$" + rulerRef(i - 1);
}

}  // namespace

TEST(Ruler, StringsMatchTheRecursion) {
  EXPECT_EQ(rulerString(1), "1#1");
  EXPECT_EQ(rulerString(2), "11#11#11#11$1#1");
  EXPECT_EQ(rulerString(4).size(), 127U);
  for (int i = 1; i <= 10; ++i) EXPECT_EQ(rulerString(i), rulerRef(i)) << i;
  EXPECT_THROW(rulerString(0), PreconditionViolation);
  EXPECT_THROW(rulerString(15), TooLarge);
}

TEST(Ruler, IndexRecognizesExactlyRulers) {
  for (int i = 1; i <= 8; ++i) EXPECT_EQ(rulerIndex(rulerString(i)), std::optional<std::int64_t>(i));
  EXPECT_FALSE(rulerIndex("11#1").has_value());
  EXPECT_FALSE(rulerIndex("11#11#11$1#1").has_value());
  EXPECT_FALSE(rulerIndex("").has_value());
  EXPECT_FALSE(rulerIndex("1#1$1#1").has_value());
}

TEST(LoMaps, FormulaAndInverse) {
  EXPECT_EQ(loInv(2), 15);
  EXPECT_EQ(loInv(4), 127);
  EXPECT_EQ(lo(127), 4);
  EXPECT_THROW(lo(100), NotInDomain);
  for (long q = 1; q <= 40; ++q) {
    Integer n = loInv(q);
    EXPECT_EQ(n, Integer(q) * ipow(2, static_cast<unsigned long>(q + 1)) - 1);
    EXPECT_EQ(lo(n), q);
    EXPECT_LT(static_cast<double>(q), std::log2(n.get_d()));
  }
}

TEST(Generator, Level2Fixture) {
  auto inst = generateWellPaddedI(1, 2);
  const std::string expected =
      "000000010000000*#11#11%11#11#11#11$1#1%" + std::string(88, '#');
  EXPECT_EQ(inst.w.track(Track::I), expected);
  EXPECT_EQ(inst.w.track(Track::II), rulerString(4));
  EXPECT_EQ(inst.plan.n.toString(), "127");
  EXPECT_TRUE(inst.plan.feasible);
  EXPECT_EQ(inst.plan.length("pad").toString(), "88");
  Verdict v = membershipOracle(inst.w, FamilyI{1});
  EXPECT_TRUE(v.member);
  EXPECT_TRUE(v.firstViolation.empty());
}

TEST(Generator, CustomPrefixes) {
  auto sym = generateWellPaddedI(1, 2, std::string("000000010000000"));
  EXPECT_TRUE(membershipOracle(sym.w, FamilyI{1}).member);
  auto flip = generateWellPaddedI(1, 2, std::string("000000010000001"));
  Verdict v = membershipOracle(flip.w, FamilyI{1});
  EXPECT_TRUE(v.wellPadded);
  EXPECT_FALSE(v.prefixPalindrome);
  EXPECT_FALSE(v.member);
  EXPECT_THROW(generateWellPaddedI(1, 2, std::string("0101")), PreconditionViolation);
}

TEST(Generator, LargeLevelsArePlannedNotMaterialized) {
  PadPlan p = planI(2, 2);
  EXPECT_EQ(p.rulerIndex.toString(), "16");
  EXPECT_EQ(p.n.toString(), "2097151");
  EXPECT_TRUE(p.layoutFits);
  EXPECT_FALSE(p.feasible);
  EXPECT_THROW(generateWellPaddedI(2, 2), TooLarge);
  PadPlan mid = planI(1, 5);
  EXPECT_EQ(mid.n.toString(), "1677721599");
  EXPECT_FALSE(mid.feasible);
  PadPlan big = planI(3, 3);
  EXPECT_FALSE(big.n.exact.has_value());
  EXPECT_EQ(big.n.toString(), "loInv(6561)");
  EXPECT_FALSE(big.feasible);
  EXPECT_THROW(planI(1, 1), PreconditionViolation);
}

TEST(Generator, LevelThreeFamilyOne) {
  auto inst = generateWellPaddedI(1, 3);
  EXPECT_EQ(inst.w.size(), loInv(9));
  EXPECT_TRUE(membershipOracle(inst.w, FamilyI{1}).member);
}

TEST(PaddingFunction, Values) {
  EXPECT_EQ(fIEval(1, 127), std::optional<Integer>(15));
  EXPECT_FALSE(fIEval(1, 128).has_value());
  EXPECT_EQ(fIEval(2, 2097151), std::optional<Integer>(15));
  EXPECT_FALSE(fIEval(1, 15).has_value());  // l = 1 is excluded
}

// log2 f_i(n) against (log2 n)^(1/2^i), with n kept symbolic as loInv(l^(2^i)).
TEST(PaddingFunction, ExponentBand) {
  for (int i = 1; i <= 2; ++i)
    for (long l = 2; l <= 5; ++l) {
      const double q = std::pow(static_cast<double>(l), std::pow(2.0, i));
      const double log2n = q + 1 + std::log2(q);  // log2(q 2^(q+1) - 1), up to rounding
      const double log2f = std::log2(loInv(l).get_d());
      const double ratio = log2f / std::pow(log2n, 1.0 / std::pow(2.0, i));
      EXPECT_GE(ratio, 0.5) << i << "," << l;
      EXPECT_LE(ratio, 2.0) << i << "," << l;
    }
}

TEST(Oracle, TruncatedRulerIsNotWellPadded) {
  auto inst = generateWellPaddedI(1, 2);
  std::string t2 = inst.w.track(Track::II);
  t2[t2.size() - 2] = '1';  // "...$1#1" becomes "...$111"
  Verdict v = membershipOracle(TwoTrackString(inst.w.track(Track::I), t2), FamilyI{1});
  EXPECT_TRUE(v.shapeOK);
  EXPECT_FALSE(v.wellPadded);
  EXPECT_FALSE(v.member);
  EXPECT_FALSE(v.firstViolation.empty());
}

TEST(Oracle, ShapeFailures) {
  TwoTrackString noStar("0101%##", "1111111");
  Verdict v = membershipOracle(noStar, FamilyI{1});
  EXPECT_FALSE(v.shapeOK);
  EXPECT_FALSE(v.member);
}

TEST(AlphaPlans, BestFit) {
  PadPlan p1 = bestFitAlphaPlan(halvesBundle(), 1);
  EXPECT_EQ(p1.n.toString(), "47");
  EXPECT_FALSE(p1.feasible);
  PadPlan p2 = bestFitAlphaPlan(halvesBundle(), 2);
  EXPECT_EQ(p2.n.toString(), "983039");
  EXPECT_FALSE(p2.feasible);
  PadPlan p3 = bestFitAlphaPlan(thirdsBundle(), 3);
  EXPECT_EQ(p3.n.toString(), toString(Integer(47) * ipow(2, 48) - 1));
  EXPECT_EQ(p3.length("pi_1").toString(), "47");
  EXPECT_EQ(p3.length("pi_2").toString(), "3");
  EXPECT_FALSE(p3.feasible);
  EXPECT_THROW(bestFitAlphaPlan(halvesBundle(), 0), PreconditionViolation);
}

TEST(Fooling, PairSplitsMemberFromNonMember) {
  auto inst = generateWellPaddedI(1, 2);
  const std::string wI = "0010110";
  std::string wpI = wI;
  wpI[3] = '1';
  const std::string wII = inst.w.track(Track::II).substr(0, 7);
  FoolingPair fp = foolingPair(TwoTrackString(wI, wII), TwoTrackString(wpI, wII), 1);
  EXPECT_TRUE(fp.uI.empty());
  EXPECT_EQ(fp.s.track(Track::I).substr(0, 15), "001011000110100");
  EXPECT_TRUE(membershipOracle(fp.s, FamilyI{1}).member);
  Verdict v = membershipOracle(fp.sPrime, FamilyI{1});
  EXPECT_TRUE(v.wellPadded);
  EXPECT_FALSE(v.member);
  EXPECT_THROW(foolingPair(TwoTrackString(wI, wII), TwoTrackString(wI, wII), 1), PreconditionViolation);
}
