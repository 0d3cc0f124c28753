#include <gtest/gtest.h>

#include "qcfa/error.hpp"
#include "qcfa/padlang.hpp"
#include "qcfa/tape.hpp"

using namespace qcfa;

namespace {

Tape tapeOf(const std::string& a, const std::string& b) { return makeTape(TwoTrackString(a, b)); }

Tape tapeOf(const std::string& a) { return tapeOf(a, std::string(a.size(), '1')); }

}  // namespace

TEST(TwoTrack, ParsesTwoLines) {
  auto w = TwoTrackString::parse("1#1\n1#1\n");
  EXPECT_EQ(w.size(), 3);
  EXPECT_EQ(w.track(Track::II), "1#1");
  EXPECT_EQ(TwoTrackString::parse("0\n1").size(), 1);
  EXPECT_EQ(TwoTrackString::parse(w.format()), w);
}

TEST(TwoTrack, RejectsMalformedText) {
  EXPECT_THROW(TwoTrackString::parse("01\n1\n"), LengthMismatch);
  EXPECT_THROW(TwoTrackString::parse("01\n"), FormatError);
  EXPECT_THROW(TwoTrackString::parse("\n\n"), FormatError);
  try {
    TwoTrackString::parse("0x\n11\n");
    FAIL() << "expected IllegalSymbol";
  } catch (const IllegalSymbol& e) {
    EXPECT_EQ(e.track(), 0);
    EXPECT_EQ(e.index(), 1U);
  }
  EXPECT_THROW(TwoTrackString("00", "10"), IllegalSymbol);
}

TEST(TwoTrack, EndmarkersFrameTheCells) {
  TwoTrackString w("01", "1#");
  EXPECT_EQ(w.at(Track::I, 0), kLeftEndmarker);
  EXPECT_EQ(w.at(Track::I, 1), '0');
  EXPECT_EQ(w.at(Track::II, 2), '#');
  EXPECT_EQ(w.at(Track::II, 3), kRightEndmarker);
}

TEST(Signpost, LocatesStarInGeneratedFixture) {
  auto inst = generateWellPaddedI(1, 2);
  ASSERT_EQ(inst.w.size(), 127);
  auto star = Signpost::kthRightOf(Signpost::leftEnd(), '*', Track::I, 1);
  Located at = locateSignpost(inst.w, star);
  EXPECT_EQ(at.position, 16);
  EXPECT_EQ(locateSignpost(inst.w, star).position, at.position);
  EXPECT_LE(at.realSteps, 2 * (inst.w.size() + 2));
}

TEST(Signpost, EndsAndMissingSymbols) {
  TwoTrackString w("0110*##", "1111111");
  EXPECT_EQ(locateSignpost(w, Signpost::leftEnd()).position, 0);
  EXPECT_EQ(locateSignpost(w, Signpost::rightEnd()).position, 8);
  EXPECT_THROW(locateSignpost(w, Signpost::kthRightOf(Signpost::leftEnd(), '%', Track::I, 1)), NotFound);
  EXPECT_THROW(locateSignpost(w, Signpost::delimiterOfSegment(1)), NotFound);
  auto secondHash = Signpost::kthLeftOf(Signpost::rightEnd(), '#', Track::I, 2);
  EXPECT_EQ(locateSignpost(w, secondHash).position, 6);
}

TEST(SubseqView, PrefixView) {
  Tape w = tapeOf("0110*##");
  SubseqView p = views::pre(w);
  EXPECT_EQ(p.length(), 4);
  EXPECT_EQ(p.text(), "0110");
  for (std::int64_t i = 1; i < p.length(); ++i) EXPECT_LT(p.position(i - 1), p.position(i));
}

TEST(SubseqView, MultViews) {
  Tape w = tapeOf("#11#11");
  ResolvedSpan s = resolve(*w, wholeTrack(Track::I));
  EXPECT_EQ(views::m1(w, s).length(), 2);
  EXPECT_EQ(views::m2(w, s).text(), "11");
  EXPECT_EQ(views::pr(w, s).length(), 4);
}

TEST(SubseqView, RulerCore) {
  Tape w = tapeOf(std::string(rulerString(2).size(), '0'), rulerString(2));
  ResolvedSpan s = resolve(*w, wholeTrack(Track::II));
  EXPECT_EQ(views::core(w, s).text(), "11");
  Tape noHash = tapeOf("111");
  EXPECT_THROW(views::core(noHash, resolve(*noHash, wholeTrack(Track::I))), NotFound);
}

TEST(SubseqView, InputView) {
  Tape w = tapeOf("0111222$01$##");
  ResolvedSpan s = resolve(*w, wholeTrack(Track::I));
  EXPECT_EQ(views::inp(w, s).length(), 3);
}

TEST(SubseqView, LengthIsAdditiveOverDisjointSymbolSets) {
  Tape w = tapeOf("01#$%0123*##1");
  for (std::int64_t l = 0; l <= 13; ++l) {
    for (std::int64_t r = l; r <= 14; ++r) {
      SubseqView a(w, l, r, "01", Track::I), b(w, l, r, "#$%23*", Track::I), all(w, l, r, "01#$%23*", Track::I);
      EXPECT_EQ(a.length() + b.length(), all.length());
      EXPECT_EQ(all.length(), std::max<std::int64_t>(0, std::min<std::int64_t>(r, 14) - l - 1));
    }
  }
}

TEST(SubseqView, EvenOrdinalKeepsSecondFourthAndSoOn) {
  Tape w = tapeOf("1#1#1#1#1");
  SubseqView v(w, 0, 10, "#", Track::I, Ordinal::Even);
  ASSERT_EQ(v.length(), 2);
  EXPECT_EQ(v.position(0), 4);
  EXPECT_EQ(v.position(1), 8);
}

TEST(SubseqView, InvertedBounds) {
  Tape w = tapeOf("0*");
  EXPECT_THROW(SubseqView(w, 2, 1, "0", Track::I), InvertedBounds);
  EXPECT_THROW(extractSubsequence(w, Signpost::rightEnd(), Signpost::leftEnd(), "0", Track::I), InvertedBounds);
}

TEST(Ruler, LengthsAndCores) {
  for (int i = 1; i <= 14; ++i) {
    const std::string r = rulerString(i);
    EXPECT_EQ(static_cast<std::int64_t>(r.size()), static_cast<std::int64_t>(i) * (std::int64_t{1} << (i + 1)) - 1);
    Tape w = tapeOf(std::string(r.size(), '0'), r);
    EXPECT_EQ(views::core(w, resolve(*w, wholeTrack(Track::II))).length(), i);
  }
}
