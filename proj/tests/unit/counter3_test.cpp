#include <string>

#include <gtest/gtest.h>

#include "qcfa/counter3.hpp"
#include "qcfa/error.hpp"

using namespace qcfa;

namespace {

CmProgram incrementOnce() { return CmProgram::parse("states 2\n1 INC 1 2\n"); }

// Native beta for alpha(n) = floor(n/k): the largest m with floor(m/k) <= n.
std::int64_t betaFloorDiv(std::int64_t n, std::int64_t k) { return k * n + k - 1; }

}  // namespace

TEST(CmProgram, ParseAndFormatRoundTrip) {
  const std::string text = "states 4\n1 INC 1 2\n2 DEC 1 4 3  ; drain\n3 INC 2 2\n";
  CmProgram p = CmProgram::parse(text);
  EXPECT_EQ(p.states(), 4);
  EXPECT_EQ(p.at(2).op, CmInstr::Op::Dec);
  EXPECT_EQ(p.at(2).nextElse, 3);
  CmProgram again = CmProgram::parse(p.format());
  EXPECT_EQ(again.format(), p.format());
}

TEST(CmProgram, RejectsBadPrograms) {
  EXPECT_THROW(CmProgram::parse("1 INC 1 2\n"), FormatError);
  EXPECT_THROW(CmProgram::parse("states 2\n1 DEC 1 2 2\n"), FormatError);
  EXPECT_THROW(CmProgram::parse("states 2\n1 INC 4 2\n"), FormatError);
  EXPECT_THROW(CmProgram::parse("states 2\n1 INC 1 3\n"), FormatError);
  EXPECT_THROW(CmProgram::parse("states 3\n1 INC 1 3\n"), FormatError);
}

TEST(CmRun, TrivialIncrement) {
  CmConfig c = runCm(incrementOnce(), 4, 10);
  EXPECT_EQ(c.state, 2);
  EXPECT_EQ(c.c1, 5);
  EXPECT_EQ(historyOf(incrementOnce(), 1, 10), "01$0011$");
  EXPECT_EQ(historyLength(incrementOnce(), 1, 10), 8);
}

TEST(CmRun, StepLimitAndIllegalSteps) {
  // State 2 bounces back to itself forever; the halting state 3 is unreachable.
  CmProgram loop = CmProgram::parse("states 3\n1 INC 1 2\n2 INC 2 2\n");
  EXPECT_THROW(runCm(loop, 1, 1'000'000), StepLimit);
  EXPECT_THROW(historyOf(loop, 1, 1000), StepLimit);
  CmProgram p = CmProgram::parse("states 3\n1 INC 1 2\n2 DEC 3 3 3\n");
  CmConfig c{2, 1, 0, 0};
  EXPECT_THROW(stepCm(p, c), IllegalTransition);
  EXPECT_THROW(stepCm(p, CmConfig{3, 0, 0, 0}), IllegalTransition);
}

TEST(CmConfig, Encoding) {
  CmConfig c{3, 2, 0, 1};
  EXPECT_EQ(c.encode(), "000113$");
  EXPECT_EQ(c.encodedLength(), 7);
}

TEST(Bundles, GammaValues) {
  const CmProgram& h = halvesBundle().gammaProg;
  EXPECT_EQ(runCm(h, 3, kCmStepBudget).c1, 16);
  EXPECT_EQ(runCm(h, 2, kCmStepBudget).c1, 9);
  for (std::int64_t n = 0; n <= 20; ++n) {
    EXPECT_EQ(runCm(h, n, kCmStepBudget).c1, (n + 1) * (n + 1));
    std::int64_t g = 0;
    for (std::int64_t t = 0; t <= n; ++t) g += betaFloorDiv(t, 3);
    EXPECT_EQ(runCm(thirdsBundle().gammaProg, n, kCmStepBudget).c1, g);
  }
  std::string hist = historyOf(h, 2, kCmStepBudget);
  std::string last = hist.substr(hist.rfind('$', hist.size() - 2) + 1);
  EXPECT_EQ(std::count(last.begin(), last.end(), '1'), 9);
}

TEST(Bundles, StartStateOnlyIncrements) {
  for (const std::string& name : bundleNames()) {
    const CmProgram& p = bundleByName(name).gammaProg;
    EXPECT_EQ(p.at(1).op, CmInstr::Op::Inc) << name;
  }
  EXPECT_THROW(bundleByName("sqrt"), PreconditionViolation);
}

TEST(Bundles, Tables) {
  SlowTables t = slowTables(halvesBundle(), 32);
  for (std::int64_t n = 0; n <= 32; ++n) {
    const auto i = static_cast<std::size_t>(n);
    EXPECT_EQ(t.beta[i], 2 * n + 1);
    EXPECT_EQ(t.gamma[i], (n + 1) * (n + 1));
    if (n > 0) {
      EXPECT_GT(t.histLen[i], t.histLen[i - 1]);
    }
    EXPECT_GT(t.histLen[i], t.gamma[i]);
    if (n < t.histLen[0]) {
      EXPECT_EQ(t.underAlpha[i], 0);
    }
    EXPECT_LE(t.underAlpha[i], halvesBundle().alpha(n));
  }
  EXPECT_THROW(slowTables(halvesBundle(), halvesBundle().verifiedMax + 1), RangeUnverified);
}

TEST(Bundles, BetaByEnumeration) {
  auto half = [](std::int64_t n) { return n / 2; };
  for (std::int64_t t = 0; t < 10; ++t) EXPECT_EQ(betaByEnumeration(half, t), 2 * t + 1);
}

TEST(Bundles, VerifyCatchesWrongProgram) {
  AlphaBundle wrong = halvesBundle();
  wrong.gammaProg = linearGammaProgram(3, 2);
  EXPECT_THROW(verifyBundle(wrong, 4), RangeUnverified);
}

TEST(Assembler, LinearGammaMatchesClosedForm) {
  for (int a = 1; a <= 3; ++a)
    for (int b = 1; b <= 3; ++b) {
      CmProgram p = linearGammaProgram(a, b);
      for (std::int64_t n = 0; n <= 6; ++n) {
        std::int64_t g = 0;
        for (std::int64_t t = 0; t <= n; ++t) g += a * t + b;
        EXPECT_EQ(runCm(p, n, kCmStepBudget).c1, g) << a << "," << b << "," << n;
      }
    }
  EXPECT_THROW(linearGammaProgram(0, 1), PreconditionViolation);
}

TEST(Assembler, LabelsAndMacros) {
  CmAssembler as;
  auto done = as.newLabel();
  as.add(2, 3);
  as.zeroTest(2, as.halt(), done);
  as.bind(done);
  as.transfer(2, {{1, 2}}, as.halt());
  CmProgram p = as.assemble();
  EXPECT_EQ(runCm(p, 0, 1000).c1, 6);
  CmAssembler bad;
  auto never = bad.newLabel();
  bad.inc(1, never);
  EXPECT_THROW(bad.assemble(), PreconditionViolation);
}

TEST(History, ValidationRoundTrip) {
  for (const std::string& name : bundleNames()) {
    const CmProgram& p = bundleByName(name).gammaProg;
    for (std::int64_t n = 1; n <= 6; ++n) {
      HistoryCheck c = validateHistory(historyOf(p, n, kCmStepBudget), p);
      EXPECT_TRUE(c.valid) << name << " " << n << ": " << c.reason;
      EXPECT_EQ(c.inputN, n);
      EXPECT_EQ(c.outputC1, runCm(p, n, kCmStepBudget).c1);
    }
  }
}

TEST(History, DuplicatedDigitOrMissingHaltIsInvalid) {
  const CmProgram& p = halvesBundle().gammaProg;
  std::string h = historyOf(p, 2, kCmStepBudget);
  std::size_t two = h.find('2');
  ASSERT_NE(two, std::string::npos);
  std::string dup = h;
  dup.insert(two, "2");
  EXPECT_FALSE(validateHistory(dup, p).valid);
  EXPECT_FALSE(validateHistory("01$", p).valid);
  EXPECT_FALSE(validateHistory("0$", incrementOnce()).valid);
  EXPECT_TRUE(validateHistory("01$0011$", incrementOnce()).valid);
}
