#include <cmath>
#include <cstdlib>
#include <vector>

#include <gtest/gtest.h>

#include "qcfa/engine.hpp"
#include "qcfa/error.hpp"
#include "qcfa/machines.hpp"
#include "qcfa/padlang.hpp"

using namespace qcfa;

namespace {

const Tuning& tuning() {
  static const Tuning t = tuningFor(Rational(1, 8));
  return t;
}

std::int64_t absDiff(std::int64_t a, std::int64_t b) { return a > b ? a - b : b - a; }

// Expected head moves of one exit-test walk, by solving the absorbing chain
// E[v] = 1/2 (c(v,v+1) + E[v+1]) + 1/2 (c(v,v-1) + E[v-1]) directly with
// Gaussian elimination over the rationals.
Rational walkCostBySolve(const std::vector<std::int64_t>& rp, std::int64_t anchor) {
  const std::size_t top = rp.size() - 1;  // absorbing at 0 and top
  const std::size_t n = top - 1;         // unknowns E[1..top-1]
  if (n == 0) return Rational(absDiff(rp[1], anchor));
  std::vector<std::vector<Rational>> a(n, std::vector<Rational>(n + 1, Rational(0)));
  for (std::size_t v = 1; v <= n; ++v) {
    auto& row = a[v - 1];
    row[v - 1] = 1;
    Rational rhs = Rational(absDiff(rp[v], rp[v + 1]) + absDiff(rp[v], rp[v - 1]), 2);
    if (v + 1 <= n) row[v] -= Rational(1, 2);
    else rhs += Rational(absDiff(rp[top], anchor), 2);
    if (v - 1 >= 1) row[v - 2] -= Rational(1, 2);
    else rhs += Rational(absDiff(rp[0], anchor), 2);
    row[n] = rhs;
  }
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t piv = c;
    while (a[piv][c] == 0) ++piv;
    std::swap(a[piv], a[c]);
    for (std::size_t r = 0; r < n; ++r) {
      if (r == c || a[r][c] == 0) continue;
      Rational f = a[r][c] / a[c][c];
      for (std::size_t k = c; k <= n; ++k) a[r][k] -= f * a[c][k];
    }
  }
  Rational e1 = a[0][n] / a[0][0];
  return Rational(absDiff(rp[1], anchor)) + e1;
}

EqLenOp firstEqLen(const LoweredRound& r) {
  for (const Op& op : r.ops)
    if (const auto* e = std::get_if<EqLenOp>(&op)) return *e;
  throw std::runtime_error("no EqLen op");
}

}  // namespace

TEST(EqLenCosts, WalkCostMatchesLinearSolve) {
  TunedMachine m = eqLenOnBlocks(tuning());
  for (auto [a, b] : std::vector<std::pair<int, int>>{{1, 1}, {2, 3}, {5, 2}, {7, 7}, {0, 3}}) {
    Tape w = makeTape(eqLenInput(a, b));
    EqLenOp op = firstEqLen(lowerRound(*m.spec, w));
    std::vector<std::int64_t> rp{op.first.left()};
    for (auto p : op.first.positions()) rp.push_back(p);
    for (auto p : op.second.positions()) rp.push_back(p);
    rp.push_back(op.second.right());

    EqLenCosts c = eqLenCosts(op);
    EXPECT_EQ(c.m, a + b);
    EXPECT_EQ(c.d, a - b);
    EXPECT_EQ(c.walkCost, walkCostBySolve(rp, op.anchor)) << a << "," << b;
    const Rational inv(1, a + b + 1);
    Rational geo = 0, term = 1;
    for (int j = 0; j < 2 * op.k; ++j) geo += term, term *= inv;
    EXPECT_EQ(c.exitSuccess, term);
    EXPECT_EQ(c.exitCost, c.walkCost * geo);
  }
}

TEST(EqLenCosts, SingleWalkRightAbsorption) {
  // Gambler's ruin from 1 with barriers 0 and m+1: success 1/(m+1). Checked by
  // iterating the absorption recurrence to its fixed point numerically.
  for (int m = 1; m <= 12; ++m) {
    std::vector<double> h(static_cast<std::size_t>(m) + 2, 0.0);
    h.back() = 1.0;
    for (int it = 0; it < 200000; ++it)
      for (int v = 1; v <= m; ++v) h[static_cast<std::size_t>(v)] = 0.5 * (h[v - 1] + h[v + 1]);
    EXPECT_NEAR(h[1], 1.0 / (m + 1), 1e-9);
  }
}

TEST(Analyze, EqualLengthsNeverReject) {
  TunedMachine m = eqLenOnBlocks(tuning());
  for (int a : {1, 3, 4, 9}) {
    RoundSummary s = analyzeRound(*m.spec, makeTape(eqLenInput(a, a)));
    EXPECT_EQ(s.pReject, Interval(Rational(0)));
    EXPECT_EQ(s.pContinue, Interval(Rational(1)));
    EXPECT_TRUE(s.eStepsRound.isPoint());
  }
}

TEST(Analyze, DifferenceOneUsesSinSquared) {
  TunedMachine m = eqLenOnBlocks(tuning());
  Tape w = makeTape(eqLenInput(2, 3));
  LoweredRound r = lowerRound(*m.spec, w);
  RoundSummary s = analyzeLowered(r, 128);
  Interval p = sinSquaredTurns(1, 128);
  const Rational q = eqLenCosts(firstEqLen(r)).exitSuccess;
  auto reject = [&](const Rational& x) { return Rational(x / (x + (1 - x) * q)); };
  EXPECT_LE(s.pReject.lo(), reject(p.lo()));
  EXPECT_GE(s.pReject.hi(), reject(p.hi()));
  EXPECT_LE(Rational(1 - s.pReject.lo()), tuning().epsilon);
  Interval fast = rejectProbability(r, 128);
  EXPECT_LE(fast.lo(), s.pReject.hi());
  EXPECT_GE(fast.hi(), s.pReject.lo());
}

TEST(Analyze, SummaryIntervalsAreConsistent) {
  TunedMachine m = eqLenOnBlocks(tuning());
  for (auto [a, b] : std::vector<std::pair<int, int>>{{1, 2}, {4, 5}, {6, 1}}) {
    RoundSummary s = analyzeRound(*m.spec, makeTape(eqLenInput(a, b)));
    EXPECT_GE(s.pReject.lo(), 0);
    EXPECT_GE(s.pContinue.lo(), 0);
    EXPECT_GE(s.pReject.hi() + s.pAccept.hi() + s.pContinue.hi(), 1);
    EXPECT_LE(s.pReject.lo() + s.pAccept.lo() + s.pContinue.lo(), 1);
  }
}

TEST(ComposeLoop, GeometricClosedForm) {
  RoundSummary rs{Interval(Rational(0)), Interval(Rational(1, 32)), Interval(Rational(31, 32)),
                  Interval(Rational(100))};
  LoopResult lr = composeLoop(rs);
  EXPECT_EQ(lr.pAccept, Interval(Rational(1)));
  EXPECT_EQ(lr.eRounds, Interval(Rational(32)));
  EXPECT_EQ(lr.eSteps, Interval(Rational(3200)));

  RoundSummary half{Interval(Rational(1, 2)), Interval(Rational(1, 2)), Interval(Rational(0)), Interval(Rational(7))};
  LoopResult h = composeLoop(half);
  EXPECT_EQ(h.pAccept, Interval(Rational(1, 2)));
  EXPECT_EQ(h.eRounds, Interval(Rational(1)));

  RoundSummary stuck{Interval(Rational(0)), Interval(Rational(0)), Interval(Rational(1)), Interval(Rational(1))};
  EXPECT_THROW(composeLoop(stuck), NonTerminating);
}

TEST(ComposeLoop, IntervalInputsGiveEnclosingOutputs) {
  RoundSummary rs{Interval(Rational(1, 4), Rational(1, 3)), Interval(Rational(1, 10), Rational(1, 8)),
                  Interval(Rational(13, 24), Rational(13, 20)), Interval(Rational(10), Rational(12))};
  LoopResult lr = composeLoop(rs);
  for (Rational pr : {Rational(1, 4), Rational(1, 3)})
    for (Rational pa : {Rational(1, 10), Rational(1, 8)}) {
      EXPECT_TRUE(lr.pAccept.contains(Rational(pa / (pa + pr))));
      EXPECT_TRUE(lr.eRounds.contains(Rational(1 / (pa + pr))));
    }
}

TEST(Trials, DeterministicGivenSeed) {
  TunedMachine m = eqLenOnBlocks(tuning());
  Tape w = makeTape(eqLenInput(4, 5));
  Outcome a = runTrial(*m.spec, w, 99), b = runTrial(*m.spec, w, 99);
  EXPECT_EQ(a.verdict, b.verdict);
  EXPECT_EQ(a.realSteps, b.realSteps);
  EXPECT_EQ(a.seedUsed, 99U);
  EXPECT_GE(a.realSteps, 1U);
  EXPECT_NE(trialSeed(1, 0), trialSeed(1, 1));
}

TEST(Trials, EqualLengthsSucceed) {
  TunedMachine m = eqLenOnBlocks(tuning());
  Tape w = makeTape(eqLenInput(3, 3));
  for (std::uint64_t s = 0; s < 50; ++s) EXPECT_EQ(runTrial(*m.spec, w, s).verdict, Decision::SubSuccess);
}

TEST(Trials, StepCapAbandonsTrials) {
  TunedMachine m = eqLenOnBlocks(tuning());
  Tape w = makeTape(eqLenInput(6, 6));
  EXPECT_THROW(runTrial(*m.spec, w, 1, TrialOptions{10}), StepCapExceeded);
  McEstimate e = estimateMonteCarlo(*m.spec, w, 20, 1, TrialOptions{10});
  EXPECT_EQ(e.abandoned, 20U);
  EXPECT_EQ(e.rejects + e.accepts + e.subSuccesses, 0U);
  EXPECT_THROW(estimateMonteCarlo(*m.spec, w, 0, 1), PreconditionViolation);
}

// Empirical reject rates against the analyzer, within 4 sigma.
TEST(Trials, MonteCarloMatchesAnalyzer) {
  const std::uint64_t n = 10000;
  auto check = [&](const TunedMachine& m, const Tape& w, std::uint64_t seed) {
    RoundSummary s = analyzeRound(*m.spec, w);
    McEstimate e = estimateMonteCarlo(*m.spec, w, n, seed);
    const double lo = s.pReject.lo().get_d(), hi = s.pReject.hi().get_d();
    const double p = e.rejectRate < lo ? lo : (e.rejectRate > hi ? hi : e.rejectRate);
    const double sigma = std::sqrt(std::max(p * (1 - p), 1e-12) / static_cast<double>(n));
    EXPECT_LE(std::abs(e.rejectRate - p), 4 * sigma + 1e-12) << m.name << " rate " << e.rejectRate;
    return e;
  };
  check(eqLenOnBlocks(tuning()), makeTape(eqLenInput(1, 2)), 3);
  McEstimate e45 = check(eqLenOnBlocks(tuning()), makeTape(eqLenInput(4, 5)), 4);
  EXPECT_GE(e45.rejectRate, 1 - tuning().epsilon.get_d());

  std::string trackI = "01*#";
  Tape pal = makeTape(TwoTrackString(trackI, "1111"));
  McEstimate ep = check(palIter(prefixSelector(), tuning()), pal, 5);
  EXPECT_GT(ep.rejects, 0U);
  EXPECT_GT(ep.subSuccesses, 0U);

  Tape ruler = makeTape(TwoTrackString("11#1", "1111"));
  McEstimate er = check(rulerCheck(wholeTrack(Track::I), tuning()), ruler, 6);
  EXPECT_EQ(er.rejects, n);

  Tape mult = makeTape(TwoTrackString("#11#11", "111111"));
  McEstimate em = estimateMonteCarlo(*multCheck(wholeTrack(Track::I), tuning()).spec, mult, 1000, 7);
  EXPECT_EQ(em.subSuccesses, 1000U);
}

// One round of M_1 that neither halts nor rejects leaves the head at the left
// endmarker, the EqLen qubit at angle 0 and the palindrome register at its
// start vector.
TEST(Resetting, RoundsRestoreTheStartConfiguration) {
  auto inst = generateWellPaddedI(1, 2);
  TunedMachine m1 = assembleTopLevel(padCheckI(1, tuning()), prefixSelector(), tuning());
  LoweredRound r = lowerRound(*m1.spec, makeTape(inst.w));
  ASSERT_FALSE(r.deterministicReject);
  int continued = 0;
  for (std::uint64_t seed = 0; seed < 40; ++seed) {
    RoundTrace t = traceRound(r, seed);
    if (t.end != RoundTrace::End::Continue) continue;
    ++continued;
    EXPECT_EQ(t.headAtEnd, 0);
    EXPECT_EQ(t.angleAtEnd.k, 0);
    EXPECT_EQ(t.palStateAtEnd, palMatrices().start);
  }
  EXPECT_EQ(continued, 40);
}

// Expected real steps of one EqLen round (quantum test plus exit test) stay
// below C * n * (a + b + 2) with C = 4(k + 1).
TEST(StepAccounting, RoundCostBound) {
  TunedMachine m = eqLenOnBlocks(tuning());
  const int k = tuning().k;
  for (int a = 0; a <= 20; ++a)
    for (int b = 0; b <= 20; b += 3) {
      if (a + b == 0) continue;
      TwoTrackString w = eqLenInput(a, b);
      EqLenCosts c = eqLenCosts(firstEqLen(lowerRound(*m.spec, makeTape(w))));
      Rational bound(4 * (k + 1) * w.size() * (a + b + 2));
      EXPECT_LE(c.quantumCost + c.exitCost, bound) << a << "," << b;
    }
}
