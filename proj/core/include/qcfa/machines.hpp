#pragma once

#include <functional>
#include <string>

#include "qcfa/counter3.hpp"
#include "qcfa/engine.hpp"
#include "qcfa/tape.hpp"

namespace qcfa {

struct Contract {
  bool oneSided = true;            // inputs meeting the positive condition are never rejected
  Rational failToRejectBound{1, 8};  // bound on passing an input that violates it
  std::string timeClass;
};

struct TunedMachine {
  std::string name;
  MachinePtr spec;
  Contract contract;
  Tuning tuning;
};

// Smallest walk-pair count k such that (m+1)^(-2k) <= eps * min_{1<=d<=m}
// sin^2(d*sqrt(2)*pi) for every combined length 1 <= m <= maxM.
int eqLenWalksFor(const Rational& eps, std::int64_t maxM = 4096);
// Smallest c with 2^(-c(m+1)) <= eps * 625^(-m) for 1 <= m <= maxM.
int cEpsFor(const Rational& eps, std::int64_t maxM = 1024);
Tuning tuningFor(const Rational& eps);

using ViewSelector = std::function<SubseqView(const Tape&)>;
using SpanView = SubseqView (*)(const Tape&, const ResolvedSpan&);

// Applies a named view to a span resolved against the tape.
ViewSelector select(Span span, SpanView view);
ViewSelector fixed(SubseqView v);
ViewSelector prefixSelector();

TunedMachine eqLen(ViewSelector first, ViewSelector second, const Tuning& t, std::string name = "EqLen");
TunedMachine eqLen(SubseqView first, SubseqView second, const Tuning& t);
TunedMachine multCheck(Span span, const Tuning& t);
TunedMachine rulerCheck(Span span, const Tuning& t);
TunedMachine palIter(ViewSelector prefix, const Tuning& t);
TunedMachine atMost(Span span, CmProgram prog, const Tuning& t);
TunedMachine padCheckI(int i, const Tuning& t);
TunedMachine padCheckAlpha(CmProgram prog, const Tuning& t);
TunedMachine assembleTopLevel(const TunedMachine& pad, ViewSelector prefix, const Tuning& t);

// Lowering bodies shared by the machines above. Each leaves the head wherever
// its last stage ended.
void lowerMult(Lowering& l, const ResolvedSpan& s, int k, const std::string& tag);
void lowerRuler(Lowering& l, const ResolvedSpan& s, int k, const std::string& tag);
void lowerAtMost(Lowering& l, const ResolvedSpan& s, const CmProgram& prog, int k, const std::string& tag);

// Input "1^a # 1^b" with an all-'1' second track, and the EqLen machine that
// compares the two blocks.
TwoTrackString eqLenInput(std::int64_t a, std::int64_t b);
TunedMachine eqLenOnBlocks(const Tuning& t);

}  // namespace qcfa
