#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "qcfa/interval.hpp"
#include "qcfa/numeric.hpp"
#include "qcfa/quantum.hpp"
#include "qcfa/tape.hpp"

namespace qcfa {

inline constexpr unsigned kDefaultPrecisionBits = 128;
inline constexpr std::uint64_t kDefaultStepCap = 10'000'000;

struct Tuning {
  Rational epsilon{1, 8};
  int k = 2;      // EqLen runs 2k gambler's-ruin walks per exit test
  int cEps = 10;  // PalIter flips cEps*(|P|+1) coins in its Acceptance Test
};

// ---------------------------------------------------------------------------
// Lowered form. A machine applied to a concrete tape unfolds into a flat list
// of operations; the trial runner and the analyzer both consume this list, so
// they charge identical costs.

struct ClassicalOp {
  std::string label;
  bool pass = true;
  std::int64_t from = 0;  // head position before
  std::int64_t to = 0;    // head position after (meaningful when pass)
  std::int64_t cost = 0;
};

struct EqLenOp {
  std::string label;
  SubseqView first;
  SubseqView second;
  std::int64_t anchor;
  int k;
};

struct PalIterOp {
  std::string label;
  SubseqView prefix;
  std::int64_t anchor;
  int cEps;
};

using Op = std::variant<ClassicalOp, EqLenOp, PalIterOp>;

struct LoweredRound {
  std::vector<Op> ops;
  bool deterministicReject = false;
  std::string firstFailure;
};

class Lowering {
 public:
  explicit Lowering(Tape tape) : tape_(std::move(tape)) {}

  const Tape& tape() const { return tape_; }
  const TwoTrackString& w() const { return *tape_; }
  std::int64_t head() const { return head_; }
  bool failed() const { return round_.deterministicReject; }

  void moveTo(std::int64_t pos);
  // A deterministic stage that scans from the head to `farthest` and back.
  bool sweep(bool ok, const std::string& label, std::int64_t farthest);
  void fail(const std::string& label);
  void eqLen(SubseqView a, SubseqView b, int k, std::string label);
  void palIter(SubseqView p, int cEps, std::string label);

  LoweredRound finish();

 private:
  Tape tape_;
  std::int64_t head_ = 0;
  LoweredRound round_;
};

// ---------------------------------------------------------------------------
// Combinator tree.

class MachineSpec;
using MachinePtr = std::shared_ptr<const MachineSpec>;

class MachineSpec {
 public:
  enum class Kind { AtomicClassical, AtomicQuantum, Procedure, Seq, Forever };
  using LowerFn = std::function<void(Lowering&)>;

  static MachinePtr atomic(Kind kind, std::string name, Tuning tuning, LowerFn fn);
  static MachinePtr seq(std::string name, Tuning tuning, std::vector<MachinePtr> children);
  static MachinePtr forever(std::string name, Tuning tuning, MachinePtr body);

  Kind kind() const { return kind_; }
  const std::string& name() const { return name_; }
  const Tuning& tuning() const { return tuning_; }
  const std::vector<MachinePtr>& children() const { return children_; }

  // Appends this node's operations for one pass; a Forever node contributes
  // the operations of a single round.
  void lower(Lowering& l) const;

 private:
  MachineSpec(Kind kind, std::string name, Tuning tuning, LowerFn fn, std::vector<MachinePtr> children)
      : kind_(kind), name_(std::move(name)), tuning_(std::move(tuning)), fn_(std::move(fn)), children_(std::move(children)) {}

  Kind kind_;
  std::string name_;
  Tuning tuning_;
  LowerFn fn_;
  std::vector<MachinePtr> children_;
};

LoweredRound lowerRound(const MachineSpec& m, const Tape& w);

// ---------------------------------------------------------------------------
// Exact analysis.

struct RoundSummary {
  Interval pReject;
  Interval pAccept;
  Interval pContinue;
  Interval eStepsRound;
};

struct LoopResult {
  Interval pAccept;
  Interval eRounds;
  Interval eSteps;
};

// Exact cost structure of one EqLen call.
struct EqLenCosts {
  std::int64_t m;         // |S1| + |S2|
  std::int64_t d;         // |S1| - |S2|, the net rotation count
  Rational quantumCost;   // head moves of the quantum test
  Rational walkCost;      // expected head moves of one walk, travel included
  Rational exitCost;      // expected head moves of the whole exit test
  Rational exitSuccess;   // (m+1)^(-2k)
};

EqLenCosts eqLenCosts(const EqLenOp& op);
RoundSummary summarizeOp(const Op& op, unsigned precisionBits);
RoundSummary analyzeLowered(const LoweredRound& r, unsigned precisionBits);
RoundSummary analyzeRound(const MachineSpec& m, const Tape& w, unsigned precisionBits = kDefaultPrecisionBits);
// pReject of analyzeLowered without the expected-step bookkeeping.
Interval rejectProbability(const LoweredRound& r, unsigned precisionBits = kDefaultPrecisionBits);
LoopResult composeLoop(const RoundSummary& rs);

// ---------------------------------------------------------------------------
// Sampling.

enum class Decision { Accept, Reject, SubSuccess };
std::string toString(Decision d);

struct Outcome {
  Decision verdict;
  std::uint64_t realSteps;
  std::uint64_t seedUsed;
};

struct TrialOptions {
  std::uint64_t stepCap = kDefaultStepCap;
};

Outcome runTrial(const MachineSpec& m, const Tape& w, std::uint64_t seed, TrialOptions opts = {});

// Configuration observed at the end of one simulated round.
struct RoundTrace {
  enum class End { Reject, Accept, Continue } end;
  std::uint64_t steps;
  std::int64_t headAtEnd;
  AngleIndex angleAtEnd;
  RationalVector palStateAtEnd;
};

RoundTrace traceRound(const LoweredRound& r, std::uint64_t seed);

struct McEstimate {
  std::uint64_t trials = 0;
  std::uint64_t accepts = 0;
  std::uint64_t rejects = 0;
  std::uint64_t subSuccesses = 0;
  std::uint64_t abandoned = 0;
  double acceptRate = 0;
  double rejectRate = 0;
  double subSuccessRate = 0;
  double meanSteps = 0;
  double acceptHalfWidth95 = 0;
  double rejectHalfWidth95 = 0;
  double subSuccessHalfWidth95 = 0;
  double meanStepsHalfWidth95 = 0;
  std::uint64_t seed = 0;
};

McEstimate estimateMonteCarlo(const MachineSpec& m, const Tape& w, std::uint64_t trials, std::uint64_t seed,
                              TrialOptions opts = {});

// Seed of trial i in a run seeded with `seed`.
std::uint64_t trialSeed(std::uint64_t seed, std::uint64_t i);

}  // namespace qcfa
