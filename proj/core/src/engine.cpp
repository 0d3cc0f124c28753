#include "qcfa/engine.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "qcfa/error.hpp"

namespace qcfa {

namespace {

std::int64_t dist(std::int64_t a, std::int64_t b) { return a > b ? a - b : b - a; }

// Head moves for a trip that starts at `anchor`, covers [lo, hi] and returns.
std::int64_t roundTrip(std::int64_t anchor, std::int64_t lo, std::int64_t hi) {
  lo = std::min(lo, anchor);
  hi = std::max(hi, anchor);
  return 2 * (hi - lo);
}

}  // namespace

// ---------------------------------------------------------------------------
// Lowering

void Lowering::moveTo(std::int64_t pos) {
  if (failed() || pos == head_) return;
  if (!round_.ops.empty()) {
    if (auto* last = std::get_if<ClassicalOp>(&round_.ops.back()); last && last->label == "move") {
      last->to = pos;
      last->cost += dist(head_, pos);
      head_ = pos;
      return;
    }
  }
  round_.ops.push_back(ClassicalOp{"move", true, head_, pos, dist(head_, pos)});
  head_ = pos;
}

bool Lowering::sweep(bool ok, const std::string& label, std::int64_t farthest) {
  if (failed()) return false;
  round_.ops.push_back(ClassicalOp{label, ok, head_, head_, roundTrip(head_, head_, farthest)});
  if (!ok) {
    round_.deterministicReject = true;
    round_.firstFailure = label;
  }
  return ok;
}

void Lowering::fail(const std::string& label) { sweep(false, label, head_); }

void Lowering::eqLen(SubseqView a, SubseqView b, int k, std::string label) {
  if (failed()) return;
  round_.ops.push_back(EqLenOp{std::move(label), std::move(a), std::move(b), head_, k});
}

void Lowering::palIter(SubseqView p, int cEps, std::string label) {
  if (failed()) return;
  round_.ops.push_back(PalIterOp{std::move(label), std::move(p), head_, cEps});
}

LoweredRound Lowering::finish() {
  moveTo(0);
  return std::move(round_);
}

// ---------------------------------------------------------------------------
// MachineSpec

MachinePtr MachineSpec::atomic(Kind kind, std::string name, Tuning tuning, LowerFn fn) {
  if (kind == Kind::Seq || kind == Kind::Forever) throw PreconditionViolation("atomic() needs a leaf kind");
  return MachinePtr(new MachineSpec(kind, std::move(name), std::move(tuning), std::move(fn), {}));
}

MachinePtr MachineSpec::seq(std::string name, Tuning tuning, std::vector<MachinePtr> children) {
  return MachinePtr(new MachineSpec(Kind::Seq, std::move(name), std::move(tuning), nullptr, std::move(children)));
}

MachinePtr MachineSpec::forever(std::string name, Tuning tuning, MachinePtr body) {
  if (tuning.epsilon <= 0 || tuning.epsilon >= Rational(1, 2)) {
    throw PreconditionViolation("epsilon must lie in (0, 1/2)");
  }
  return MachinePtr(new MachineSpec(Kind::Forever, std::move(name), std::move(tuning), nullptr, {std::move(body)}));
}

void MachineSpec::lower(Lowering& l) const {
  if (l.failed()) return;
  switch (kind_) {
    case Kind::Seq:
      for (const auto& c : children_) {
        c->lower(l);
        if (l.failed()) return;
      }
      return;
    case Kind::Forever:
      children_.front()->lower(l);
      return;
    default:
      try {
        fn_(l);
      } catch (const NotFound& e) {
        l.fail(name_ + ": " + e.what());
      } catch (const InvertedBounds& e) {
        l.fail(name_ + ": " + e.what());
      }
  }
}

LoweredRound lowerRound(const MachineSpec& m, const Tape& w) {
  Lowering l(w);
  m.lower(l);
  return l.finish();
}

// ---------------------------------------------------------------------------
// Analysis

EqLenCosts eqLenCosts(const EqLenOp& op) {
  const SubseqView& s1 = op.first;
  const SubseqView& s2 = op.second;
  EqLenCosts c;
  c.m = s1.length() + s2.length();
  c.d = s1.length() - s2.length();
  const std::int64_t lo = std::min(s1.left(), s2.left());
  const std::int64_t hi = std::max(s1.right(), s2.right());
  c.quantumCost = roundTrip(op.anchor, lo, hi);

  // Virtual tape: position 0 is S1's left bound, 1..m are the members of S1
  // then S2, m+1 is S2's right bound.
  std::vector<std::int64_t> rp;
  rp.reserve(static_cast<std::size_t>(c.m) + 2);
  rp.push_back(s1.left());
  for (auto p : s1.positions()) rp.push_back(p);
  for (auto p : s2.positions()) rp.push_back(p);
  rp.push_back(s2.right());

  // Expected traversals of edge (y, y+1) for a walk started at 1 with
  // barriers 0 and N = m+1, scaled by N: (N-1) for y = 0, 1 for y = m,
  // (N-y) + (N-y-1) in between.
  const std::int64_t n = c.m + 1;
  Integer scaled = 0;
  std::uint64_t acc = 0;  // flushed into `scaled` well before it can overflow
  for (std::int64_t y = 0; y <= c.m; ++y) {
    std::int64_t weight = y == 0 ? n - 1 : (y == c.m ? 1 : 2 * (n - y) - 1);
    if (c.m == 0) weight = 0;
    acc += static_cast<std::uint64_t>(weight) * static_cast<std::uint64_t>(dist(rp[y], rp[y + 1]));
    if (acc > (std::uint64_t{1} << 62)) {
      scaled += Integer(static_cast<unsigned long>(acc));
      acc = 0;
    }
  }
  scaled += Integer(static_cast<unsigned long>(acc));
  const Integer out = Integer(static_cast<long>(n - 1)) * Integer(static_cast<long>(dist(rp[0], op.anchor))) +
                      Integer(static_cast<long>(dist(rp[static_cast<std::size_t>(c.m) + 1], op.anchor)));
  c.walkCost = Rational(Integer(static_cast<long>(dist(rp[1], op.anchor)))) +
               Rational(scaled + out, Integer(static_cast<long>(n)));
  c.walkCost.canonicalize();

  Rational inv(Integer(1), Integer(static_cast<long>(n)));
  inv.canonicalize();
  Rational geo = 0, term = 1;
  for (int j = 0; j < 2 * op.k; ++j) {
    geo += term;
    term *= inv;
  }
  c.exitCost = c.walkCost * geo;
  c.exitSuccess = term;  // inv^(2k)
  return c;
}

namespace {

RoundSummary make(const Interval& r, const Interval& a, const Interval& s, const Interval& e) {
  return RoundSummary{r, a, s, e};
}

RoundSummary summarizeEqLen(const EqLenOp& op, unsigned bits) {
  EqLenCosts c = eqLenCosts(op);
  const Rational& q = c.exitSuccess;
  const Rational& A = c.quantumCost;
  const Rational& B = c.exitCost;
  if (c.d == 0) {
    return make(Interval(Rational(0)), Interval(Rational(0)), Interval(Rational(1)), Interval(Rational((A + B) / q)));
  }
  Interval p = sinSquaredTurns(c.d, bits);
  if (p.lo() <= 0) throw PrecisionInsufficient("rotation probability not separated from 0");
  auto reject = [&](const Rational& x) { return Rational(x / (x + (1 - x) * q)); };
  auto steps = [&](const Rational& x) { return Rational((A + (1 - x) * B) / (x + (1 - x) * q)); };
  Interval r(reject(p.lo()), reject(p.hi()));
  Interval s(1 - reject(p.hi()), 1 - reject(p.lo()));
  Interval e(steps(p.hi()), steps(p.lo()));
  unsigned b = bits + 32;
  return make(r.tightened(b), Interval(Rational(0)), s.tightened(b), e.tightened(b));
}

RoundSummary summarizePal(const PalIterOp& op) {
  const std::int64_t m = op.prefix.length();
  Rational r = palRejectProbability(op.prefix.text());
  Rational a2 = pow2(-static_cast<long>(op.cEps) * (m + 1));
  Rational pc = roundTrip(op.anchor, op.prefix.left(), op.prefix.right());
  Rational keep = 1 - r;
  return make(Interval(r), Interval(Rational(keep * a2)), Interval(Rational(keep * (1 - a2))),
              Interval(Rational(2 * pc + keep * pc)));
}

}  // namespace

RoundSummary summarizeOp(const Op& op, unsigned precisionBits) {
  if (const auto* c = std::get_if<ClassicalOp>(&op)) {
    Interval zero(Rational(0)), one(Rational(1)), cost(Rational(c->cost));
    return c->pass ? make(zero, zero, one, cost) : make(one, zero, zero, cost);
  }
  if (const auto* e = std::get_if<EqLenOp>(&op)) return summarizeEqLen(*e, precisionBits);
  return summarizePal(std::get<PalIterOp>(op));
}

RoundSummary analyzeLowered(const LoweredRound& r, unsigned precisionBits) {
  const unsigned b = precisionBits + 32;
  Interval reach(Rational(1)), rej(Rational(0)), acc(Rational(0)), steps(Rational(0));
  for (const Op& op : r.ops) {
    RoundSummary s = summarizeOp(op, precisionBits);
    rej = (rej + reach * s.pReject).tightened(b);
    acc = (acc + reach * s.pAccept).tightened(b);
    steps = (steps + reach * s.eStepsRound).tightened(b);
    reach = (reach * s.pContinue).tightened(b);
  }
  return RoundSummary{rej, acc, reach, steps};
}

RoundSummary analyzeRound(const MachineSpec& m, const Tape& w, unsigned precisionBits) {
  return analyzeLowered(lowerRound(m, w), precisionBits);
}

Interval rejectProbability(const LoweredRound& r, unsigned precisionBits) {
  const unsigned b = precisionBits + 32;
  Interval reach(Rational(1)), rej(Rational(0));
  for (const Op& op : r.ops) {
    if (const auto* c = std::get_if<ClassicalOp>(&op)) {
      if (!c->pass) return (rej + reach).tightened(b);
      continue;
    }
    Interval stop;  // probability that the op rejects
    Interval keep;  // probability that the pass continues past it
    if (const auto* e = std::get_if<EqLenOp>(&op)) {
      const std::int64_t m = e->first.length() + e->second.length();
      const std::int64_t d = e->first.length() - e->second.length();
      if (d == 0) continue;
      const Interval p = sinSquaredTurns(d, precisionBits);
      if (p.lo() <= 0) throw PrecisionInsufficient("rotation probability not separated from 0");
      const Rational q = pow2(0) / Rational(ipow(Integer(static_cast<long>(m + 1)), 2UL * static_cast<unsigned long>(e->k)));
      auto reject = [&](const Rational& x) { return Rational(x / (x + (1 - x) * q)); };
      stop = Interval(reject(p.lo()), reject(p.hi()));
      keep = Interval(1 - stop.hi(), 1 - stop.lo());
    } else {
      const auto& p = std::get<PalIterOp>(op);
      const Rational x = palRejectProbability(p.prefix.text());
      const Rational a2 = pow2(-static_cast<long>(p.cEps) * (p.prefix.length() + 1));
      stop = Interval(x);
      keep = Interval(Rational((1 - x) * (1 - a2)));
    }
    rej = (rej + reach * stop).tightened(b);
    reach = (reach * keep).tightened(b);
  }
  return rej;
}

LoopResult composeLoop(const RoundSummary& rs) {
  Interval halt = rs.pAccept + rs.pReject;
  if (halt.lo() <= 0) throw NonTerminating("per-round halting probability may be 0");
  LoopResult out;
  if (halt.isPoint() && rs.pAccept.isPoint()) {
    out.pAccept = Interval(Rational(rs.pAccept.lo() / halt.lo()));
  } else {
    // pA / (pA + pR) is increasing in pA and decreasing in pR.
    Rational lo = rs.pAccept.lo() == 0 ? Rational(0) : Rational(rs.pAccept.lo() / (rs.pAccept.lo() + rs.pReject.hi()));
    Rational hi = rs.pAccept.hi() / (rs.pAccept.hi() + rs.pReject.lo());
    out.pAccept = Interval(lo, hi);
  }
  out.eRounds = Interval(Rational(1)) / halt;
  out.eSteps = out.eRounds * rs.eStepsRound;
  return out;
}

// ---------------------------------------------------------------------------
// Sampling

std::string toString(Decision d) {
  switch (d) {
    case Decision::Accept:
      return "Accept";
    case Decision::Reject:
      return "Reject";
    case Decision::SubSuccess:
      return "SubSuccess";
  }
  return "?";
}

std::uint64_t trialSeed(std::uint64_t seed, std::uint64_t i) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (i + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

struct SimClassical {
  bool pass;
  std::int64_t to;
  std::uint64_t cost;
};

struct SimEqLen {
  std::uint64_t quantumCost;
  std::vector<std::int64_t> rp;
  std::int64_t anchor;
  int walks;
  double pReject;
  std::int64_t d;
};

struct SimPal {
  std::uint64_t passCost;
  double pReject;
  std::int64_t flips;
  std::int64_t anchor;
};

using SimOp = std::variant<SimClassical, SimEqLen, SimPal>;

std::vector<SimOp> prepare(const LoweredRound& r) {
  std::vector<SimOp> out;
  out.reserve(r.ops.size());
  for (const Op& op : r.ops) {
    if (const auto* c = std::get_if<ClassicalOp>(&op)) {
      out.push_back(SimClassical{c->pass, c->to, static_cast<std::uint64_t>(c->cost)});
    } else if (const auto* e = std::get_if<EqLenOp>(&op)) {
      SimEqLen s;
      EqLenCosts costs = eqLenCosts(*e);
      s.quantumCost = static_cast<std::uint64_t>(costs.quantumCost.get_d());
      s.rp.push_back(e->first.left());
      for (auto p : e->first.positions()) s.rp.push_back(p);
      for (auto p : e->second.positions()) s.rp.push_back(p);
      s.rp.push_back(e->second.right());
      s.anchor = e->anchor;
      s.walks = 2 * e->k;
      s.d = costs.d;
      Interval p = sinSquaredTurns(costs.d, 64);
      s.pReject = Rational((p.lo() + p.hi()) / 2).get_d();
      out.push_back(std::move(s));
    } else {
      const auto& p = std::get<PalIterOp>(op);
      SimPal s;
      s.passCost = static_cast<std::uint64_t>(roundTrip(p.anchor, p.prefix.left(), p.prefix.right()));
      s.pReject = palRejectProbability(p.prefix.text()).get_d();
      s.flips = static_cast<std::int64_t>(p.cEps) * (p.prefix.length() + 1);
      s.anchor = p.anchor;
      out.push_back(s);
    }
  }
  return out;
}

class Sampler {
 public:
  explicit Sampler(std::uint64_t seed) : rng_(seed) {}
  bool bit() {
    if (left_ == 0) {
      buf_ = rng_();
      left_ = 64;
    }
    bool b = buf_ & 1U;
    buf_ >>= 1;
    --left_;
    return b;
  }
  double uniform() { return std::generate_canonical<double, 64>(rng_); }

 private:
  std::mt19937_64 rng_;
  std::uint64_t buf_ = 0;
  int left_ = 0;
};

struct CapGuard {
  std::uint64_t cap;
  std::uint64_t steps = 0;
  void add(std::uint64_t s) {
    steps += s;
    if (steps > cap) throw StepCapExceeded(cap);
  }
};

enum class EqLenEnd { Reject, Success };

EqLenEnd simulateEqLen(const SimEqLen& e, Sampler& rng, CapGuard& g) {
  const std::int64_t top = static_cast<std::int64_t>(e.rp.size()) - 1;  // m + 1
  for (;;) {
    g.add(e.quantumCost);
    if (e.d != 0 && rng.uniform() < e.pReject) return EqLenEnd::Reject;
    bool all = true;
    for (int j = 0; j < e.walks && all; ++j) {
      std::int64_t v = 1;
      g.add(static_cast<std::uint64_t>(dist(e.rp[1], e.anchor)));
      while (v > 0 && v < top) {
        std::int64_t nv = rng.bit() ? v + 1 : v - 1;
        g.add(static_cast<std::uint64_t>(dist(e.rp[static_cast<std::size_t>(nv)], e.rp[static_cast<std::size_t>(v)])));
        v = nv;
      }
      g.add(static_cast<std::uint64_t>(dist(e.rp[static_cast<std::size_t>(v)], e.anchor)));
      all = v == top;
    }
    if (all) return EqLenEnd::Success;
  }
}

RoundTrace simulateRound(const std::vector<SimOp>& ops, Sampler& rng, CapGuard& g) {
  RoundTrace t{RoundTrace::End::Continue, 0, 0, AngleIndex{}, palMatrices().start};
  std::uint64_t before = g.steps;
  for (const SimOp& op : ops) {
    if (const auto* c = std::get_if<SimClassical>(&op)) {
      g.add(c->cost);
      if (!c->pass) {
        t.end = RoundTrace::End::Reject;
        break;
      }
      t.headAtEnd = c->to;
    } else if (const auto* e = std::get_if<SimEqLen>(&op)) {
      if (simulateEqLen(*e, rng, g) == EqLenEnd::Reject) {
        t.end = RoundTrace::End::Reject;
        t.angleAtEnd.k = e->d;
        break;
      }
      // A passed measurement leaves the qubit in |0>, its initial state.
      t.headAtEnd = e->anchor;
    } else {
      const auto& p = std::get<SimPal>(op);
      g.add(2 * p.passCost);
      if (rng.uniform() < p.pReject) {
        t.end = RoundTrace::End::Reject;
        break;
      }
      g.add(p.passCost);
      t.headAtEnd = p.anchor;
      bool heads = true;
      for (std::int64_t f = 0; f < p.flips && heads; ++f) heads = rng.bit();
      if (heads) {
        t.end = RoundTrace::End::Accept;
        break;
      }
    }
  }
  t.steps = g.steps - before;
  return t;
}

Outcome runPrepared(bool loop, const std::vector<SimOp>& ops, std::uint64_t seed, const TrialOptions& opts) {
  Sampler rng(seed);
  CapGuard g{opts.stepCap};
  for (;;) {
    RoundTrace t = simulateRound(ops, rng, g);
    std::uint64_t steps = std::max<std::uint64_t>(g.steps, 1);
    if (t.end == RoundTrace::End::Reject) return {Decision::Reject, steps, seed};
    if (t.end == RoundTrace::End::Accept) return {Decision::Accept, steps, seed};
    if (!loop) return {Decision::SubSuccess, steps, seed};
  }
}

}  // namespace

RoundTrace traceRound(const LoweredRound& r, std::uint64_t seed) {
  auto ops = prepare(r);
  Sampler rng(seed);
  CapGuard g{~0ULL};
  return simulateRound(ops, rng, g);
}

Outcome runTrial(const MachineSpec& m, const Tape& w, std::uint64_t seed, TrialOptions opts) {
  auto ops = prepare(lowerRound(m, w));
  return runPrepared(m.kind() == MachineSpec::Kind::Forever, ops, seed, opts);
}

McEstimate estimateMonteCarlo(const MachineSpec& m, const Tape& w, std::uint64_t trials, std::uint64_t seed,
                              TrialOptions opts) {
  if (trials < 1) throw PreconditionViolation("trials must be at least 1");
  auto ops = prepare(lowerRound(m, w));
  const bool loop = m.kind() == MachineSpec::Kind::Forever;
  McEstimate est;
  est.trials = trials;
  est.seed = seed;
  double sum = 0, sumSq = 0;
  for (std::uint64_t i = 0; i < trials; ++i) {
    try {
      Outcome o = runPrepared(loop, ops, trialSeed(seed, i), opts);
      switch (o.verdict) {
        case Decision::Accept:
          ++est.accepts;
          break;
        case Decision::Reject:
          ++est.rejects;
          break;
        case Decision::SubSuccess:
          ++est.subSuccesses;
          break;
      }
      double s = static_cast<double>(o.realSteps);
      sum += s;
      sumSq += s * s;
    } catch (const StepCapExceeded&) {
      ++est.abandoned;
    }
  }
  const double done = static_cast<double>(trials - est.abandoned);
  if (done > 0) {
    auto rate = [&](std::uint64_t c, double& r, double& hw) {
      r = static_cast<double>(c) / done;
      hw = 1.96 * std::sqrt(r * (1 - r) / done);
    };
    rate(est.accepts, est.acceptRate, est.acceptHalfWidth95);
    rate(est.rejects, est.rejectRate, est.rejectHalfWidth95);
    rate(est.subSuccesses, est.subSuccessRate, est.subSuccessHalfWidth95);
    est.meanSteps = sum / done;
    double var = done > 1 ? std::max(0.0, (sumSq - sum * sum / done) / (done - 1)) : 0.0;
    est.meanStepsHalfWidth95 = 1.96 * std::sqrt(var / done);
  }
  return est;
}

}  // namespace qcfa
