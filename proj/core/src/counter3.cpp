#include "qcfa/counter3.hpp"

#include <algorithm>
#include <sstream>

#include "qcfa/error.hpp"

namespace qcfa {

CmProgram::CmProgram(int states, std::vector<std::optional<CmInstr>> delta)
    : states_(states), delta_(std::move(delta)) {
  if (states_ < 2) throw FormatError("a counter program needs at least two states");
  delta_.resize(static_cast<std::size_t>(states_) + 1);
  for (int j = 1; j <= states_; ++j) {
    const auto& d = delta_[static_cast<std::size_t>(j)];
    if (j == states_) {
      if (d) throw FormatError("halting state " + std::to_string(j) + " must have no action");
      continue;
    }
    if (!d) throw FormatError("state " + std::to_string(j) + " has no action");
    if (d->counter < 1 || d->counter > 3) throw FormatError("state " + std::to_string(j) + ": counter must be 1..3");
    auto inRange = [&](int s) { return s >= 1 && s <= states_; };
    if (!inRange(d->next) || (d->op == CmInstr::Op::Dec && !inRange(d->nextElse))) {
      throw FormatError("state " + std::to_string(j) + " refers to a state outside 1.." + std::to_string(states_));
    }
  }
  if (delta_[1]->op != CmInstr::Op::Inc) throw FormatError("state 1 must carry an INC action");
}

CmProgram CmProgram::parse(std::string_view text) {
  std::istringstream in{std::string(text)};
  std::string line;
  int states = -1;
  std::vector<std::optional<CmInstr>> delta;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    auto hash = line.find(';');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    auto bad = [&](const std::string& why) {
      return FormatError(".cm3 line " + std::to_string(lineNo) + ": " + why);
    };
    if (states < 0) {
      if (first != "states" || !(ls >> states)) throw bad("expected 'states T'");
      delta.assign(static_cast<std::size_t>(std::max(states, 0)) + 1, std::nullopt);
      continue;
    }
    int j = 0;
    try {
      j = std::stoi(first);
    } catch (const std::exception&) {
      throw bad("expected a state index");
    }
    std::string op;
    CmInstr ins{};
    if (!(ls >> op >> ins.counter >> ins.next)) throw bad("truncated instruction");
    if (op == "INC") {
      ins.op = CmInstr::Op::Inc;
      ins.nextElse = ins.next;
    } else if (op == "DEC") {
      ins.op = CmInstr::Op::Dec;
      if (!(ls >> ins.nextElse)) throw bad("DEC needs two successor states");
    } else {
      throw bad("unknown action '" + op + "'");
    }
    std::string extra;
    if (ls >> extra) throw bad("trailing text '" + extra + "'");
    if (j < 1 || j > states) throw bad("state index out of range");
    if (delta[static_cast<std::size_t>(j)]) throw bad("state " + std::to_string(j) + " defined twice");
    delta[static_cast<std::size_t>(j)] = ins;
  }
  if (states < 0) throw FormatError(".cm3: missing 'states T' header");
  return CmProgram(states, std::move(delta));
}

std::string CmProgram::format() const {
  std::ostringstream out;
  out << "states " << states_ << "\n";
  for (int j = 1; j < states_; ++j) {
    const CmInstr& d = at(j);
    if (d.op == CmInstr::Op::Inc) {
      out << j << " INC " << d.counter << " " << d.next << "\n";
    } else {
      out << j << " DEC " << d.counter << " " << d.next << " " << d.nextElse << "\n";
    }
  }
  return out.str();
}

std::string CmConfig::encode() const {
  std::string s;
  s.reserve(static_cast<std::size_t>(encodedLength()));
  s.append(static_cast<std::size_t>(state), '0');
  s.append(static_cast<std::size_t>(c1), '1');
  s.append(static_cast<std::size_t>(c2), '2');
  s.append(static_cast<std::size_t>(c3), '3');
  s.push_back('$');
  return s;
}

CmConfig stepCm(const CmProgram& prog, const CmConfig& c) {
  if (prog.halting(c.state)) throw IllegalTransition("no step from the halting state");
  const CmInstr& d = prog.at(c.state);
  CmConfig n = c;
  std::int64_t& v = d.counter == 1 ? n.c1 : d.counter == 2 ? n.c2 : n.c3;
  if (d.op == CmInstr::Op::Inc) {
    ++v;
    n.state = d.next;
  } else {
    if (v == 0) throw IllegalTransition("DEC on an empty counter in state " + std::to_string(c.state));
    --v;
    n.state = v == 0 ? d.next : d.nextElse;
  }
  return n;
}

namespace {

template <typename Visit>
CmConfig drive(const CmProgram& prog, std::int64_t n, std::uint64_t maxSteps, Visit&& visit) {
  if (maxSteps < 1) throw PreconditionViolation("maxSteps must be at least 1");
  if (n < 0) throw PreconditionViolation("counter machine input must be non-negative");
  CmConfig c{1, n, 0, 0};
  visit(c);
  for (std::uint64_t s = 0; !prog.halting(c.state); ++s) {
    if (s >= maxSteps) {
      throw StepLimit("counter machine did not halt within " + std::to_string(maxSteps) + " steps");
    }
    c = stepCm(prog, c);
    visit(c);
  }
  return c;
}

}  // namespace

CmConfig runCm(const CmProgram& prog, std::int64_t n, std::uint64_t maxSteps) {
  return drive(prog, n, maxSteps, [](const CmConfig&) {});
}

std::string historyOf(const CmProgram& prog, std::int64_t n, std::uint64_t maxSteps) {
  std::string h;
  drive(prog, n, maxSteps, [&](const CmConfig& c) { h += c.encode(); });
  return h;
}

std::int64_t historyLength(const CmProgram& prog, std::int64_t n, std::uint64_t maxSteps) {
  std::int64_t len = 0;
  drive(prog, n, maxSteps, [&](const CmConfig& c) { len += c.encodedLength(); });
  return len;
}

HistoryCheck validateHistory(std::string_view s, const CmProgram& prog) {
  HistoryCheck r;
  auto fail = [&](std::string why) {
    r.valid = false;
    r.reason = std::move(why);
    return r;
  };
  if (s.empty() || s.back() != '$') return fail("history must end with '$'");
  std::vector<CmConfig> blocks;
  std::size_t i = 0;
  while (i < s.size()) {
    CmConfig c{0, 0, 0, 0};
    std::int64_t* slots[4] = {nullptr, &c.c1, &c.c2, &c.c3};
    std::int64_t zeros = 0;
    while (i < s.size() && s[i] == '0') ++zeros, ++i;
    if (zeros == 0) return fail("configuration " + std::to_string(blocks.size()) + " has no state digits");
    if (zeros > prog.states()) return fail("state index exceeds the program's state count");
    c.state = static_cast<int>(zeros);
    for (int d = 1; d <= 3; ++d) {
      while (i < s.size() && s[i] == static_cast<char>('0' + d)) ++*slots[d], ++i;
    }
    if (i >= s.size() || s[i] != '$') return fail("malformed configuration " + std::to_string(blocks.size()));
    ++i;
    blocks.push_back(c);
  }
  const CmConfig& first = blocks.front();
  if (first.state != 1 || first.c1 < 1 || first.c2 != 0 || first.c3 != 0) {
    return fail("first configuration is not an initial configuration 0 1^n $ with n >= 1");
  }
  for (std::size_t t = 0; t + 1 < blocks.size(); ++t) {
    CmConfig expect;
    try {
      expect = stepCm(prog, blocks[t]);
    } catch (const IllegalTransition& e) {
      return fail("step " + std::to_string(t) + ": " + e.what());
    }
    if (!(expect == blocks[t + 1])) return fail("step " + std::to_string(t) + " is not a legal transition");
  }
  if (!prog.halting(blocks.back().state)) return fail("last configuration is not halting");
  r.valid = true;
  r.inputN = first.c1;
  r.outputC1 = blocks.back().c1;
  return r;
}

// ---------------------------------------------------------------------------
// Assembler

CmAssembler::Label CmAssembler::newLabel() {
  labelAt_.push_back(-1);
  return static_cast<Label>(labelAt_.size()) - 1;
}

void CmAssembler::bind(Label l) {
  if (l <= 0 || l >= static_cast<Label>(labelAt_.size())) throw PreconditionViolation("unknown label");
  if (labelAt_[static_cast<std::size_t>(l)] >= 0) throw PreconditionViolation("label bound twice");
  labelAt_[static_cast<std::size_t>(l)] = static_cast<int>(code_.size());
}

void CmAssembler::inc(int counter, Label next) { code_.push_back({CmInstr::Op::Inc, counter, next, next}); }

void CmAssembler::dec(int counter, Label ifZero, Label ifPositive) {
  code_.push_back({CmInstr::Op::Dec, counter, ifZero, ifPositive});
}

void CmAssembler::add(int counter, int times, Label next) {
  for (int i = 0; i < times; ++i) inc(counter, i + 1 == times ? next : kNext);
}

void CmAssembler::transfer(int src, const std::vector<std::pair<int, int>>& adds, Label done) {
  Label loop = newLabel(), last = newLabel();
  bind(loop);
  dec(src, last);
  // The unit just removed is credited on both branches.
  auto credit = [&](Label after) {
    int total = 0;
    for (const auto& [dst, times] : adds) total += times;
    if (total == 0) throw PreconditionViolation("transfer needs at least one increment");
    int emitted = 0;
    for (const auto& [dst, times] : adds) {
      for (int k = 0; k < times; ++k) inc(dst, ++emitted == total ? after : kNext);
    }
  };
  credit(loop);
  bind(last);
  credit(done);
}

void CmAssembler::zeroTest(int counter, Label ifZero, Label ifPositive) {
  inc(counter);
  dec(counter, ifZero, ifPositive);
}

CmProgram CmAssembler::assemble() const {
  const int haltState = static_cast<int>(code_.size()) + 1;
  auto target = [&](Label l, std::size_t at) {
    if (l == kNext) return static_cast<int>(at) + 2;
    if (l == 0) return haltState;
    int pos = labelAt_[static_cast<std::size_t>(l)];
    if (pos < 0) throw PreconditionViolation("label used but never bound");
    return pos == static_cast<int>(code_.size()) ? haltState : pos + 1;
  };
  std::vector<std::optional<CmInstr>> delta(static_cast<std::size_t>(haltState) + 1);
  for (std::size_t i = 0; i < code_.size(); ++i) {
    const Pending& p = code_[i];
    delta[i + 1] = CmInstr{p.op, p.counter, target(p.a, i), target(p.b, i)};
  }
  return CmProgram(haltState, std::move(delta));
}

CmProgram linearGammaProgram(int a, int b) {
  if (a < 1 || b < 1) throw PreconditionViolation("linear gamma program needs a, b >= 1");
  // C1 holds t, C2 accumulates, C3 parks t while its contribution is added.
  CmAssembler as;
  auto xfer = as.newLabel(), back = as.newLabel(), dect = as.newLabel(), fin = as.newLabel();
  auto lastTerm = as.newLabel(), moreTerms = as.newLabel();
  as.add(2, b);  // constant part of the term for t = n; state 1 is an INC
  as.zeroTest(1, fin, xfer);
  as.bind(xfer);
  as.transfer(1, {{3, 1}, {2, a}}, back);
  as.bind(back);
  as.transfer(3, {{1, 1}}, dect);
  as.bind(dect);
  as.dec(1, lastTerm, moreTerms);
  as.bind(lastTerm);
  as.add(2, b, fin);
  as.bind(moreTerms);
  as.add(2, b, xfer);
  as.bind(fin);
  as.transfer(2, {{1, 1}}, as.halt());
  return as.assemble();
}

// ---------------------------------------------------------------------------
// Bundles

std::int64_t betaByEnumeration(const std::function<std::int64_t(std::int64_t)>& alpha, std::int64_t t) {
  if (alpha(0) > t) return 0;
  std::int64_t m = 0;
  while (alpha(m + 1) <= t) {
    if (++m > 1'000'000'000) throw StepLimit("beta enumeration did not terminate; alpha may be bounded");
  }
  return m;
}

AlphaBundle verifyBundle(AlphaBundle b, std::int64_t maxN) {
  std::int64_t gamma = 0, prevLen = -1, prevAlpha = b.alpha(0);
  for (std::int64_t n = 0; n <= maxN; ++n) {
    gamma += betaByEnumeration(b.alpha, n);
    CmConfig out = runCm(b.gammaProg, n, kCmStepBudget);
    if (out.c1 != gamma) {
      throw RangeUnverified(b.name + ": gammaProg(" + std::to_string(n) + ") = " + std::to_string(out.c1) +
                            ", expected " + std::to_string(gamma));
    }
    std::int64_t len = historyLength(b.gammaProg, n, kCmStepBudget);
    if (len <= prevLen) throw RangeUnverified(b.name + ": history length not increasing at " + std::to_string(n));
    prevLen = len;
    std::int64_t a = b.alpha(n);
    if (a < prevAlpha) throw RangeUnverified(b.name + ": alpha decreases at " + std::to_string(n));
    if (n >= 1 && a >= n) throw RangeUnverified(b.name + ": alpha(n) < n fails at " + std::to_string(n));
    prevAlpha = a;
  }
  b.verifiedMax = maxN;
  return b;
}

const AlphaBundle& halvesBundle() {
  static const AlphaBundle b = verifyBundle(
      AlphaBundle{"halves", [](std::int64_t n) { return n / 2; }, linearGammaProgram(2, 1), -1}, 64);
  return b;
}

const AlphaBundle& thirdsBundle() {
  static const AlphaBundle b = verifyBundle(
      AlphaBundle{"thirds", [](std::int64_t n) { return n / 3; }, linearGammaProgram(3, 2), -1}, 64);
  return b;
}

std::vector<std::string> bundleNames() { return {"halves", "thirds"}; }

const AlphaBundle& bundleByName(std::string_view name) {
  if (name == "halves") return halvesBundle();
  if (name == "thirds") return thirdsBundle();
  throw PreconditionViolation("unknown bundle '" + std::string(name) + "' (expected halves or thirds)");
}

SlowTables slowTables(const AlphaBundle& bundle, std::int64_t maxN) {
  if (maxN > bundle.verifiedMax) {
    throw RangeUnverified("bundle " + bundle.name + " is verified only up to " + std::to_string(bundle.verifiedMax));
  }
  SlowTables t;
  std::int64_t gamma = 0;
  for (std::int64_t n = 0; n <= maxN; ++n) {
    t.beta.push_back(betaByEnumeration(bundle.alpha, n));
    gamma += t.beta.back();
    t.gamma.push_back(gamma);
    t.histLen.push_back(historyLength(bundle.gammaProg, n, kCmStepBudget));
  }
  for (std::int64_t n = 0; n <= maxN; ++n) {
    std::int64_t best = 0;
    for (std::int64_t m = 0; m <= maxN; ++m) {
      if (t.histLen[static_cast<std::size_t>(m)] <= n) best = m;
    }
    t.underAlpha.push_back(best);
  }
  return t;
}

}  // namespace qcfa
