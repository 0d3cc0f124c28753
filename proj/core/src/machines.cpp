#include "qcfa/machines.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <string_view>

#include "qcfa/error.hpp"

namespace qcfa {

// ---------------------------------------------------------------------------
// Tuning

int eqLenWalksFor(const Rational& eps, std::int64_t maxM) {
  static std::mutex mu;
  static std::map<std::pair<std::string, std::int64_t>, int> cache;
  const auto key = std::make_pair(eps.get_str(), maxM);
  {
    std::lock_guard<std::mutex> lock(mu);
    if (auto it = cache.find(key); it != cache.end()) return it->second;
  }
  Rational floorP;
  int k = 1;
  for (std::int64_t m = 1; m <= maxM; ++m) {
    Rational p = sinSquaredTurns(m, 64).lo();
    if (m == 1 || p < floorP) floorP = p;
    const Rational need = 1 / (eps * floorP);
    const Integer base = Integer(static_cast<long>(m + 1));
    while (Rational(ipow(base, 2UL * static_cast<unsigned long>(k))) < need) ++k;
  }
  std::lock_guard<std::mutex> lock(mu);
  cache[key] = k;
  return k;
}

int cEpsFor(const Rational& eps, std::int64_t maxM) {
  int c = 1;
  for (std::int64_t m = 1; m <= maxM; ++m) {
    const Rational need = Rational(ipow(Integer(625), static_cast<unsigned long>(m))) / eps;
    while (Rational(ipow(Integer(2), static_cast<unsigned long>(c) * static_cast<unsigned long>(m + 1))) < need) ++c;
  }
  return c;
}

Tuning tuningFor(const Rational& eps) {
  if (eps <= 0 || eps >= Rational(1, 2)) throw PreconditionViolation("epsilon must lie in (0, 1/2)");
  Tuning t;
  t.epsilon = eps;
  t.k = eqLenWalksFor(eps);
  t.cEps = cEpsFor(eps);
  return t;
}

// ---------------------------------------------------------------------------
// Selectors

ViewSelector select(Span span, SpanView view) {
  return [span = std::move(span), view](const Tape& w) { return view(w, resolve(*w, span)); };
}

ViewSelector fixed(SubseqView v) {
  return [v = std::move(v)](const Tape&) { return v; };
}

ViewSelector prefixSelector() {
  return [](const Tape& w) { return views::pre(w); };
}

namespace {

using Kind = MachineSpec::Kind;

std::string_view contents(const TwoTrackString& w, const ResolvedSpan& s) {
  if (s.right - s.left <= 1) return {};
  return std::string_view(w.track(s.track)).substr(static_cast<std::size_t>(s.left), static_cast<std::size_t>(s.right - s.left - 1));
}

bool onlyOf(std::string_view s, std::string_view allowed) {
  return s.find_first_not_of(allowed) == std::string_view::npos;
}

// (1+ (#1+)+): a block of ones followed by at least one '#'-led block.
bool rulerSegmentShape(std::string_view s) {
  if (s.empty() || s.front() != '1' || s.back() != '1' || !onlyOf(s, "1#")) return false;
  if (s.find('#') == std::string_view::npos) return false;
  return s.find("##") == std::string_view::npos;
}

std::vector<std::int64_t> positionsOf(const TwoTrackString& w, Track t, std::int64_t left, std::int64_t right,
                                      char sym) {
  std::vector<std::int64_t> out;
  for (std::int64_t p = left + 1; p < right; ++p) {
    if (w.at(t, p) == sym) out.push_back(p);
  }
  return out;
}

Contract standardContract(const Tuning& t, std::string timeClass) {
  return Contract{true, t.epsilon, std::move(timeClass)};
}

TunedMachine procedure(std::string name, const Tuning& t, std::string timeClass, MachineSpec::LowerFn fn) {
  auto spec = MachineSpec::atomic(Kind::Procedure, name, t, std::move(fn));
  return TunedMachine{std::move(name), std::move(spec), standardContract(t, std::move(timeClass)), t};
}

}  // namespace

// ---------------------------------------------------------------------------
// Lowering bodies

void lowerMult(Lowering& l, const ResolvedSpan& s, int k, const std::string& tag) {
  const TwoTrackString& w = l.w();
  const std::string_view text = contents(w, s);
  const bool ok = !text.empty() && text.front() == '#' && text.back() == '1' && onlyOf(text, "#1") &&
                  text.find("##") == std::string_view::npos;
  l.moveTo(s.left);
  if (!l.sweep(ok, tag + ": shape (#1+)+", s.right)) return;
  const auto hashes = positionsOf(w, s.track, s.left, s.right, '#');
  for (std::size_t t = 0; t + 1 < hashes.size(); ++t) {
    const std::int64_t end = t + 2 < hashes.size() ? hashes[t + 2] : s.right;
    l.eqLen(SubseqView(l.tape(), hashes[t], hashes[t + 1], "1", s.track),
            SubseqView(l.tape(), hashes[t + 1], end, "1", s.track), k,
            tag + ": block " + std::to_string(t + 1) + " vs " + std::to_string(t + 2));
  }
}

void lowerRuler(Lowering& l, const ResolvedSpan& s, int k, const std::string& tag) {
  const TwoTrackString& w = l.w();
  const std::string_view text = contents(w, s);

  // Segment bounds: the span edges and every '$' between them.
  std::vector<std::int64_t> bounds{s.left};
  for (auto p : positionsOf(w, s.track, s.left, s.right, '$')) bounds.push_back(p);
  bounds.push_back(s.right);
  const std::size_t segs = bounds.size() - 1;

  bool ok = onlyOf(text, "1#$");
  for (std::size_t j = 0; ok && j < segs; ++j) {
    const std::string_view seg = contents(w, {bounds[j], bounds[j + 1], s.track, 0});
    ok = rulerSegmentShape(seg);
    if (ok && j + 1 == segs) ok = seg == "1#1";
    if (ok && j + 1 < segs) ok = std::count(seg.begin(), seg.end(), '#') % 2 == 1;
  }
  l.moveTo(s.left);
  if (!l.sweep(ok, tag + ": shape", s.right)) return;

  const Tape& tape = l.tape();
  for (std::size_t j = 0; j < segs; ++j) {
    const std::int64_t a = bounds[j], b = bounds[j + 1];
    const auto hashes = positionsOf(w, s.track, a, b, '#');
    const std::string where = tag + ": segment " + std::to_string(j + 1);
    std::int64_t prev = a;
    for (std::size_t t = 0; t < hashes.size(); ++t) {
      const std::int64_t end = t + 1 < hashes.size() ? hashes[t + 1] : b;
      l.eqLen(SubseqView(tape, prev, hashes[t], "1", s.track), SubseqView(tape, hashes[t], end, "1", s.track), k,
              where + " block " + std::to_string(t + 1) + " vs " + std::to_string(t + 2));
      prev = hashes[t];
    }
    if (j + 1 == segs) continue;
    const std::int64_t c = bounds[j + 2];
    const std::int64_t nextHash = positionsOf(w, s.track, b, c, '#').front();
    l.eqLen(SubseqView(tape, a, hashes.front() - 1, "1", s.track), SubseqView(tape, b, nextHash, "1", s.track), k,
            where + " core shrinks by one");
    l.eqLen(SubseqView(tape, a, b, "#", s.track, Ordinal::Even), SubseqView(tape, b, c, "#", s.track), k,
            where + " block count halves");
  }
}

namespace {

struct HistoryBlock {
  std::int64_t left;    // exclusive bound: previous '$' or the span edge
  std::int64_t dollar;  // this block's '$'
  int state;
  std::int64_t count[4];
  std::int64_t first[4];  // position of the first digit c, or -1
};

}  // namespace

void lowerAtMost(Lowering& l, const ResolvedSpan& s, const CmProgram& prog, int k, const std::string& tag) {
  const TwoTrackString& w = l.w();
  const std::string_view text = contents(w, s);

  std::vector<HistoryBlock> blocks;
  bool ok = !text.empty();
  std::size_t i = 0;
  while (ok && i < text.size() && text[i] != '#') {
    HistoryBlock b{s.left + static_cast<std::int64_t>(i), 0, 0, {0, 0, 0, 0}, {-1, -1, -1, -1}};
    std::int64_t zeros = 0;
    while (i < text.size() && text[i] == '0') ++zeros, ++i;
    for (int d = 1; d <= 3; ++d) {
      while (i < text.size() && text[i] == static_cast<char>('0' + d)) {
        if (b.first[d] < 0) b.first[d] = s.left + 1 + static_cast<std::int64_t>(i);
        ++b.count[d], ++i;
      }
    }
    if (zeros == 0 || i >= text.size() || text[i] != '$') {
      ok = false;
      break;
    }
    b.dollar = s.left + 1 + static_cast<std::int64_t>(i);
    b.state = static_cast<int>(std::min<std::int64_t>(zeros, prog.states() + 1));
    ++i;
    blocks.push_back(b);
  }
  ok = ok && !blocks.empty() && text.find_first_not_of('#', i) == std::string_view::npos;
  l.moveTo(s.left);
  if (!l.sweep(ok, tag + ": shape (0+1*2*3*$)+#*", s.right)) return;

  // Finite-control conditions: state indices, branch choices and nonzero
  // counters where a step requires them.
  const int T = prog.states();
  const HistoryBlock& f = blocks.front();
  bool control = f.state == 1 && f.count[1] >= 1 && f.count[2] == 0 && f.count[3] == 0;
  for (std::size_t t = 0; control && t < blocks.size(); ++t) {
    const HistoryBlock& b = blocks[t];
    if (b.state > T) control = false;
    else if (t + 1 == blocks.size()) control = b.state == T;
    else if (b.state == T) control = false;
    else {
      const CmInstr& ins = prog.at(b.state);
      const HistoryBlock& nb = blocks[t + 1];
      if (ins.op == CmInstr::Op::Inc) {
        control = nb.state == ins.next && nb.count[ins.counter] > 0;
      } else {
        control = b.count[ins.counter] > 0 && nb.state == (nb.count[ins.counter] > 0 ? ins.nextElse : ins.next);
      }
    }
  }
  if (!l.sweep(control, tag + ": control states", s.right)) return;

  const Tape& tape = l.tape();
  for (std::size_t t = 0; t + 1 < blocks.size(); ++t) {
    const HistoryBlock& a = blocks[t];
    const HistoryBlock& b = blocks[t + 1];
    const CmInstr& ins = prog.at(a.state);
    for (int c = 1; c <= 3; ++c) {
      const std::string digit(1, static_cast<char>('0' + c));
      std::int64_t aLeft = a.left, bLeft = b.left;
      // The changed counter is compared with its first digit dropped on the larger side.
      if (c == ins.counter) {
        if (ins.op == CmInstr::Op::Inc) {
          bLeft = b.first[c];
        } else {
          aLeft = a.first[c];
        }
      }
      l.eqLen(SubseqView(tape, aLeft, a.dollar, digit, s.track), SubseqView(tape, bLeft, b.dollar, digit, s.track), k,
              tag + ": step " + std::to_string(t + 1) + " counter " + std::to_string(c));
    }
  }
}

// ---------------------------------------------------------------------------
// Machines

TunedMachine eqLen(ViewSelector first, ViewSelector second, const Tuning& t, std::string name) {
  auto spec = MachineSpec::atomic(Kind::AtomicQuantum, name, t,
                                  [first = std::move(first), second = std::move(second), k = t.k,
                                   label = name](Lowering& l) {
                                    l.eqLen(first(l.tape()), second(l.tape()), k, label);
                                    l.moveTo(0);
                                  });
  return TunedMachine{std::move(name), std::move(spec),
                      standardContract(t, "expected O(n (|S1|+|S2|+2)^(2k+1)) head moves"), t};
}

TunedMachine eqLen(SubseqView first, SubseqView second, const Tuning& t) {
  return eqLen(fixed(std::move(first)), fixed(std::move(second)), t);
}

TunedMachine multCheck(Span span, const Tuning& t) {
  return procedure("Mult", t, "expected polynomial in n", [span = std::move(span), k = t.k](Lowering& l) {
    lowerMult(l, resolve(l.w(), span), k, "Mult");
    l.moveTo(0);
  });
}

TunedMachine rulerCheck(Span span, const Tuning& t) {
  return procedure("Ruler", t, "expected polynomial in n", [span = std::move(span), k = t.k](Lowering& l) {
    lowerRuler(l, resolve(l.w(), span), k, "Ruler");
    l.moveTo(0);
  });
}

TunedMachine atMost(Span span, CmProgram prog, const Tuning& t) {
  return procedure("AtMost", t, "expected polynomial in n",
                   [span = std::move(span), prog = std::move(prog), k = t.k](Lowering& l) {
                     lowerAtMost(l, resolve(l.w(), span), prog, k, "AtMost");
                     l.moveTo(0);
                   });
}

TunedMachine palIter(ViewSelector prefix, const Tuning& t) {
  auto spec = MachineSpec::atomic(Kind::AtomicQuantum, "PalIter", t,
                                  [prefix = std::move(prefix), c = t.cEps](Lowering& l) {
                                    SubseqView p = prefix(l.tape());
                                    for (auto pos : p.positions()) {
                                      char ch = l.w().at(p.track(), pos);
                                      if (ch != '0' && ch != '1') {
                                        l.fail("PalIter: prefix symbol outside {0,1}");
                                        return;
                                      }
                                    }
                                    l.palIter(std::move(p), c, "PalIter");
                                    l.moveTo(0);
                                  });
  Contract c{true, t.epsilon, "one iteration: O(n) head moves"};
  return TunedMachine{"PalIter", std::move(spec), c, t};
}

namespace {

// Splits track I as x * p1 % p2 % ... % pk % pad and checks per-part alphabets.
bool chainShape(const std::string& trackI, const std::vector<std::string_view>& alphabets) {
  const auto star = trackI.find('*');
  if (star == std::string::npos || !onlyOf(trackI.substr(0, star), "01")) return false;
  std::vector<std::string> parts;
  std::string cur;
  for (std::size_t i = star + 1; i < trackI.size(); ++i) {
    if (trackI[i] == '%') {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(trackI[i]);
    }
  }
  parts.push_back(cur);
  if (parts.size() != alphabets.size() + 1) return false;
  for (std::size_t j = 0; j < alphabets.size(); ++j) {
    if (parts[j].empty() || !onlyOf(parts[j], alphabets[j])) return false;
  }
  return !parts.back().empty() && onlyOf(parts.back(), "#");
}

MachinePtr shapeStage(std::string name, const Tuning& t, std::vector<std::string_view> alphabets) {
  return MachineSpec::atomic(Kind::AtomicClassical, name, t,
                             [alphabets = std::move(alphabets), name](Lowering& l) {
                               l.sweep(chainShape(l.w().track(Track::I), alphabets), name, l.w().size() + 1);
                             });
}

}  // namespace

TunedMachine padCheckI(int i, const Tuning& t) {
  if (i < 1) throw PreconditionViolation("padCheckI needs i >= 1");
  std::vector<std::string_view> alphabets(static_cast<std::size_t>(i), "#1");
  alphabets.push_back("1#$");

  const Span II = wholeTrack(Track::II);
  auto pi = [](int j) { return chainSegment(j); };
  auto named = [](std::string base, int j) { return base + "(pi_" + std::to_string(j) + ")"; };

  std::vector<MachinePtr> stages;
  stages.push_back(shapeStage("PadCheck: shape", t, alphabets));
  stages.push_back(rulerCheck(II, t).spec);
  stages.push_back(multCheck(pi(1), t).spec);
  stages.push_back(eqLen(select(pi(1), views::m1), select(pi(1), views::m2), t, named("EqLen m1 = m2 ", 1)).spec);
  stages.push_back(eqLen(select(II, views::core), select(pi(1), views::pr), t, "EqLen core(w_II) = pr(pi_1)").spec);
  for (int j = 2; j <= i; ++j) {
    stages.push_back(multCheck(pi(j), t).spec);
    stages.push_back(eqLen(select(pi(j), views::m1), select(pi(j), views::m2), t, named("EqLen m1 = m2 ", j)).spec);
    stages.push_back(eqLen(select(pi(j - 1), views::m1), select(pi(j), views::pr), t,
                           "EqLen m1(pi_" + std::to_string(j - 1) + ") = pr(pi_" + std::to_string(j) + ")")
                         .spec);
  }
  stages.push_back(rulerCheck(pi(i + 1), t).spec);
  stages.push_back(eqLen(select(pi(i + 1), views::core), select(pi(i), views::m1), t,
                         "EqLen core(pi_" + std::to_string(i + 1) + ") = m1(pi_" + std::to_string(i) + ")")
                       .spec);
  stages.push_back(eqLen(select(pi(0), views::whole), select(pi(i + 1), views::whole), t,
                         "EqLen |x| = |pi_" + std::to_string(i + 1) + "|")
                       .spec);

  std::string name = "PadCheck_" + std::to_string(i);
  return TunedMachine{name, MachineSpec::seq(name, t, std::move(stages)),
                      standardContract(t, "expected polynomial in n"), t};
}

TunedMachine padCheckAlpha(CmProgram prog, const Tuning& t) {
  const Span II = wholeTrack(Track::II);
  auto pi = [](int j) { return chainSegment(j); };

  std::vector<MachinePtr> stages;
  stages.push_back(shapeStage("PadCheck: shape", t, {"1#$", "0123$#", "#1", "1#$"}));
  stages.push_back(rulerCheck(II, t).spec);
  stages.push_back(eqLen(select(II, views::core), select(pi(1), views::whole), t, "EqLen core(w_II) = |pi_1|").spec);
  stages.push_back(rulerCheck(pi(1), t).spec);
  stages.push_back(eqLen(select(pi(1), views::core), select(pi(2), views::whole), t, "EqLen core(pi_1) = |pi_2|").spec);
  stages.push_back(atMost(pi(2), std::move(prog), t).spec);
  stages.push_back(multCheck(pi(3), t).spec);
  stages.push_back(eqLen(select(pi(3), views::m1), select(pi(2), views::inp), t, "EqLen m1(pi_3) = inp(pi_2)").spec);
  stages.push_back(eqLen(select(pi(3), views::m2), select(pi(2), views::whole), t, "EqLen m2(pi_3) = |pi_2|").spec);
  stages.push_back(rulerCheck(pi(4), t).spec);
  stages.push_back(eqLen(select(pi(3), views::pr), select(pi(4), views::core), t, "EqLen pr(pi_3) = core(pi_4)").spec);
  stages.push_back(eqLen(select(pi(0), views::whole), select(pi(4), views::whole), t, "EqLen |x| = |pi_4|").spec);

  return TunedMachine{"PadCheck_alpha", MachineSpec::seq("PadCheck_alpha", t, std::move(stages)),
                      standardContract(t, "expected polynomial in n"), t};
}

TunedMachine assembleTopLevel(const TunedMachine& pad, ViewSelector prefix, const Tuning& t) {
  const std::string name = pad.name == "PadCheck_alpha" ? "M_alpha" : "M_" + pad.name.substr(pad.name.find('_') + 1);
  auto body = MachineSpec::seq(name + " round", t, {pad.spec, palIter(std::move(prefix), t).spec});
  Contract c{true, t.epsilon, "expected polynomial in n on the padding-rejection path"};
  return TunedMachine{name, MachineSpec::forever(name, t, std::move(body)), c, t};
}

TwoTrackString eqLenInput(std::int64_t a, std::int64_t b) {
  if (a < 0 || b < 0) throw PreconditionViolation("block lengths must be non-negative");
  std::string t1 = std::string(static_cast<std::size_t>(a), '1') + "#" + std::string(static_cast<std::size_t>(b), '1');
  return TwoTrackString(t1, std::string(t1.size(), '1'));
}

TunedMachine eqLenOnBlocks(const Tuning& t) {
  auto before = [](const Tape& w) {
    std::int64_t h = findRight(*w, Track::I, 0, w->size() + 1, '#');
    if (h < 0) throw NotFound("no '#' separating the blocks");
    return SubseqView(w, 0, h, "1", Track::I);
  };
  auto after = [](const Tape& w) {
    std::int64_t h = findRight(*w, Track::I, 0, w->size() + 1, '#');
    if (h < 0) throw NotFound("no '#' separating the blocks");
    return SubseqView(w, h, w->size() + 1, "1", Track::I);
  };
  return eqLen(before, after, t);
}

}  // namespace qcfa
