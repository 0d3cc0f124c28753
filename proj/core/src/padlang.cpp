#include "qcfa/padlang.hpp"

#include <algorithm>
#include <cmath>

#include "qcfa/error.hpp"

namespace qcfa {

namespace {

// Exponents above this stay symbolic; loInv(4096) already has ~4110 bits.
constexpr long kExactLoInvLimit = 4096;

std::string buildRuler(std::int64_t q) {
  std::string s;
  for (std::int64_t t = q; t >= 1; --t) {
    const std::string block(static_cast<std::size_t>(t), '1');
    s += block;
    const std::int64_t blocks = std::int64_t{1} << t;
    for (std::int64_t b = 1; b < blocks; ++b) {
      s.push_back('#');
      s += block;
    }
    if (t > 1) s.push_back('$');
  }
  return s;
}

bool allOf(std::string_view s, std::string_view alphabet) {
  return s.find_first_not_of(alphabet) == std::string_view::npos;
}

// Block length a and block count b when s = (#1^a)^b with a, b >= 1.
std::optional<std::pair<std::int64_t, std::int64_t>> multProof(std::string_view s) {
  if (s.empty() || s.front() != '#' || !allOf(s, "#1")) return std::nullopt;
  std::int64_t a = -1, b = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    ++i;  // the '#'
    std::int64_t run = 0;
    while (i < s.size() && s[i] == '1') ++run, ++i;
    if (run == 0 || (a >= 0 && run != a)) return std::nullopt;
    a = run;
    ++b;
  }
  return std::make_pair(a, b);
}

struct Chain {
  std::string x;                   // track I left of '*'
  std::vector<std::string> parts;  // pi_1, ..., pad
};

std::optional<Chain> splitChain(const std::string& trackI) {
  const auto star = trackI.find('*');
  if (star == std::string::npos) return std::nullopt;
  Chain c;
  c.x = trackI.substr(0, star);
  std::string cur;
  for (std::size_t i = star + 1; i < trackI.size(); ++i) {
    if (trackI[i] == '%') {
      c.parts.push_back(cur);
      cur.clear();
    } else {
      cur.push_back(trackI[i]);
    }
  }
  c.parts.push_back(cur);
  return c;
}

bool shapeOf(const Chain& c, const std::vector<std::string_view>& alphabets, std::string& why) {
  if (!allOf(c.x, "01")) {
    why = "prefix contains symbols outside {0,1}";
    return false;
  }
  if (c.parts.size() != alphabets.size() + 1) {
    why = "expected " + std::to_string(alphabets.size()) + " proofs, found " + std::to_string(c.parts.size() - 1);
    return false;
  }
  for (std::size_t j = 0; j < alphabets.size(); ++j) {
    if (c.parts[j].empty() || !allOf(c.parts[j], alphabets[j])) {
      why = "pi_" + std::to_string(j + 1) + " is empty or uses symbols outside {" + std::string(alphabets[j]) + "}";
      return false;
    }
  }
  if (c.parts.back().empty() || !allOf(c.parts.back(), "#")) {
    why = "padding is not #^+";
    return false;
  }
  return true;
}

Integer toInteger(std::int64_t v) { return Integer(static_cast<long>(v)); }

}  // namespace

Integer loInv(const Integer& q) {
  if (q < 1) throw PreconditionViolation("loInv needs q >= 1");
  if (q > 1 << 24) throw TooLarge("loInv(" + toString(q) + ") is too large to write down");
  Integer r = q;
  r <<= static_cast<mp_bitcnt_t>(q.get_ui() + 1);
  return r - 1;
}

Integer lo(const Integer& n) {
  if (n >= 1) {
    const auto bits = static_cast<unsigned long>(mpz_sizeinbase(n.get_mpz_t(), 2));
    for (unsigned long q = 1; q <= bits; ++q) {
      Integer v = loInv(Integer(q));
      if (v == n) return Integer(q);
      if (v > n) break;
    }
  }
  throw NotInDomain(toString(n) + " is not a ruler length");
}

std::string rulerString(int i) {
  if (i < 1) throw PreconditionViolation("ruler index must be at least 1");
  if (i > 14) throw TooLarge("r_" + std::to_string(i) + " exceeds the materialization bound (i <= 14)");
  return buildRuler(i);
}

std::optional<std::int64_t> rulerIndex(std::string_view s) {
  std::vector<std::string_view> segs;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= s.size(); ++i) {
    if (i == s.size() || s[i] == '$') {
      segs.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  const auto q = static_cast<std::int64_t>(segs.size());
  if (q > 40) return std::nullopt;
  for (std::int64_t j = 0; j < q; ++j) {
    const std::int64_t t = q - j;
    const std::string_view seg = segs[static_cast<std::size_t>(j)];
    if (static_cast<std::int64_t>(seg.size()) != (t + 1) * (std::int64_t{1} << t) - 1) return std::nullopt;
    for (std::size_t p = 0; p < seg.size(); ++p) {
      const bool hashSlot = (p + 1) % static_cast<std::size_t>(t + 1) == 0;
      if (seg[p] != (hashSlot ? '#' : '1')) return std::nullopt;
    }
  }
  return q;
}

BigLength BigLength::loInvOf(const Integer& q) {
  if (q <= kExactLoInvLimit) return of(loInv(q));
  return BigLength{std::nullopt, "loInv(" + qcfa::toString(q) + ")"};
}

const BigLength& PadPlan::length(const std::string& name) const {
  for (const auto& [k, v] : components) {
    if (k == name) return v;
  }
  throw NotFound("plan has no component '" + name + "'");
}

namespace {

// Fills pad, layoutFits and feasible from the components listed so far.
void closePlan(PadPlan& p, const Integer& used) {
  if (p.n.exact) {
    Integer pad = *p.n.exact - used;
    p.components.emplace_back("pad", BigLength::of(pad));
    p.layoutFits = pad >= 1;
    p.feasible = p.layoutFits && *p.n.exact <= kMaterializeLimit;
    if (!p.layoutFits) p.note = "components need " + toString(used) + " cells but n = " + p.n.toString();
    else if (!p.feasible) p.note = "n exceeds the materialization limit";
  } else {
    // loInv of the ruler index dwarfs every other component once it is symbolic.
    p.components.emplace_back("pad", BigLength{std::nullopt, p.n.symbolic + " - " + toString(used)});
    p.layoutFits = true;
    p.feasible = false;
    p.note = "n is symbolic; materialization refused";
  }
}

}  // namespace

PadPlan planI(int i, std::int64_t l) {
  if (i < 1 || l < 2) throw PreconditionViolation("family I plans need i >= 1 and l >= 2");
  if (l > kExactLoInvLimit || i > 16 ||
      static_cast<double>(1UL << i) * std::log2(static_cast<double>(l)) > 65536.0) {
    throw TooLarge("level " + std::to_string(l) + " at i = " + std::to_string(i) + " is out of range");
  }
  PadPlan p;
  p.family = PadPlan::Family::I;
  p.i = i;
  p.level = l;
  const Integer L = toInteger(l);
  const Integer core = ipow(L, 1UL << i);
  p.rulerIndex = BigLength::of(core);
  p.n = BigLength::loInvOf(core);

  const Integer xLen = loInv(L);
  Integer used = xLen + 1 + (i + 1);
  p.components.emplace_back("x", BigLength::of(xLen));
  for (int j = 1; j <= i; ++j) {
    const Integer a = ipow(L, 1UL << (i - j));
    p.components.emplace_back("pi_" + std::to_string(j), BigLength::of(a * (a + 1)));
    used += a * (a + 1);
  }
  p.components.emplace_back("pi_" + std::to_string(i + 1), BigLength::of(xLen));
  used += xLen;
  closePlan(p, used);
  return p;
}

PaddedInstance generateWellPaddedI(int i, std::int64_t l, std::optional<std::string> prefix, std::int64_t maxCells) {
  PadPlan plan = planI(i, l);
  if (!plan.layoutFits) throw Infeasible(plan.note);
  if (!plan.n.exact || *plan.n.exact > maxCells) {
    throw TooLarge("instance length " + plan.n.toString() + " exceeds " + std::to_string(maxCells));
  }
  const auto xLen = static_cast<std::size_t>(plan.length("x").exact->get_si());
  std::string x;
  if (prefix) {
    if (prefix->size() != xLen || !allOf(*prefix, "01")) {
      throw PreconditionViolation("prefix must be a {0,1}-string of length " + std::to_string(xLen));
    }
    x = *prefix;
  } else {
    const std::size_t j = xLen / 2;
    x = std::string(j, '0') + "1" + std::string(j, '0');
  }

  std::string t1 = x + "*";
  for (int j = 1; j <= i; ++j) {
    const std::int64_t a = ipow(toInteger(l), 1UL << (i - j)).get_si();
    std::string block = "#" + std::string(static_cast<std::size_t>(a), '1');
    for (std::int64_t b = 0; b < a; ++b) t1 += block;
    t1 += "%";
  }
  t1 += buildRuler(l) + "%";
  t1 += std::string(static_cast<std::size_t>(plan.length("pad").exact->get_si()), '#');
  std::string t2 = buildRuler(plan.rulerIndex.exact->get_si());
  if (t1.size() != t2.size()) throw Error("internal: generated tracks disagree in length");
  return PaddedInstance{TwoTrackString(std::move(t1), std::move(t2)), std::move(plan)};
}

std::optional<Integer> fIEval(int i, const Integer& n) {
  if (i < 1 || i > 62 || n < 1) return std::nullopt;
  Integer q;
  try {
    q = lo(n);
  } catch (const NotInDomain&) {
    return std::nullopt;
  }
  Integer root;
  const int exact = mpz_root(root.get_mpz_t(), q.get_mpz_t(), 1UL << i);
  if (!exact || root < 2) return std::nullopt;
  return loInv(root);
}

Verdict membershipOracle(const TwoTrackString& w, const Family& family) {
  Verdict v;
  auto chain = splitChain(w.track(Track::I));
  if (!chain) {
    v.firstViolation = "track I has no '*'";
    return v;
  }
  const std::string& x = chain->x;
  v.prefixPalindrome = allOf(x, "01") && std::equal(x.begin(), x.end(), x.rbegin());

  auto violation = [&](std::string why) {
    v.wellPadded = false;
    if (v.firstViolation.empty()) v.firstViolation = std::move(why);
  };

  if (const auto* fi = std::get_if<FamilyI>(&family)) {
    std::vector<std::string_view> alphabets(static_cast<std::size_t>(fi->i), "#1");
    alphabets.push_back("1#$");
    v.shapeOK = shapeOf(*chain, alphabets, v.firstViolation);
    if (v.shapeOK) {
      v.wellPadded = true;
      const auto q = rulerIndex(w.track(Track::II));
      if (!q) violation("track II is not a ruler string");
      std::int64_t prevCount = q.value_or(-1);
      for (int j = 1; v.wellPadded && j <= fi->i; ++j) {
        const auto mp = multProof(chain->parts[static_cast<std::size_t>(j - 1)]);
        const std::string name = "pi_" + std::to_string(j);
        if (!mp) violation(name + " is not a multiplication proof (#1^a)^b");
        else if (mp->first != mp->second) violation(name + " is not square");
        else if (mp->first * mp->second != prevCount) {
          violation(name + " product disagrees with " + (j == 1 ? std::string("core(w_II)") : "m1(pi_" + std::to_string(j - 1) + ")"));
        }
        if (mp) prevCount = mp->second;
      }
      const std::string& last = chain->parts[static_cast<std::size_t>(fi->i)];
      if (v.wellPadded) {
        const auto t = rulerIndex(last);
        if (!t) violation("pi_" + std::to_string(fi->i + 1) + " is not a ruler string");
        else if (*t != prevCount) violation("core(pi_" + std::to_string(fi->i + 1) + ") disagrees with m1(pi_" + std::to_string(fi->i) + ")");
        else if (x.size() != last.size()) violation("|x| differs from |pi_" + std::to_string(fi->i + 1) + "|");
      }
    }
  } else {
    const CmProgram& prog = std::get<FamilyAlpha>(family).prog;
    v.shapeOK = shapeOf(*chain, {"1#$", "0123$#", "#1", "1#$"}, v.firstViolation);
    if (v.shapeOK) {
      v.wellPadded = true;
      const auto& pi = chain->parts;
      const auto q = rulerIndex(w.track(Track::II));
      const auto q1 = rulerIndex(pi[0]);
      const auto lastDollar = pi[1].rfind('$');
      if (!q) violation("track II is not a ruler string");
      else if (*q != static_cast<std::int64_t>(pi[0].size())) violation("core(w_II) differs from |pi_1|");
      else if (!q1) violation("pi_1 is not a ruler string");
      else if (*q1 != static_cast<std::int64_t>(pi[1].size())) violation("core(pi_1) differs from |pi_2|");
      else if (lastDollar == std::string::npos || !allOf(std::string_view(pi[1]).substr(lastDollar + 1), "#")) {
        violation("pi_2 is not a history followed by #^*");
      }
      HistoryCheck h;
      if (v.wellPadded) {
        h = validateHistory(std::string_view(pi[1]).substr(0, lastDollar + 1), prog);
        if (!h.valid) violation("pi_2 history invalid: " + h.reason);
      }
      if (v.wellPadded) {
        const auto mp = multProof(pi[2]);
        const auto q4 = rulerIndex(pi[3]);
        if (!mp) violation("pi_3 is not a multiplication proof (#1^a)^b");
        else if (mp->second != h.inputN) violation("m1(pi_3) differs from inp(pi_2)");
        else if (mp->first != static_cast<std::int64_t>(pi[1].size())) violation("m2(pi_3) differs from |pi_2|");
        else if (!q4) violation("pi_4 is not a ruler string");
        else if (*q4 != mp->first * mp->second) violation("pr(pi_3) differs from core(pi_4)");
        else if (x.size() != pi[3].size()) violation("|x| differs from |pi_4|");
      }
    }
  }
  if (!v.shapeOK) v.wellPadded = false;
  v.member = v.shapeOK && v.wellPadded && v.prefixPalindrome;
  if (v.firstViolation.empty() && !v.prefixPalindrome) v.firstViolation = "prefix is not a palindrome";
  return v;
}

PadPlan bestFitAlphaPlan(const AlphaBundle& bundle, std::int64_t m) {
  if (m < 1) throw PreconditionViolation("bestFitAlphaPlan needs m >= 1");
  if (m > kExactLoInvLimit) throw TooLarge("m = " + std::to_string(m) + " is out of range");
  PadPlan p;
  p.family = PadPlan::Family::Alpha;
  p.bundle = bundle.name;
  p.m = m;

  // underline-alpha(m): the largest input whose history fits in m symbols.
  std::int64_t l = 0;
  for (std::int64_t t = 1;; ++t) {
    if (t > bundle.verifiedMax) {
      throw RangeUnverified("history lengths of " + bundle.name + " are verified only up to " +
                            std::to_string(bundle.verifiedMax));
    }
    if (historyLength(bundle.gammaProg, t, kCmStepBudget) > m) break;
    l = t;
  }
  p.level = l;

  const Integer M = toInteger(m);
  const Integer pi1 = loInv(M);
  p.rulerIndex = BigLength::of(pi1);
  p.n = BigLength::loInvOf(pi1);
  if (l == 0) {
    p.components = {{"pi_1", BigLength::of(pi1)}, {"pi_2", BigLength::of(M)}};
    p.layoutFits = false;
    p.feasible = false;
    p.note = "no history with input >= 1 fits in " + std::to_string(m) + " symbols";
    return p;
  }
  const Integer L = toInteger(l);
  const Integer x = loInv(L * M);
  p.components = {{"x", BigLength::of(x)},
                  {"pi_1", BigLength::of(pi1)},
                  {"pi_2", BigLength::of(M)},
                  {"pi_3", BigLength::of(L * (M + 1))},
                  {"pi_4", BigLength::of(x)}};
  closePlan(p, 2 * x + pi1 + M + L * (M + 1) + 5);
  return p;
}

FoolingPair foolingPair(const TwoTrackString& w, const TwoTrackString& wPrime, int i) {
  if (w == wPrime) throw PreconditionViolation("fooling pair needs two different fragments");
  if (w.size() != wPrime.size()) throw PreconditionViolation("fragments must have equal length");
  if (w.track(Track::II) != wPrime.track(Track::II)) throw PreconditionViolation("fragments must share track II");
  if (!allOf(w.track(Track::I), "01") || !allOf(wPrime.track(Track::I), "01")) {
    throw PreconditionViolation("fragment track I must be over {0,1}");
  }
  const std::int64_t half = w.size();
  std::int64_t level = -1;
  for (std::int64_t l = 2; l <= 20; ++l) {
    if (loInv(toInteger(l)) / 2 == half) level = l;
  }
  if (level < 0) throw Infeasible("no prefix length m has floor(m/2) = " + std::to_string(half));

  const std::int64_t m = loInv(toInteger(level)).get_si();
  std::string wI = w.track(Track::I);
  std::string rev(wI.rbegin(), wI.rend());
  std::string prefix = wI + (m % 2 == 1 ? "0" : "") + rev;

  PaddedInstance inst = [&] {
    try {
      return generateWellPaddedI(i, level, prefix);
    } catch (const TooLarge& e) {
      throw Infeasible(std::string("no member instance in range: ") + e.what());
    }
  }();
  const std::string& sI = inst.w.track(Track::I);
  const std::string& sII = inst.w.track(Track::II);
  if (sII.compare(0, static_cast<std::size_t>(half), w.track(Track::II)) != 0) {
    throw PreconditionViolation("fragment track II is not the ruler prefix of the member instance");
  }
  FoolingPair fp{"", "", sI.substr(static_cast<std::size_t>(half)), sII.substr(static_cast<std::size_t>(half)),
                 inst.w, TwoTrackString(wPrime.track(Track::I) + sI.substr(static_cast<std::size_t>(half)), sII)};
  return fp;
}

}  // namespace qcfa
