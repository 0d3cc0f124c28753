#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qcfa {

struct CmInstr {
  enum class Op { Inc, Dec };
  Op op;
  int counter;     // 1..3
  int next;        // INC successor, or DEC successor when the result is 0
  int nextElse;    // DEC successor when the result is positive
};

// A three-counter machine with states 1..T; state 1 is initial, state T halts.
class CmProgram {
 public:
  CmProgram(int states, std::vector<std::optional<CmInstr>> delta);

  // `.cm3` text: "states T" then one line per non-halting state,
  // "j INC c k" or "j DEC c k l".
  static CmProgram parse(std::string_view text);
  std::string format() const;

  int states() const { return states_; }
  const CmInstr& at(int state) const { return *delta_[static_cast<std::size_t>(state)]; }
  bool halting(int state) const { return state == states_; }

 private:
  int states_;
  std::vector<std::optional<CmInstr>> delta_;  // index 0 unused
};

struct CmConfig {
  int state = 1;
  std::int64_t c1 = 0;
  std::int64_t c2 = 0;
  std::int64_t c3 = 0;

  std::string encode() const;
  std::int64_t encodedLength() const { return state + c1 + c2 + c3 + 1; }
  std::int64_t counter(int c) const { return c == 1 ? c1 : c == 2 ? c2 : c3; }
  friend bool operator==(const CmConfig&, const CmConfig&) = default;
};

CmConfig stepCm(const CmProgram& prog, const CmConfig& c);
CmConfig runCm(const CmProgram& prog, std::int64_t n, std::uint64_t maxSteps);
std::string historyOf(const CmProgram& prog, std::int64_t n, std::uint64_t maxSteps);
std::int64_t historyLength(const CmProgram& prog, std::int64_t n, std::uint64_t maxSteps);

struct HistoryCheck {
  bool valid = false;
  std::int64_t inputN = 0;
  std::int64_t outputC1 = 0;
  std::string reason;
};

HistoryCheck validateHistory(std::string_view s, const CmProgram& prog);

// Builds programs from INC/DEC plus a few macros. Every emitted instruction
// becomes one state; the first emitted instruction is state 1 and the halt
// label resolves to the final state.
class CmAssembler {
 public:
  using Label = int;
  static constexpr Label kNext = -1;

  Label newLabel();
  void bind(Label l);
  Label halt() const { return 0; }

  void inc(int counter, Label next = kNext);
  void dec(int counter, Label ifZero, Label ifPositive = kNext);

  // Empties `src` (which must be positive) while adding `times[i]` to each
  // counter dsts[i] per unit moved; continues at `done`.
  void transfer(int src, const std::vector<std::pair<int, int>>& adds, Label done);
  // INC then DEC: branches on whether `counter` is 0 without changing it.
  void zeroTest(int counter, Label ifZero, Label ifPositive);
  // `times` increments of `counter`, then continue at `next`.
  void add(int counter, int times, Label next = kNext);

  CmProgram assemble() const;

 private:
  struct Pending {
    CmInstr::Op op;
    int counter;
    Label a;
    Label b;
  };
  std::vector<Pending> code_;
  std::vector<int> labelAt_{-1};  // label 0 = halt
};

// Counter program for gamma(n) = sum_{t<=n} (a*t + b), b >= 1.
CmProgram linearGammaProgram(int a, int b);

struct AlphaBundle {
  std::string name;
  std::function<std::int64_t(std::int64_t)> alpha;
  CmProgram gammaProg;
  std::int64_t verifiedMax = -1;
};

// alpha(n) = floor(n/2) and alpha(n) = floor(n/3), both cross-checked on 0..64.
const AlphaBundle& halvesBundle();
const AlphaBundle& thirdsBundle();
const AlphaBundle& bundleByName(std::string_view name);
std::vector<std::string> bundleNames();

std::int64_t betaByEnumeration(const std::function<std::int64_t(std::int64_t)>& alpha, std::int64_t t);

// Re-derives beta/gamma natively, runs gammaProg, checks histLen growth and the
// alpha hypothesis on 0..maxN; returns the bundle with verifiedMax = maxN.
AlphaBundle verifyBundle(AlphaBundle b, std::int64_t maxN);

struct SlowTables {
  std::vector<std::int64_t> beta;
  std::vector<std::int64_t> gamma;
  std::vector<std::int64_t> histLen;
  std::vector<std::int64_t> underAlpha;
};

SlowTables slowTables(const AlphaBundle& bundle, std::int64_t maxN);

inline constexpr std::uint64_t kCmStepBudget = 100'000'000;

}  // namespace qcfa
