#include "cli.hpp"

#include <unistd.h>

#include <chrono>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "qcfa/counter3.hpp"
#include "qcfa/error.hpp"
#include "qcfa/machines.hpp"
#include "qcfa/padlang.hpp"
#include "qcfa/report.hpp"

namespace qcfa::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string eps = "0.125";
  std::optional<int> ceps;
  std::optional<unsigned> precisionBits;
  bool deterministic = false;
  std::string output;
};

struct MachineArgs {
  std::string name;
  int i = 1;
  std::string bundle = "halves";
  std::string program;
  std::string track = "I";
};

std::string readFile(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Writes to `path` through a temporary file in the same directory, or to
// `out` when no path was given.
void emit(const std::string& path, const std::string& body, std::ostream& out) {
  if (path.empty() || path == "-") {
    out << body;
    return;
  }
  const std::string tmp = path + ".tmp." + std::to_string(::getpid());
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw UsageError("cannot write '" + path + "'");
    f << body;
    f.flush();
    if (!f) throw UsageError("write to '" + path + "' failed");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp);
    throw UsageError("cannot move output into place at '" + path + "': " + ec.message());
  }
}

unsigned precisionBits(const Common& c) {
  if (c.precisionBits) return *c.precisionBits;
  if (const char* env = std::getenv("QCFA_PRECISION_BITS"); env && *env) {
    char* end = nullptr;
    unsigned long v = std::strtoul(env, &end, 10);
    if (*end != '\0' || v < 16 || v > 4096) throw UsageError("QCFA_PRECISION_BITS must be an integer in 16..4096");
    return static_cast<unsigned>(v);
  }
  return kDefaultPrecisionBits;
}

Tuning tuning(const Common& c) {
  Rational eps;
  try {
    eps = parseRational(c.eps);
  } catch (const Error&) {
    throw UsageError("--eps: cannot parse '" + c.eps + "'");
  }
  if (eps <= 0 || eps >= Rational(1, 2)) throw UsageError("--eps must lie in (0, 1/2)");
  Tuning t = tuningFor(eps);
  if (c.ceps) {
    if (*c.ceps < 1) throw UsageError("--ceps must be positive");
    t.cEps = *c.ceps;
  }
  return t;
}

std::string timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream ss;
  ss << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return ss.str();
}

Json header(const std::string& verb, const Common& c, Json params, std::optional<std::uint64_t> seed = std::nullopt) {
  Json h{{"tool", "qcfa"}, {"version", QCFA_VERSION}, {"verb", verb}};
  params["eps"] = c.eps;
  if (c.ceps) params["ceps"] = *c.ceps;
  h["parameters"] = std::move(params);
  if (seed) h["seed"] = std::to_string(*seed);
  if (!c.deterministic) h["timestamp"] = timestamp();
  return h;
}

std::string csvHeader(const std::string& verb, const Common& c, const Json& params, std::optional<std::uint64_t> seed) {
  std::ostringstream ss;
  ss << "# qcfa " << QCFA_VERSION << " " << verb << "\n";
  ss << "# parameters " << params.dump() << " eps=" << c.eps;
  if (c.ceps) ss << " ceps=" << *c.ceps;
  ss << "\n";
  if (seed) ss << "# seed " << *seed << "\n";
  if (!c.deterministic) ss << "# timestamp " << timestamp() << "\n";
  return ss.str();
}

CmProgram programFor(const MachineArgs& m) {
  if (!m.program.empty()) return CmProgram::parse(readFile(m.program));
  return bundleByName(m.bundle).gammaProg;
}

bool isTopLevel(const std::string& name) { return name == "m_i" || name == "m_alpha"; }

TunedMachine buildMachine(const MachineArgs& m, const Tuning& t) {
  const Track track = m.track == "II" ? Track::II : Track::I;
  if (m.track != "I" && m.track != "II") throw UsageError("--track must be I or II");
  const Span whole = wholeTrack(track);
  if (m.name == "eqlen") return eqLenOnBlocks(t);
  if (m.name == "mult") return multCheck(whole, t);
  if (m.name == "ruler") return rulerCheck(whole, t);
  if (m.name == "atmost") return atMost(whole, programFor(m), t);
  if (m.name == "paliter") {
    return palIter(
        [](const Tape& w) {
          if (findRight(*w, Track::I, 0, w->size() + 1, '*') >= 0) return views::pre(w);
          return SubseqView(w, 0, w->size() + 1, "01", Track::I);
        },
        t);
  }
  if (m.i < 1) throw UsageError("--i must be at least 1");
  if (m.name == "padcheck_i") return padCheckI(m.i, t);
  if (m.name == "padcheck_alpha") return padCheckAlpha(programFor(m), t);
  if (m.name == "m_i") return assembleTopLevel(padCheckI(m.i, t), prefixSelector(), t);
  if (m.name == "m_alpha") return assembleTopLevel(padCheckAlpha(programFor(m), t), prefixSelector(), t);
  throw UsageError("--machine: unknown machine '" + m.name + "'");
}

void addMachineOptions(CLI::App* sub, MachineArgs& m) {
  sub->add_option("--machine", m.name,
                  "eqlen, mult, ruler, paliter, atmost, padcheck_i, padcheck_alpha, m_i or m_alpha")
      ->required();
  sub->add_option("--i", m.i, "Family index i for padcheck_i and m_i");
  sub->add_option("--bundle", m.bundle, "Slow-function bundle for the alpha family: halves or thirds");
  sub->add_option("--program", m.program, "Counter program (.cm3) overriding the bundle's");
  sub->add_option("--track", m.track, "Track scanned by mult, ruler and atmost: I or II");
}

Tape loadInput(const std::string& path, std::optional<std::int64_t> a, std::optional<std::int64_t> b) {
  if (!path.empty()) return makeTape(TwoTrackString::parse(readFile(path)));
  if (a && b) return makeTape(eqLenInput(*a, *b));
  throw UsageError("an input .2t file (or --a and --b for eqlen) is required");
}

Json inputJson(const std::string& path, const Tape& w) {
  return Json{{"path", path.empty() ? "<generated>" : path}, {"length", w->size()}};
}

std::vector<std::int64_t> parseSizes(const std::string& text) {
  std::vector<std::int64_t> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      long long v = std::stoll(cell, &used);
      if (used != cell.size() || v < 1) throw std::invalid_argument(cell);
      out.push_back(v);
    } catch (const std::exception&) {
      throw UsageError("--sizes: '" + cell + "' is not a positive integer");
    }
  }
  if (out.empty()) throw UsageError("--sizes is empty");
  return out;
}

// Library errors caused by the caller's flags or files rather than by a defect.
bool isInputError(const Error& e) {
  return dynamic_cast<const FormatError*>(&e) || dynamic_cast<const LengthMismatch*>(&e) ||
         dynamic_cast<const IllegalSymbol*>(&e) || dynamic_cast<const PreconditionViolation*>(&e) ||
         dynamic_cast<const TooLarge*>(&e) || dynamic_cast<const Infeasible*>(&e) ||
         dynamic_cast<const RangeUnverified*>(&e) || dynamic_cast<const StepLimit*>(&e) ||
         dynamic_cast<const NotInDomain*>(&e) || dynamic_cast<const InsufficientPoints*>(&e);
}

std::string plainDecimal(const Rational& x) { return toDecimal(x, 20, Rounding::Nearest); }

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Workbench for two-way quantum-classical automata over padded palindromes", "qcfa"};
  app.set_version_flag("--version", QCFA_VERSION);
  app.require_subcommand(1);
  app.fallthrough();

  Common common;
  app.add_option("--eps", common.eps, "Error bound epsilon in (0, 1/2), e.g. 0.125 or 1/8");
  app.add_option("--ceps", common.ceps, "Override the PalIter coin-count constant");
  app.add_option("--precision-bits", common.precisionBits, "Fractional bits for certified sin^2 bounds")
      ->check(CLI::Range(16u, 4096u));
  app.add_flag("--deterministic", common.deterministic, "Omit timestamps so reruns are byte-identical");
  app.add_option("-o,--output", common.output, "Output path (default: standard output)");

  // gen
  auto* gen = app.add_subcommand("gen", "Generate a well-padded instance or a padding plan");
  std::string family = "i";
  int famI = 1;
  std::int64_t level = 2, alphaM = 1;
  std::string prefix, bundle = "halves";
  bool planOnly = false;
  gen->add_option("--family", family, "i or alpha")->check(CLI::IsMember({"i", "alpha"}));
  gen->add_option("--i", famI, "Family index i >= 1");
  gen->add_option("--level", level, "Level l >= 2 (family i)");
  gen->add_option("--prefix", prefix, "Prefix bits of length loInv(l) (family i)");
  gen->add_option("--bundle", bundle, "halves or thirds (family alpha)");
  gen->add_option("--m", alphaM, "|pi_2| of the best-fit plan (family alpha)");
  gen->add_flag("--plan", planOnly, "Print the padding plan as JSON instead of the instance");

  // oracle
  auto* oracle = app.add_subcommand("oracle", "Decide membership deterministically");
  std::string oracleInput;
  bool expectMember = false;
  oracle->add_option("--family", family, "i or alpha")->check(CLI::IsMember({"i", "alpha"}));
  oracle->add_option("--i", famI, "Family index i >= 1");
  oracle->add_option("--bundle", bundle, "halves or thirds (family alpha)");
  oracle->add_flag("--expect-member", expectMember, "Exit 1 unless the input is a member");
  oracle->add_option("input", oracleInput, "Input .2t file")->required();

  // analyze / simulate share machine selection
  MachineArgs machine;
  std::string input;
  std::optional<std::int64_t> blockA, blockB;
  auto* analyze = app.add_subcommand("analyze", "Exact round analysis with certified intervals");
  addMachineOptions(analyze, machine);
  analyze->add_option("--a", blockA, "eqlen: first block length when no input file is given");
  analyze->add_option("--b", blockB, "eqlen: second block length when no input file is given");
  analyze->add_option("input", input, "Input .2t file");

  auto* simulate = app.add_subcommand("simulate", "Monte Carlo trials");
  std::uint64_t trials = 1000, seed = 1, stepCap = kDefaultStepCap;
  addMachineOptions(simulate, machine);
  simulate->add_option("--a", blockA, "eqlen: first block length when no input file is given");
  simulate->add_option("--b", blockB, "eqlen: second block length when no input file is given");
  simulate->add_option("--trials", trials, "Number of trials")->check(CLI::PositiveNumber);
  simulate->add_option("--seed", seed, "Base seed");
  simulate->add_option("--step-cap", stepCap, "Real-step cap per trial")->check(CLI::PositiveNumber);
  simulate->add_option("input", input, "Input .2t file");

  // scan
  auto* scan = app.add_subcommand("scan", "Expected steps of EqLen over a size sweep, as CSV");
  std::string scanMachine = "eqlen", sizes = "8,16,32,64,128";
  std::int64_t offset = 0;
  std::uint64_t scanTrials = 0;
  double mcBudget = 2e9;
  bool fit = false;
  scan->add_option("--machine", scanMachine, "Only eqlen is scanned")->check(CLI::IsMember({"eqlen"}));
  scan->add_option("--sizes", sizes, "Comma-separated block lengths");
  scan->add_option("--offset", offset, "Second block length is size + offset");
  scan->add_option("--trials", scanTrials, "Monte Carlo trials per size (0: exact only)");
  scan->add_option("--seed", seed, "Base seed");
  scan->add_option("--step-cap", stepCap, "Real-step cap per Monte Carlo trial")->check(CLI::PositiveNumber);
  scan->add_option("--mc-budget", mcBudget, "Skip Monte Carlo when trials * expected steps exceeds this");
  scan->add_flag("--fit", fit, "Append a log-log runtime fit");

  // cm
  auto* cm = app.add_subcommand("cm", "Three-counter machines and their tables");
  cm->require_subcommand(1);
  std::string cmProgram;
  std::int64_t cmN = 1, cmMax = 16;
  std::uint64_t cmSteps = kCmStepBudget;
  std::string historyPath;
  bool expectValid = false;
  auto addProg = [&](CLI::App* s) {
    s->add_option("--bundle", bundle, "halves or thirds");
    s->add_option("--program", cmProgram, "Counter program (.cm3) instead of a bundle's");
  };
  auto* cmRun = cm->add_subcommand("run", "Run a program and report its final configuration");
  addProg(cmRun);
  cmRun->add_option("--n", cmN, "Input n");
  cmRun->add_option("--max-steps", cmSteps, "Step limit");
  auto* cmHist = cm->add_subcommand("history", "Print the configuration history");
  addProg(cmHist);
  cmHist->add_option("--n", cmN, "Input n");
  cmHist->add_option("--max-steps", cmSteps, "Step limit");
  auto* cmTables = cm->add_subcommand("tables", "beta, gamma, history length and underline-alpha as CSV");
  cmTables->add_option("--bundle", bundle, "halves or thirds");
  cmTables->add_option("--max", cmMax, "Largest n");
  auto* cmValidate = cm->add_subcommand("validate", "Check a history string against a program");
  addProg(cmValidate);
  cmValidate->add_option("history", historyPath, "File holding the history")->required();
  cmValidate->add_flag("--expect-valid", expectValid, "Exit 1 unless the history is valid");
  auto* cmShow = cm->add_subcommand("program", "Print a bundle's program in .cm3 form");
  cmShow->add_option("--bundle", bundle, "halves or thirds");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (gen->parsed()) {
      if (family == "alpha") {
        PadPlan p = bestFitAlphaPlan(bundleByName(bundle), alphaM);
        Json j{{"header", header("gen", common, {{"family", "alpha"}, {"bundle", bundle}, {"m", alphaM}})},
               {"plan", planJson(p)}};
        emit(common.output, j.dump(2) + "\n", out);
        return kOk;
      }
      if (planOnly) {
        PadPlan p = planI(famI, level);
        Json j{{"header", header("gen", common, {{"family", "i"}, {"i", famI}, {"level", level}})},
               {"plan", planJson(p)}};
        emit(common.output, j.dump(2) + "\n", out);
        return kOk;
      }
      std::optional<std::string> pre;
      if (!prefix.empty()) pre = prefix;
      PaddedInstance inst = generateWellPaddedI(famI, level, pre);
      emit(common.output, inst.w.format(), out);
      return kOk;
    }

    if (oracle->parsed()) {
      TwoTrackString w = TwoTrackString::parse(readFile(oracleInput));
      Family f = family == "i" ? Family{FamilyI{famI}} : Family{FamilyAlpha{bundleByName(bundle).gammaProg}};
      Verdict v = membershipOracle(w, f);
      Json params{{"family", family}};
      if (family == "i") params["i"] = famI;
      else params["bundle"] = bundle;
      Json j{{"header", header("oracle", common, params)},
             {"input", Json{{"path", oracleInput}, {"length", w.size()}}},
             {"verdict", verdictJson(v)}};
      emit(common.output, j.dump(2) + "\n", out);
      return expectMember && !v.member ? kNegative : kOk;
    }

    if (analyze->parsed() || simulate->parsed()) {
      const Tuning t = tuning(common);
      const TunedMachine m = buildMachine(machine, t);
      const Tape w = loadInput(input, blockA, blockB);
      Json params{{"machine", machine.name}, {"k", t.k}, {"cEps", t.cEps}};
      if (machine.name == "padcheck_i" || machine.name == "m_i") params["i"] = machine.i;
      if (machine.name == "atmost" || machine.name == "padcheck_alpha" || machine.name == "m_alpha") {
        params["program"] = machine.program.empty() ? machine.bundle : machine.program;
      }
      if (analyze->parsed()) {
        const unsigned bits = precisionBits(common);
        params["precisionBits"] = bits;
        LoweredRound lr = lowerRound(*m.spec, w);
        RoundSummary rs = analyzeLowered(lr, bits);
        Json j{{"header", header("analyze", common, params)}, {"machine", m.name}, {"input", inputJson(input, w)}};
        j.update(roundJson(rs));
        j["operations"] = lr.ops.size();
        if (lr.deterministicReject) j["firstFailure"] = lr.firstFailure;
        if (isTopLevel(machine.name)) {
          j.update(loopJson(composeLoop(rs)));
        }
        emit(common.output, j.dump(2) + "\n", out);
        return kOk;
      }
      params["trials"] = trials;
      params["stepCap"] = stepCap;
      McEstimate mc = estimateMonteCarlo(*m.spec, w, trials, seed, TrialOptions{stepCap});
      Json j{{"header", header("simulate", common, params, seed)},
             {"machine", m.name},
             {"input", inputJson(input, w)},
             {"trials", trials},
             {"seed", std::to_string(seed)},
             {"monteCarlo", monteCarloJson(mc)}};
      emit(common.output, j.dump(2) + "\n", out);
      return kOk;
    }

    if (scan->parsed()) {
      const Tuning t = tuning(common);
      const unsigned bits = precisionBits(common);
      const TunedMachine m = eqLenOnBlocks(t);
      Json params{{"machine", scanMachine}, {"sizes", sizes}, {"offset", offset}, {"trials", scanTrials},
                  {"stepCap", stepCap}, {"k", t.k}, {"precisionBits", bits}};
      std::ostringstream csv;
      csv << csvHeader("scan", common, params, scanTrials ? std::optional<std::uint64_t>(seed) : std::nullopt);
      csv << "size,input_length,esteps_lo,esteps_hi,mean_steps,mc_trials,mc_mean_steps,mc_half_width,mc_abandoned\n";
      std::vector<std::pair<double, double>> pts;
      for (std::int64_t s : parseSizes(sizes)) {
        if (s + offset < 0) throw UsageError("--offset makes a block length negative");
        const Tape w = makeTape(eqLenInput(s, s + offset));
        RoundSummary rs = analyzeRound(*m.spec, w, bits);
        // A single EqLen pass always halts: SubSuccess is its only other exit.
        const Interval& e = rs.eStepsRound;
        const double mean = Rational((e.lo() + e.hi()) / 2).get_d();
        csv << s << "," << w->size() << "," << e.loString() << "," << e.hiString() << ","
            << plainDecimal((e.lo() + e.hi()) / 2);
        pts.emplace_back(static_cast<double>(s), mean);
        if (scanTrials > 0 && mean * static_cast<double>(scanTrials) <= mcBudget) {
          McEstimate mc = estimateMonteCarlo(*m.spec, w, scanTrials, trialSeed(seed, static_cast<std::uint64_t>(s)),
                                             TrialOptions{stepCap});
          csv << "," << scanTrials << "," << mc.meanSteps << "," << mc.meanStepsHalfWidth95 << "," << mc.abandoned;
        } else {
          csv << ",0,,,";
        }
        csv << "\n";
      }
      if (fit) {
        RuntimeFit f = reportRuntimeFit(pts);
        csv << "# fit exponent=" << f.exponent << " r2=" << f.r2 << " points=" << f.points << "\n";
      }
      emit(common.output, csv.str(), out);
      return kOk;
    }

    if (cm->parsed()) {
      MachineArgs pa;
      pa.bundle = bundle;
      pa.program = cmProgram;
      if (cmRun->parsed()) {
        CmConfig c = runCm(programFor(pa), cmN, cmSteps);
        Json j{{"header", header("cm run", common, {{"program", cmProgram.empty() ? bundle : cmProgram}, {"n", cmN}})},
               {"final", {{"state", c.state}, {"c1", c.c1}, {"c2", c.c2}, {"c3", c.c3}}},
               {"output", c.c1}};
        emit(common.output, j.dump(2) + "\n", out);
      } else if (cmHist->parsed()) {
        emit(common.output, historyOf(programFor(pa), cmN, cmSteps) + "\n", out);
      } else if (cmTables->parsed()) {
        const AlphaBundle& b = bundleByName(bundle);
        SlowTables tab = slowTables(b, cmMax);
        std::ostringstream csv;
        csv << csvHeader("cm tables", common, {{"bundle", bundle}, {"max", cmMax}}, std::nullopt);
        csv << "n,alpha,beta,gamma,hist_len,under_alpha\n";
        for (std::int64_t n = 0; n <= cmMax; ++n) {
          const auto i = static_cast<std::size_t>(n);
          csv << n << "," << b.alpha(n) << "," << tab.beta[i] << "," << tab.gamma[i] << "," << tab.histLen[i] << ","
              << tab.underAlpha[i] << "\n";
        }
        emit(common.output, csv.str(), out);
      } else if (cmValidate->parsed()) {
        std::string h = readFile(historyPath);
        while (!h.empty() && (h.back() == '\n' || h.back() == '\r')) h.pop_back();
        HistoryCheck r = validateHistory(h, programFor(pa));
        Json j{{"header", header("cm validate", common, {{"program", cmProgram.empty() ? bundle : cmProgram}})},
               {"valid", r.valid},
               {"inputN", r.inputN},
               {"outputC1", r.outputC1},
               {"reason", r.reason}};
        emit(common.output, j.dump(2) + "\n", out);
        return expectValid && !r.valid ? kNegative : kOk;
      } else if (cmShow->parsed()) {
        emit(common.output, bundleByName(bundle).gammaProg.format(), out);
      }
      return kOk;
    }
  } catch (const UsageError& e) {
    err << "qcfa: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    err << "qcfa: " << (isInputError(e) ? "" : "internal error: ") << e.what() << "\n";
    return isInputError(e) ? kUsage : kInternal;
  } catch (const std::exception& e) {
    err << "qcfa: internal error: " << e.what() << "\n";
    return kInternal;
  }
  return kUsage;
}

}  // namespace qcfa::cli
