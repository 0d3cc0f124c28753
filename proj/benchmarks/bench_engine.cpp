#include <benchmark/benchmark.h>

#include "qcfa/engine.hpp"
#include "qcfa/machines.hpp"
#include "qcfa/padlang.hpp"

namespace {

const qcfa::Tuning& tuning() {
  static const qcfa::Tuning t = qcfa::tuningFor(qcfa::Rational(1, 8));
  return t;
}

void BM_EqLenAnalyze(benchmark::State& state) {
  const qcfa::TunedMachine m = qcfa::eqLenOnBlocks(tuning());
  const qcfa::Tape w = qcfa::makeTape(qcfa::eqLenInput(state.range(0), state.range(0) + 1));
  for (auto _ : state) benchmark::DoNotOptimize(qcfa::analyzeRound(*m.spec, w));
}
BENCHMARK(BM_EqLenAnalyze)->Arg(8)->Arg(64)->Arg(512);

void BM_EqLenTrial(benchmark::State& state) {
  const qcfa::TunedMachine m = qcfa::eqLenOnBlocks(tuning());
  const qcfa::Tape w = qcfa::makeTape(qcfa::eqLenInput(state.range(0), state.range(0) + 1));
  std::uint64_t seed = 0;
  for (auto _ : state) benchmark::DoNotOptimize(qcfa::runTrial(*m.spec, w, ++seed));
}
BENCHMARK(BM_EqLenTrial)->Arg(8)->Arg(32)->Arg(128);

void BM_LowerTopLevel(benchmark::State& state) {
  const qcfa::TunedMachine m =
      qcfa::assembleTopLevel(qcfa::padCheckI(1, tuning()), qcfa::prefixSelector(), tuning());
  const qcfa::Tape w = qcfa::makeTape(qcfa::generateWellPaddedI(1, state.range(0)).w);
  for (auto _ : state) benchmark::DoNotOptimize(qcfa::lowerRound(*m.spec, w));
}
BENCHMARK(BM_LowerTopLevel)->Arg(2)->Arg(3);

}  // namespace
