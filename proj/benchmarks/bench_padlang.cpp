#include <benchmark/benchmark.h>

#include "qcfa/counter3.hpp"
#include "qcfa/padlang.hpp"

namespace {

void BM_RulerString(benchmark::State& state) {
  const int i = static_cast<int>(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(qcfa::rulerString(i));
  state.SetBytesProcessed(state.iterations() * (i * (std::int64_t{1} << (i + 1)) - 1));
}
BENCHMARK(BM_RulerString)->DenseRange(4, 12, 4);

void BM_MembershipOracle(benchmark::State& state) {
  const auto inst = qcfa::generateWellPaddedI(1, state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(qcfa::membershipOracle(inst.w, qcfa::FamilyI{1}));
}
BENCHMARK(BM_MembershipOracle)->Arg(2)->Arg(3);

void BM_ValidateHistory(benchmark::State& state) {
  const qcfa::CmProgram& p = qcfa::halvesBundle().gammaProg;
  const std::string h = qcfa::historyOf(p, state.range(0), qcfa::kCmStepBudget);
  for (auto _ : state) benchmark::DoNotOptimize(qcfa::validateHistory(h, p));
  state.SetBytesProcessed(state.iterations() * static_cast<std::int64_t>(h.size()));
}
BENCHMARK(BM_ValidateHistory)->Arg(2)->Arg(8)->Arg(32);

}  // namespace
