#include <string>

#include <benchmark/benchmark.h>

#include "qcfa/interval.hpp"
#include "qcfa/quantum.hpp"

namespace {

void BM_SinSquaredTurns(benchmark::State& state) {
  const auto bits = static_cast<unsigned>(state.range(0));
  long long k = 1;
  for (auto _ : state) {
    benchmark::DoNotOptimize(qcfa::sinSquaredTurns(k, bits));
    k = k % 4096 + 1;
  }
}
BENCHMARK(BM_SinSquaredTurns)->Arg(64)->Arg(128)->Arg(512);

// A palindrome with its first bit flipped, so the whole product is needed.
void BM_PalRejectionState(benchmark::State& state) {
  std::string p;
  for (int i = 0; i < state.range(0); ++i) p += (i * 7 + 3) % 5 < 2 ? '1' : '0';
  p.replace(p.size() / 2, std::string::npos, std::string(p.rbegin() + static_cast<long>(p.size() - p.size() / 2), p.rend()));
  p[0] = p[0] == '0' ? '1' : '0';
  for (auto _ : state) benchmark::DoNotOptimize(qcfa::palRejectionState(p));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_PalRejectionState)->RangeMultiplier(2)->Range(8, 256)->Complexity();

}  // namespace
