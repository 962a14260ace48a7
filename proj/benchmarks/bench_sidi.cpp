#include <random>

#include <benchmark/benchmark.h>

#include "sidi/commutant.hpp"
#include "sidi/decomposer.hpp"
#include "sidi/si_analysis.hpp"

namespace {

sidi::CMatrix conjugated_jordan(int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  sidi::CMatrix x(n, n), j = sidi::CMatrix::Zero(n, n);
  for (int r = 0; r < n; ++r) {
    for (int c = 0; c < n; ++c) x(r, c) = {normal(rng), normal(rng)};
  }
  for (int k = 0; k < n; ++k) {
    j(k, k) = static_cast<double>(k / 2);
    if (k % 2 == 0 && k + 1 < n) j(k, k + 1) = 1.0;
  }
  return x * j * x.inverse();
}

void BM_CommutantBasis(benchmark::State& state) {
  const auto a = conjugated_jordan(static_cast<int>(state.range(0)), 1);
  const sidi::Tolerances tol;
  for (auto _ : state) benchmark::DoNotOptimize(sidi::commutant_basis(a, tol));
}
BENCHMARK(BM_CommutantBasis)->Arg(4)->Arg(8)->Arg(12);

void BM_Riesz(benchmark::State& state) {
  const auto a = conjugated_jordan(static_cast<int>(state.range(0)), 2);
  const sidi::Tolerances tol;
  for (auto _ : state) benchmark::DoNotOptimize(sidi::riesz_decomposition(a, tol));
}
BENCHMARK(BM_Riesz)->Arg(4)->Arg(16)->Arg(64);

void BM_SISplit(benchmark::State& state) {
  const auto a = conjugated_jordan(static_cast<int>(state.range(0)), 3);
  const sidi::Tolerances tol;
  for (auto _ : state) benchmark::DoNotOptimize(sidi::si_split(a, tol));
}
BENCHMARK(BM_SISplit)->Arg(4)->Arg(16)->Arg(32);

void BM_DecideGrid(benchmark::State& state) {
  sidi::ExampleParams p;
  p.grid = static_cast<int>(state.range(0));
  const auto f = sidi::build_example(sidi::ExampleName::Prop43, p);
  const sidi::Tolerances tol;
  for (auto _ : state) benchmark::DoNotOptimize(sidi::decide(f, std::nullopt, tol));
}
BENCHMARK(BM_DecideGrid)->Arg(100)->Arg(1000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
