#include <benchmark/benchmark.h>

#include "bench_util.hpp"
#include "wreach/dynamics.hpp"
#include "wreach/lyapunov.hpp"

namespace {

void BM_IntegrateLinearDecay(benchmark::State& state) {
  const auto mu0 = bench::cloud(static_cast<std::size_t>(state.range(0)), 2, 7);
  const auto F = wreach::FieldSpec::ball(1.0);
  const auto sel = wreach::Selection::linear_decay(1.0);
  for (auto _ : state) benchmark::DoNotOptimize(wreach::integrate(F, mu0, sel, 1e-3, 1.0).steps());
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_IntegrateLinearDecay)->Arg(8)->Arg(64);

void BM_IntegrateGreedy(benchmark::State& state) {
  const auto mu0 = bench::cloud(static_cast<std::size_t>(state.range(0)), 2, 8);
  const auto F = wreach::FieldSpec::ball(1.0);
  const auto sel = wreach::lyapunov_greedy(wreach::LyapunovSpec::half_m2_squared(1.0));
  for (auto _ : state) benchmark::DoNotOptimize(wreach::integrate(F, mu0, sel, 1e-3, 1.0).steps());
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_IntegrateGreedy)->Arg(8)->Arg(64);

void BM_FieldEvalLinear(benchmark::State& state) {
  wreach::Matrix A(2, 2), B(2, 2);
  A << 0, 1, -1, 0;
  B << -1, 0, 0, -1;
  const auto F = wreach::FieldSpec::linear(A, B, 1.0);
  const auto nu = bench::cloud(static_cast<std::size_t>(state.range(0)), 2, 9);
  for (auto _ : state) benchmark::DoNotOptimize(wreach::field_eval_all(F, nu).size());
}
BENCHMARK(BM_FieldEvalLinear)->Arg(16)->Arg(256);

}  // namespace
