// Serial reference vs OpenMP kernels on the same inputs.
#include <benchmark/benchmark.h>

#include "dcesim/coupling.hpp"
#include "dcesim/direct.hpp"
#include "dcesim/runner.hpp"

using namespace dcesim;

namespace {

ModeSpectrum bench_spectrum(int nx, int nt) {
  CavityConfig c{1e-2, 0.1, 0.07, 1e12, 1e16};
  return build_spectrum(c, 0.5, {nx, nt, nt});
}

Exec exec_of(const benchmark::State& s) { return s.range(0) ? Exec::parallel : Exec::serial; }

void BM_CouplingCoeffs(benchmark::State& state) {
  const auto sp = bench_spectrum(static_cast<int>(state.range(1)), 1);
  for (auto _ : state) benchmark::DoNotOptimize(coupling_coeffs(sp, exec_of(state)));
}
BENCHMARK(BM_CouplingCoeffs)->ArgsProduct({{0, 1}, {8, 16}})->Unit(benchmark::kMillisecond);

void BM_IntegrateFull(benchmark::State& state) {
  const auto sp = bench_spectrum(4, static_cast<int>(state.range(1)));
  const auto table = coupling_coeffs(sp, Exec::serial);
  const auto& e = sp.at({1, 1, 1});
  const FourierSeries drive(2 * e.omega_tilde, 0.5, {{1, 0.5, 3.141592653589793}});
  DirectOptions o;
  o.t_end = 200.0 / e.omega_tilde;
  o.samples = 20;
  o.exec = exec_of(state);
  for (auto _ : state) benchmark::DoNotOptimize(integrate_full(sp, table, drive, o));
}
BENCHMARK(BM_IntegrateFull)->ArgsProduct({{0, 1}, {2, 3}})->Unit(benchmark::kMillisecond);

void BM_Sweep(benchmark::State& state) {
  RunConfig c;
  c.cut = {3, 1, 1};
  c.drive.shape = DriveShape::raised_cosine;
  c.sweep = SweepBlock{"V0", 1e11, 1e13, 8, true};
  RunOptions o;
  o.workers = state.range(0) ? 4 : 1;
  for (auto _ : state) benchmark::DoNotOptimize(run_sweep(c, o));
}
BENCHMARK(BM_Sweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
