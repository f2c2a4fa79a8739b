#include "zenophase/atom_model.hpp"
#include "zenophase/experiment.hpp"
#include "zenophase/fringe_fit.hpp"
#include "zenophase/phase_theory.hpp"
#include "zenophase/quantum.hpp"
#include "zenophase/zeno_engine.hpp"

#include <benchmark/benchmark.h>

using namespace zenophase;

namespace {

FringeConfig free_case() {
  FringeConfig f;
  f.case_id = CaseId::kFree;
  f.delta_hz = 16e3;
  f.epsilon_hz = 16e3;
  f.window = circle_window(16e3, 40.4e3, 1);
  return f;
}

void BM_Su2Propagator(benchmark::State& state) {
  const PolarParams p{43.453e3, 1.1937, 16e3};
  double t = 1e-6;
  for (auto _ : state) {
    benchmark::DoNotOptimize(su2_propagator(p.axis(), p.omega_rad(), p.epsilon_rad(), t));
    t += 1e-9;
  }
}
BENCHMARK(BM_Su2Propagator);

void BM_ExpmHermitian(benchmark::State& state) {
  const auto h = delay_hamiltonian(CaseId::kFree, {16e3, 40.4e3}, 16e3, {2.5e3, 3.0e3});
  for (auto _ : state) benchmark::DoNotOptimize(expm_hermitian(h, 2e-6));
}
BENCHMARK(BM_ExpmHermitian);

void BM_ProjectiveProduct(benchmark::State& state) {
  const PolarParams p{43.453e3, 1.1937, 16e3};
  for (auto _ : state) benchmark::DoNotOptimize(projective_product(p, state.range(0)));
  state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_ProjectiveProduct)->RangeMultiplier(10)->Range(10, 10000)->Complexity(benchmark::oN);

void BM_SimulateFringes(benchmark::State& state) {
  auto f = free_case();
  f.case_id = state.range(0) == 4 ? CaseId::kZeno : CaseId::kFree;
  const auto grid = default_config().t_grid();
  for (auto _ : state) benchmark::DoNotOptimize(simulate_fringes(f, grid));
}
BENCHMARK(BM_SimulateFringes)->Arg(3)->Arg(4);

void BM_FitPhase(benchmark::State& state) {
  auto f = free_case();
  f.noise = {0.02, 0, 1};
  f.repetitions = 5;
  const auto ds = simulate_fringes(f, default_config().t_grid());
  const auto model = model_for(f);
  for (auto _ : state) benchmark::DoNotOptimize(fit_phase(ds, model, f.env.b_gauss));
}
BENCHMARK(BM_FitPhase);

void BM_Figure2(benchmark::State& state) {
  const auto c = default_config();
  for (auto _ : state) {
    benchmark::DoNotOptimize(run_figure2(c, {static_cast<std::size_t>(state.range(0)), false}));
  }
}
BENCHMARK(BM_Figure2)->Arg(1)->Arg(4)->Unit(benchmark::kMillisecond)->UseRealTime();

}  // namespace

BENCHMARK_MAIN();
