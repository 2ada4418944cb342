#include <benchmark/benchmark.h>

#include "msdlab/analytics.hpp"
#include "msdlab/auction.hpp"
#include "msdlab/evolution.hpp"
#include "msdlab/wiener_hopf.hpp"

namespace {

msd::ModelParams step_book() {
  msd::ModelParams params;
  params.diffusivity = 1.0;
  params.nu = msd::RateFunction::constant(1.0);
  params.omega = msd::RateFunction::step_pair(1.0, 1.0);
  return params;
}

void BM_evolve_step(benchmark::State& state) {
  const msd::ModelParams params = step_book();
  const msd::PriceGrid grid(-5.0, 5.0, static_cast<std::size_t>(state.range(0)));
  const msd::MsdCurve initial = msd::stationary_closed_form(grid, params);
  msd::EvolutionConfig config;
  config.dt = 1e-3;
  config.scheme = msd::Scheme::crank_nicolson;
  for (auto _ : state) {
    benchmark::DoNotOptimize(msd::evolve(initial, params, config, 1e-3));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_evolve_step)->Arg(500)->Arg(2000)->Arg(8000);

void BM_apply_kernel(benchmark::State& state) {
  const double u_max = 16.0;
  const double du = u_max / static_cast<double>(state.range(0));
  std::vector<double> phi;
  for (double u = 0.0; u <= u_max + 0.5 * du; u += du) phi.push_back(u);
  for (auto _ : state) {
    benchmark::DoNotOptimize(msd::apply_kernel(phi, u_max, du));
  }
  state.SetItemsProcessed(state.iterations() * phi.size());
}
BENCHMARK(BM_apply_kernel)->Arg(320)->Arg(640)->Arg(1280);

void BM_clear(benchmark::State& state) {
  const msd::ModelParams params = step_book();
  const msd::PriceGrid grid(-5.0, 5.0, static_cast<std::size_t>(state.range(0)));
  const msd::MsdCurve book = msd::stationary_closed_form(grid, params);
  for (auto _ : state) {
    benchmark::DoNotOptimize(msd::clear(book));
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_clear)->Arg(500)->Arg(2000)->Arg(8000);

}  // namespace

BENCHMARK_MAIN();
