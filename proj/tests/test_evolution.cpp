#include <cmath>
#include <vector>

#include <doctest.h>

#include "msdlab/analytics.hpp"
#include "msdlab/errors.hpp"
#include "msdlab/evolution.hpp"

using namespace msd;

namespace {

ModelParams free_diffusion() {
  ModelParams params;
  params.diffusivity = 1.0;
  params.nu = RateFunction::constant(0.0);
  params.omega = RateFunction::constant(0.0);
  return params;
}

MsdCurve gaussian_bump(const PriceGrid& grid, double center, double width, double mass) {
  std::vector<double> rho(grid.nodes());
  const double norm = mass / (width * std::sqrt(2.0 * 3.14159265358979323846));
  for (std::size_t k = 0; k < grid.nodes(); ++k) {
    const double z = (grid.node(k) - center) / width;
    rho[k] = norm * std::exp(-0.5 * z * z);
  }
  return MsdCurve(grid, rho, rho);
}

}  // namespace

TEST_CASE("zero-flux diffusion conserves the trapezoid mass exactly") {
  const PriceGrid grid(-4.0, 4.0, 200);
  const MsdCurve initial = gaussian_bump(grid, 0.3, 0.5, 1.0);
  EvolutionConfig config;
  config.boundary = Boundary::zero_flux;
  const double mass0 = initial.total_supply();
  for (const Scheme scheme : {Scheme::crank_nicolson, Scheme::explicit_euler}) {
    config.scheme = scheme;
    config.dt = scheme == Scheme::explicit_euler ? 2e-4 : 1e-3;
    const MsdCurve evolved = evolve(initial, free_diffusion(), config, 0.5);
    CHECK(evolved.total_supply() == doctest::Approx(mass0).epsilon(1e-12));
    CHECK(evolved.total_demand() == doctest::Approx(mass0).epsilon(1e-12));
  }
}

TEST_CASE("uniform cancellation decays the book mass exponentially") {
  const PriceGrid grid(-4.0, 4.0, 200);
  const MsdCurve initial = gaussian_bump(grid, 0.0, 0.5, 2.0);
  ModelParams params = free_diffusion();
  params.nu = RateFunction::constant(0.7);
  EvolutionConfig config;
  config.boundary = Boundary::zero_flux;
  const MsdCurve evolved = evolve(initial, params, config, 0.5);
  CHECK(evolved.total_supply() ==
        doctest::Approx(2.0 * std::exp(-0.35)).epsilon(1e-6));
}

TEST_CASE("the stationary profile is a fixed point of evolve") {
  ModelParams params;
  params.diffusivity = 1.0;
  params.nu = RateFunction::constant(1.0);
  params.omega = RateFunction::step_pair(1.0, 1.0);
  const PriceGrid grid(-4.0, 4.0, 400);
  const MsdCurve stationary = stationary_closed_form(grid, params);
  EvolutionConfig config;  // crank_nicolson + dirichlet_stationary
  const MsdCurve evolved = evolve(stationary, params, config, 1.0);
  CHECK(relative_linf_distance(evolved, stationary) < 1e-4);
}

TEST_CASE("explicit scheme enforces its stability bound") {
  const PriceGrid grid(-1.0, 1.0, 100);  // dy = 0.02, needs dt <= 1e-4
  const MsdCurve initial = gaussian_bump(grid, 0.0, 0.2, 1.0);
  EvolutionConfig config;
  config.scheme = Scheme::explicit_euler;
  config.boundary = Boundary::zero_flux;
  config.dt = 5e-4;
  CHECK_THROWS_AS(evolve(initial, free_diffusion(), config, 0.01), ValidationError);
  config.dt = 1e-4;
  CHECK_NOTHROW(evolve(initial, free_diffusion(), config, 0.01));
}

TEST_CASE("both schemes agree on a smooth problem") {
  const PriceGrid grid(-2.0, 2.0, 100);
  const MsdCurve initial = gaussian_bump(grid, 0.0, 0.4, 1.0);
  ModelParams params = free_diffusion();
  params.nu = RateFunction::constant(0.5);
  params.omega = RateFunction::step_pair(1.0, 1.0);
  EvolutionConfig cn;
  cn.boundary = Boundary::zero_flux;
  cn.dt = 1e-4;
  EvolutionConfig euler = cn;
  euler.scheme = Scheme::explicit_euler;
  const MsdCurve a = evolve(initial, params, cn, 0.2);
  const MsdCurve b = evolve(initial, params, euler, 0.2);
  // Euler carries an O(dt) defect, Crank-Nicolson O(dt^2)
  CHECK(relative_linf_distance(a, b) < 2e-4);
}

TEST_CASE("dirichlet_hold pins the end nodes to the initial values") {
  const PriceGrid grid(-2.0, 2.0, 80);
  ModelParams params = free_diffusion();
  params.omega = RateFunction::step_pair(1.0, 1.0);
  params.nu = RateFunction::constant(1.0);
  const MsdCurve initial = absorbing_stationary_curve(grid, params);
  EvolutionConfig config;
  config.boundary = Boundary::dirichlet_hold;
  const MsdCurve evolved = evolve(initial, params, config, 0.3);
  CHECK(evolved.rho_s.back() == initial.rho_s.back());
  CHECK(evolved.rho_s.front() == initial.rho_s.front());
  CHECK(evolved.rho_d.front() == initial.rho_d.front());
  // interior fills in toward the free stationary state
  CHECK(evolved.supply_density_at(0.05) > initial.supply_density_at(0.05));
}

TEST_CASE("propagator solution matches the grid solver") {
  // decay of a bump with no deposition
  {
    const PriceGrid grid(-6.0, 6.0, 600);
    const MsdCurve initial = gaussian_bump(grid, 0.0, 0.5, 1.0);
    ModelParams params = free_diffusion();
    params.nu = RateFunction::constant(0.3);
    EvolutionConfig config;
    config.boundary = Boundary::zero_flux;
    config.dt = 5e-4;
    const MsdCurve numeric = evolve(initial, params, config, 0.5);
    const MsdCurve green = evolve_green(initial, params, 0.5);
    double peak = 0.0;
    for (const double v : numeric.rho_s) peak = std::max(peak, v);
    double err = 0.0;
    for (std::size_t k = 0; k < grid.nodes(); ++k) {
      if (std::abs(grid.node(k)) > 3.0) continue;
      err = std::max(err, std::abs(numeric.rho_s[k] - green.rho_s[k]));
    }
    CHECK(err < 2e-3 * peak);
  }
  // growth from the empty book under step deposition
  {
    const PriceGrid grid(-8.0, 8.0, 800);
    const MsdCurve initial = MsdCurve::zero(grid);
    ModelParams params;
    params.diffusivity = 1.0;
    params.nu = RateFunction::constant(1.0);
    params.omega = RateFunction::step_pair(1.0, 1.0);
    EvolutionConfig config;
    config.boundary = Boundary::zero_flux;
    config.dt = 5e-4;
    const MsdCurve numeric = evolve(initial, params, config, 1.0);
    const MsdCurve green = evolve_green(initial, params, 1.0);
    double peak = 0.0;
    for (const double v : numeric.rho_s) peak = std::max(peak, v);
    double err = 0.0;
    for (std::size_t k = 0; k < grid.nodes(); ++k) {
      if (std::abs(grid.node(k)) > 3.0) continue;
      err = std::max(err, std::abs(numeric.rho_s[k] - green.rho_s[k]));
      err = std::max(err, std::abs(numeric.rho_d[k] - green.rho_d[k]));
    }
    CHECK(err < 2e-3 * peak);
  }
  // exponential deposition uses the MGF closed form; compare well inside the
  // domain where the boundary treatment cannot reach within t
  {
    const PriceGrid grid(-6.0, 6.0, 600);
    ModelParams params;
    params.diffusivity = 1.0;
    params.nu = RateFunction::constant(3.0);
    params.omega = RateFunction::exponential_pair(2.0, 1.0, 1.0);
    const MsdCurve initial = MsdCurve::zero(grid);
    EvolutionConfig config;
    config.boundary = Boundary::zero_flux;
    config.dt = 5e-4;
    const MsdCurve numeric = evolve(initial, params, config, 0.4);
    const MsdCurve green = evolve_green(initial, params, 0.4);
    double peak = 0.0;
    double err = 0.0;
    for (std::size_t k = 0; k < grid.nodes(); ++k) {
      if (std::abs(grid.node(k)) > 2.0) continue;
      peak = std::max(peak, green.rho_s[k]);
      err = std::max(err, std::abs(numeric.rho_s[k] - green.rho_s[k]));
    }
    CHECK(err < 5e-3 * peak);
  }
}

TEST_CASE("evolve_green requires constant cancellation") {
  const PriceGrid grid(-2.0, 2.0, 40);
  ModelParams params = free_diffusion();
  params.nu = RateFunction::tabulated({-1.0, 1.0}, {1.0, 2.0}, {2.0, 1.0});
  CHECK_THROWS_AS(evolve_green(MsdCurve::zero(grid), params, 0.1), ValidationError);
}

TEST_CASE("stationary_numeric matches the closed forms") {
  EvolutionConfig config;
  {
    ModelParams params;
    params.diffusivity = 1.0;
    params.nu = RateFunction::constant(1.0);
    params.omega = RateFunction::step_pair(1.0, 1.0);
    const PriceGrid grid(-4.0, 4.0, 400);
    const MsdCurve direct = stationary_numeric(grid, params, config);
    CHECK(relative_linf_distance(direct, stationary_closed_form(grid, params)) < 1e-3);
  }
  {
    // spatially varying cancellation exercises the marching path
    ModelParams params;
    params.diffusivity = 1.0;
    params.nu = RateFunction::tabulated({-1.0, 1.0}, {1.0, 1.0}, {1.0, 1.0});
    params.omega = RateFunction::step_pair(1.0, 1.0);
    const PriceGrid grid(-4.0, 4.0, 200);
    EvolutionConfig zf;
    zf.boundary = Boundary::zero_flux;
    const MsdCurve marched = stationary_numeric(grid, params, zf, 1e-9);
    ModelParams constant = params;
    constant.nu = RateFunction::constant(1.0);
    const MsdCurve direct = stationary_numeric(grid, constant, zf);
    CHECK(relative_linf_distance(marched, direct) < 1e-5);
  }
}

TEST_CASE("stationary_numeric refuses books with no steady state") {
  const PriceGrid grid(-2.0, 2.0, 40);
  EvolutionConfig config;
  ModelParams params = free_diffusion();
  params.omega = RateFunction::constant(1.0);  // nu = 0: unbounded growth
  CHECK_THROWS_AS(stationary_numeric(grid, params, config), NumericError);
  params.nu = RateFunction::constant(0.5);
  params.omega = RateFunction::exponential_pair(1.0, 1.0, 1.0);  // nu < D mu^2
  CHECK_THROWS_AS(stationary_numeric(grid, params, config), NumericError);
  params.nu = RateFunction::constant(2.0);
  EvolutionConfig hold;
  hold.boundary = Boundary::dirichlet_hold;
  CHECK_THROWS_AS(stationary_numeric(grid, params, hold), ValidationError);
}

TEST_CASE("evolve reports and bounds the clamped negative mass") {
  // a needle against a coarse Crank-Nicolson step rings negative; the clamp
  // budget aborts instead of silently creating mass
  const PriceGrid grid(-1.0, 1.0, 200);
  std::vector<double> spike(grid.nodes(), 0.0);
  spike[100] = 1000.0;
  const MsdCurve initial(grid, spike, spike);
  EvolutionConfig config;
  config.boundary = Boundary::zero_flux;
  config.dt = 0.05;
  CHECK_THROWS_AS(evolve(initial, free_diffusion(), config, 0.05), NumericError);

  // smooth cases never clamp
  const PriceGrid fine(-4.0, 4.0, 200);
  EvolveStats stats;
  evolve(gaussian_bump(fine, 0.0, 0.5, 1.0), free_diffusion(),
         EvolutionConfig{1e-3, Scheme::crank_nicolson, Boundary::zero_flux}, 0.2, &stats);
  CHECK(stats.clamped_mass == 0.0);
  CHECK(stats.steps == 200);
}
