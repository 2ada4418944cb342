#include <cmath>
#include <limits>
#include <vector>

#include <doctest.h>

#include "msdlab/analytics.hpp"
#include "msdlab/errors.hpp"

using namespace msd;

namespace {

ModelParams exp_book() {
  ModelParams params;
  params.diffusivity = 1.0;
  params.nu = RateFunction::constant(3.0);
  params.omega = RateFunction::exponential_pair(2.0, 1.0, 1.0);
  return params;
}

ModelParams step_book(double omega0 = 1.0, double nu = 1.0) {
  ModelParams params;
  params.diffusivity = 1.0;
  params.nu = RateFunction::constant(nu);
  params.omega = RateFunction::step_pair(omega0, omega0);
  return params;
}

// piecewise-linear clone of a rate on dense knots, for cross-validating the
// tabulated (quadrature) code paths against the closed forms
RateFunction tabulated_clone(const RateFunction& rate, double lo, double hi, std::size_t n) {
  std::vector<double> knots;
  std::vector<double> buy;
  std::vector<double> sell;
  for (std::size_t i = 0; i <= n; ++i) {
    const double y = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n);
    knots.push_back(y);
    buy.push_back(rate(Side::buy, y));
    sell.push_back(rate(Side::sell, y));
  }
  return RateFunction::tabulated(std::move(knots), std::move(buy), std::move(sell));
}

}  // namespace

TEST_CASE("stationary closed forms evaluate the textbook profiles") {
  const ModelParams e = exp_book();
  // demand: 2 e^{-y} / (3 - 1), supply: e^{+y} / 2
  CHECK(stationary_density_at(e, Side::buy, 0.5) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
  CHECK(stationary_density_at(e, Side::sell, 0.5) ==
        doctest::Approx(0.5 * std::exp(0.5)).epsilon(1e-14));

  const ModelParams s = step_book(2.0, 4.0);
  // omega0/(2 nu) [1 -/+ sign(y)(1 - e^{-sqrt(nu/D)|y|})], alpha = 2
  const double far_demand = stationary_density_at(s, Side::buy, -10.0);
  CHECK(far_demand == doctest::Approx(0.5).epsilon(1e-8));  // omega0/nu
  const double at_zero = stationary_density_at(s, Side::buy, 0.0);
  CHECK(at_zero == doctest::Approx(0.25).epsilon(1e-14));   // omega0/(2 nu)
  const double above = stationary_density_at(s, Side::buy, 0.5);
  CHECK(above == doctest::Approx(0.25 * std::exp(-1.0)).epsilon(1e-12));
  const double below = stationary_density_at(s, Side::buy, -0.5);
  CHECK(below == doctest::Approx(0.25 * (2.0 - std::exp(-1.0))).epsilon(1e-12));

  ModelParams flat = s;
  flat.omega = RateFunction::constant(2.0);
  CHECK(stationary_density_at(flat, Side::sell, 1.3) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("screening integral reproduces the closed forms from tabulated input") {
  const PriceGrid grid(-2.0, 2.0, 100);
  ModelParams exp_tab = exp_book();
  exp_tab.omega = tabulated_clone(exp_tab.omega, -15.0, 15.0, 600);
  const MsdCurve via_integral = stationary_closed_form(grid, exp_tab);
  const MsdCurve closed = stationary_closed_form(grid, exp_book());
  CHECK(relative_linf_distance(via_integral, closed) < 2e-3);

  ModelParams step_tab = step_book();
  step_tab.omega = tabulated_clone(step_tab.omega, -15.0, 15.0, 3000);
  const MsdCurve via_integral_step = stationary_closed_form(grid, step_tab);
  const MsdCurve closed_step = stationary_closed_form(grid, step_book());
  CHECK(relative_linf_distance(via_integral_step, closed_step) < 2e-3);
}

TEST_CASE("stationary closed form rejects unusable cancellation") {
  ModelParams params = exp_book();
  params.nu = RateFunction::tabulated({-1.0, 1.0}, {1.0, 1.0}, {1.0, 1.0});
  const PriceGrid grid(-1.0, 1.0, 4);
  CHECK_THROWS_AS(stationary_closed_form(grid, params), ValidationError);
  params = exp_book();
  params.nu = RateFunction::constant(0.5);  // below D mu^2
  CHECK_THROWS_AS(stationary_closed_form(grid, params), NumericError);
}

TEST_CASE("walras crossing of the exponential book") {
  const WalrasSolution w = walras_price_volume(2.0, 1.0, 1.0, 3.0, 1.0);
  CHECK(w.y_star == doctest::Approx(0.346573590279972655).epsilon(1e-15));
  CHECK(w.v_star == doctest::Approx(0.707106781186547524).epsilon(1e-15));
  CHECK_THROWS_AS(walras_price_volume(2.0, 1.0, 1.0, 0.5, 1.0), NumericError);
  CHECK_THROWS_AS(walras_price_volume(0.0, 1.0, 1.0, 3.0, 1.0), ValidationError);
}

TEST_CASE("kyle lambda closed forms") {
  CHECK(kyle_lambda(exp_book()) == doctest::Approx(0.707106781186547524).epsilon(1e-15));
  CHECK(kyle_lambda(step_book(2.0, 3.0)) == doctest::Approx(1.5).epsilon(1e-15));
  ModelParams flat = step_book();
  flat.omega = RateFunction::constant(4.0);
  CHECK(kyle_lambda(flat) == doctest::Approx(1.0 / 8.0).epsilon(1e-15));
}

TEST_CASE("symmetric-integral lambda agrees with the closed forms") {
  // step: sqrt(nu D) alpha / omega0 = nu / omega0
  CHECK(kyle_lambda_symmetric_integral(step_book(2.0, 4.0)) == doctest::Approx(2.0).epsilon(1e-12));
  // constant: alpha sqrt(nu D) / (2 w) = nu / (2 w)
  ModelParams flat = step_book(1.0, 4.0);
  flat.omega = RateFunction::constant(4.0);
  CHECK(kyle_lambda_symmetric_integral(flat) == doctest::Approx(0.5).epsilon(1e-12));
  // tabulated step clone goes through the quadrature path
  ModelParams tab = step_book(2.0, 4.0);
  tab.omega = tabulated_clone(tab.omega, -15.0, 15.0, 6000);
  CHECK(kyle_lambda_symmetric_integral(tab) == doctest::Approx(2.0).epsilon(2e-3));
}

TEST_CASE("liquidity scale of the near-price slope") {
  CHECK(liquidity_L(step_book(3.0, 4.0)) == doctest::Approx(1.5).epsilon(1e-14));
  // exponential: Omega_minus / (D (alpha - mu)), alpha = sqrt(3)
  CHECK(liquidity_L(exp_book()) ==
        doctest::Approx(1.0 / (std::sqrt(3.0) - 1.0)).epsilon(1e-12));
  ModelParams tab = step_book(3.0, 4.0);
  tab.omega = tabulated_clone(tab.omega, -15.0, 15.0, 6000);
  CHECK(liquidity_L(tab) == doctest::Approx(1.5).epsilon(2e-3));
}

TEST_CASE("absorbing-boundary stationary profile") {
  const ModelParams s = step_book(2.0, 1.0);  // alpha = 1, L = 2
  CHECK(phi_stationary(0.0, s) == 0.0);
  // closed form (omega0/nu)(1 - e^{-alpha y})
  CHECK(phi_stationary(1.0, s) == doctest::Approx(2.0 * (1.0 - std::exp(-1.0))).epsilon(1e-12));
  // slope at the boundary is the liquidity scale
  CHECK(phi_stationary(1e-6, s) / 1e-6 == doctest::Approx(2.0).epsilon(1e-5));
  CHECK_THROWS_AS(phi_stationary(-0.1, s), ValidationError);

  // exponential closed form Omega_minus (e^{mu y} - e^{-alpha y}) / (nu - D mu^2)
  const ModelParams e = exp_book();
  const double expect = (std::exp(1.0) - std::exp(-std::sqrt(3.0))) / 2.0;
  CHECK(phi_stationary(1.0, e) == doctest::Approx(expect).epsilon(1e-12));

  // tabulated clone exercises the nested quadrature
  ModelParams tab = step_book(2.0, 1.0);
  tab.omega = tabulated_clone(tab.omega, -15.0, 15.0, 3000);
  CHECK(phi_stationary(1.0, tab) ==
        doctest::Approx(2.0 * (1.0 - std::exp(-1.0))).epsilon(5e-3));

  const PriceGrid grid(-3.0, 3.0, 120);
  const MsdCurve curve = absorbing_stationary_curve(grid, s);
  CHECK(curve.rho_s[grid.cell_of(-1.0)] == 0.0);               // supply empty below
  CHECK(curve.demand_density_at(-1.0) ==
        doctest::Approx(2.0 * (1.0 - std::exp(-1.0))).epsilon(1e-9));
  CHECK(curve.supply_density_at(3.0) == doctest::Approx(2.0 * (1.0 - std::exp(-3.0))).epsilon(1e-9));
}

TEST_CASE("post-auction shape constants are frozen") {
  CHECK(post_auction_G(0.0, 0.824) == doctest::Approx(0.964892216843351180).epsilon(1e-15));
  CHECK(post_auction_F(0.0, 0.824) == 1.0);
  CHECK(post_auction_F(0.5, 0.824) == doctest::Approx(0.582669947193949519).epsilon(1e-14));
  CHECK(post_auction_F(1.0, 0.824) == doctest::Approx(0.315510700337794004).epsilon(1e-14));
  CHECK(post_auction_F(2.0, 0.824) == doctest::Approx(0.0723446650044987572).epsilon(1e-13));
  CHECK(post_auction_F(9.0, 0.824) > 0.0);
  CHECK(post_auction_F(9.0, 0.824) < 1e-10);  // erfc(4.5)-scale tail
}

TEST_CASE("wrong-side density integrates to G(0) L D tau") {
  const double liquidity = 1.7;
  const double diffusivity = 0.8;
  const double tau = 0.31;
  // psi(0) = 1/sqrt(pi) + u0/2
  const double width = std::sqrt(diffusivity * tau);
  CHECK(wrong_side_density(0.0, liquidity, diffusivity, tau, 0.824) ==
        doctest::Approx(liquidity * width * 0.976189583547756287).epsilon(1e-14));
  // trapezoid in u over [0, 12]
  double integral = 0.0;
  const double du = 1e-3;
  for (int i = 0; i <= 12000; ++i) {
    const double u = du * i;
    const double w = (i == 0 || i == 12000) ? 0.5 : 1.0;
    integral += w * wrong_side_density(u, liquidity, diffusivity, tau, 0.824);
  }
  integral *= du * width;  // dy = sqrt(D tau) du
  CHECK(integral == doctest::Approx(0.964892216843351180 * liquidity * diffusivity * tau)
                        .epsilon(1e-7));
}

TEST_CASE("dimensionless impact function and its asymptotes") {
  CHECK(impact_scaling_Y(0.0) == 0.0);
  CHECK(impact_scaling_Y(0.05, 0.824) == doctest::Approx(0.0277172044681763442).epsilon(1e-12));
  CHECK(impact_scaling_Y(1.0, 0.824) == doctest::Approx(0.530500918007055861).epsilon(1e-12));
  CHECK(impact_scaling_Y(10.0, 0.824) == doctest::Approx(3.50690407158207599).epsilon(1e-12));
  CHECK(impact_scaling_Y(1e4, 0.824) / std::sqrt(2e4) ==
        doctest::Approx(0.994142169423252349).epsilon(1e-12));
  CHECK(impact_scaling_Y(1e-6, 0.824) / 1e-6 ==
        doctest::Approx(0.555497048277121932).epsilon(1e-4));
  CHECK_THROWS_AS(impact_scaling_Y(-1.0), ValidationError);

  // impact_full is just the rescaled Y
  const double q = 2.5;
  const double impact = impact_full(q * 1.3 * 0.9 * 0.2, 1.3, 0.9, 0.2);
  CHECK(impact == doctest::Approx(std::sqrt(0.18) * impact_scaling_Y(q)).epsilon(1e-12));
}

TEST_CASE("near-price SD curves join continuously at the price") {
  const double liquidity = 1.2;
  const double diffusivity = 1.0;
  const double tau = 0.25;
  const double v_star = liquidity * diffusivity * tau;
  const SdPair at_zero = sd_curves_near_price(0.0, liquidity, diffusivity, tau);
  CHECK(at_zero.supply == doctest::Approx(v_star).epsilon(1e-14));
  CHECK(at_zero.demand == doctest::Approx(v_star).epsilon(1e-14));
  const double width = std::sqrt(diffusivity * tau);
  const SdPair above = sd_curves_near_price(width, liquidity, diffusivity, tau);
  CHECK(above.supply ==
        doctest::Approx(liquidity * (0.824 * width * width + 0.5 * width * width) + v_star)
            .epsilon(1e-12));
  CHECK(above.demand == doctest::Approx(v_star * post_auction_F(1.0)).epsilon(1e-12));
  const SdPair below = sd_curves_near_price(-width, liquidity, diffusivity, tau);
  CHECK(below.demand == above.supply);  // mirror symmetry
  CHECK(below.supply == above.demand);
}

TEST_CASE("impact curve labels its asymptotic regimes") {
  const ImpactCurve curve = impact_curve(1e-4, 1e5, 46, 1.0, 1.0, 0.1);
  REQUIRE(curve.points.size() == 46);
  CHECK(curve.points.front().regime == "linear");
  CHECK(curve.points.back().regime == "square_root");
  bool crossover = false;
  for (const ImpactPoint& p : curve.points) crossover = crossover || p.regime == "crossover";
  CHECK(crossover);
  CHECK_THROWS_AS(impact_curve(1.0, 0.5, 10, 1.0, 1.0, 0.1), ValidationError);
}

TEST_CASE("liquidity reports for the walrasian and cycle views") {
  const LiquidityReport walras = walrasian_liquidity_report(exp_book());
  CHECK(walras.lambda == doctest::Approx(0.707106781186547524).epsilon(1e-12));
  CHECK(walras.v_star == doctest::Approx(0.707106781186547524).epsilon(1e-12));
  CHECK(walras.liquidity == doctest::Approx(1.0 / (std::sqrt(3.0) - 1.0)).epsilon(1e-12));

  const ModelParams s = step_book(2.0, 1.0);
  const LiquidityReport cycle = cycle_liquidity_report(s, 0.04);
  CHECK(cycle.liquidity == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(cycle.v_star == doctest::Approx(2.0 * 0.04).epsilon(1e-14));
  CHECK(cycle.lambda == doctest::Approx(1.0 / (2.0 * 2.0 * 0.824 * 0.2)).epsilon(1e-12));
  CHECK_THROWS_AS(cycle_liquidity_report(s, 0.0), ValidationError);
}

TEST_CASE("curve-based lambda matches the closed form on sampled books") {
  const PriceGrid grid(-6.0, 6.0, 6000);
  const MsdCurve curve = stationary_closed_form(grid, exp_book());
  CHECK(kyle_lambda_from_curve(curve) == doctest::Approx(0.707106781186547524).epsilon(1e-5));
  // a gapped book clears at zero depth: lambda diverges
  const PriceGrid coarse(-2.0, 2.0, 4);
  const MsdCurve gapped(coarse, {0.0, 0.0, 0.0, 1.0, 2.0}, {2.0, 1.0, 0.0, 0.0, 0.0});
  CHECK(kyle_lambda_from_curve(gapped) == std::numeric_limits<double>::infinity());
}
