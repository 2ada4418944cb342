#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <vector>

#include <doctest.h>

#include "msdlab/analytics.hpp"
#include "msdlab/auction.hpp"
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

ModelParams step_book() {
  ModelParams params;
  params.diffusivity = 1.0;
  params.nu = RateFunction::constant(1.0);
  params.omega = RateFunction::step_pair(1.0, 1.0);
  return params;
}

}  // namespace

TEST_CASE("clearing a symmetric book lands on zero") {
  const PriceGrid grid(-4.0, 4.0, 800);
  const MsdCurve curve = stationary_closed_form(grid, step_book());
  const AuctionOutcome outcome = clear(curve);
  CHECK(std::abs(outcome.y_star) < 1e-12);
  CHECK(outcome.v_star > 0.0);
  // clearing balances the cumulatives
  CHECK(cumulative_supply(curve, outcome.y_star) ==
        doctest::Approx(cumulative_demand(curve, outcome.y_star)).epsilon(1e-10));
}

TEST_CASE("clearing the exponential book reproduces the walrasian solution") {
  // wide enough that the un-truncated exponential tails (0.5 e^{-12}) stay
  // below the 1e-4 relative tolerance on v*
  const PriceGrid grid(-12.0, 12.0, 48000);
  const MsdCurve curve = stationary_closed_form(grid, exp_book());
  const AuctionOutcome outcome = clear(curve);
  CHECK(outcome.y_star == doctest::Approx(0.346573590279972655).epsilon(1e-4));
  CHECK(outcome.v_star == doctest::Approx(0.707106781186547524).epsilon(1e-4));
}

TEST_CASE("extra volume shifts the clearing price monotonically") {
  const PriceGrid grid(-4.0, 4.0, 800);
  const MsdCurve curve = stationary_closed_form(grid, step_book());
  const double up = clear_with_extra(curve, 0.05).y_star;
  const double down = clear_with_extra(curve, -0.05).y_star;
  CHECK(up > 0.0);
  CHECK(down < 0.0);
  CHECK(up == doctest::Approx(-down).epsilon(1e-10));  // symmetric book
  CHECK_THROWS_AS(clear_with_extra(curve, std::numeric_limits<double>::quiet_NaN()),
                  ValidationError);
}

TEST_CASE("saturation carries the largest fillable volume") {
  const PriceGrid grid(-2.0, 2.0, 100);
  const MsdCurve curve = stationary_closed_form(grid, step_book());
  const double supply_total = curve.total_supply();
  try {
    clear_with_extra(curve, supply_total * 2.0);
    FAIL("expected SaturationError");
  } catch (const SaturationError& e) {
    CHECK(e.max_fillable() == doctest::Approx(supply_total).epsilon(1e-12));
  }
}

TEST_CASE("clearing an empty side is an error") {
  const PriceGrid grid(-1.0, 1.0, 4);
  CHECK_THROWS_AS(clear(MsdCurve::zero(grid)), NumericError);
}

TEST_CASE("truncation removes exactly the transacted volume from both sides") {
  const PriceGrid grid(-8.0, 8.0, 1600);
  const MsdCurve curve = stationary_closed_form(grid, exp_book());
  const AuctionOutcome outcome = clear(curve);
  const MsdCurve after = truncate(curve, outcome.y_star);
  CHECK(curve.total_supply() - after.total_supply() ==
        doctest::Approx(outcome.v_star).epsilon(1e-9));
  CHECK(curve.total_demand() - after.total_demand() ==
        doctest::Approx(outcome.v_star).epsilon(1e-9));
  // supply vanishes at and below the clearing price, demand above
  for (std::size_t k = 0; k < grid.nodes(); ++k) {
    if (grid.node(k) <= outcome.y_star) CHECK(after.rho_s[k] == 0.0);
    if (grid.node(k) >= outcome.y_star) CHECK(after.rho_d[k] == 0.0);
  }
}

TEST_CASE("truncation at the far ends clears a whole side") {
  const PriceGrid grid(-1.0, 1.0, 4);
  const MsdCurve curve(grid, {1.0, 1.0, 1.0, 1.0, 1.0}, {1.0, 1.0, 1.0, 1.0, 1.0});
  const MsdCurve all_supply_gone = truncate(curve, 1.0);
  CHECK(all_supply_gone.total_supply() == 0.0);
  const MsdCurve all_demand_gone = truncate(curve, -1.0);
  CHECK(all_demand_gone.total_demand() == 0.0);
}

TEST_CASE("auction sequences settle into a cycle") {
  ModelParams params = step_book();
  params.tau = 0.1;
  const PriceGrid grid(-2.0, 2.0, 200);
  const MsdCurve initial = absorbing_stationary_curve(grid, params);
  EvolutionConfig config;
  config.dt = params.tau / 50.0;
  config.boundary = Boundary::dirichlet_hold;
  SequenceOptions options;
  options.stop_on_cycle = true;
  options.cycle_tol = 1e-7;
  options.record_curves = true;
  const AuctionSeries series = run_auction_sequence(initial, params, config, 400, options);
  REQUIRE(series.converged_at.has_value());
  CHECK(*series.converged_at < 400);
  const AuctionOutcome& last = series.outcomes.back();
  // the cut-cell fold biases the crossing by a small fraction of a cell
  CHECK(std::abs(last.y_star) < grid.dy() / 50.0);
  // steady-cycle volume approaches L D tau from below; at nu tau = 0.1 the
  // book is still visibly below the tau -> 0 limit
  const double v_ref = 1.0 * 1.0 * params.tau;  // L = omega0/sqrt(nu D) = 1
  CHECK(last.v_star / v_ref > 0.70);
  CHECK(last.v_star / v_ref < 1.00);
  REQUIRE(last.pre_curve.has_value());
  REQUIRE(last.post_curve.has_value());
  CHECK(last.pre_curve->total_supply() - last.post_curve->total_supply() ==
        doctest::Approx(last.v_star).epsilon(1e-9));
  // times accumulate in tau steps
  CHECK(series.outcomes[0].time == doctest::Approx(params.tau));
  CHECK(series.outcomes[1].time == doctest::Approx(2.0 * params.tau));
}

TEST_CASE("auction series csv schema") {
  ModelParams params = step_book();
  params.tau = 0.2;
  const PriceGrid grid(-2.0, 2.0, 100);
  const MsdCurve initial = absorbing_stationary_curve(grid, params);
  EvolutionConfig config;
  config.dt = 0.004;
  config.boundary = Boundary::dirichlet_hold;
  const AuctionSeries series = run_auction_sequence(initial, params, config, 3, {});
  const auto path = std::filesystem::temp_directory_path() / "msdlab_auction_series.csv";
  write_auction_series_csv(series, path.string());
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  CHECK(line == "auction_index,time,y_star,v_star,q_extra");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == 3);
}
