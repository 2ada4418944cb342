#include <cmath>
#include <filesystem>
#include <fstream>
#include <vector>

#include <doctest.h>

#include "msdlab/errors.hpp"
#include "msdlab/wiener_hopf.hpp"

using namespace msd;

namespace {

std::vector<double> sample(double u_max, double du, double (*f)(double)) {
  std::vector<double> out;
  const auto n = static_cast<std::size_t>(std::llround(u_max / du));
  out.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) out.push_back(f(du * static_cast<double>(i)));
  return out;
}

}  // namespace

TEST_CASE("kernel application matches closed-form images") {
  const double u_max = 16.0;
  const double du = 0.025;

  // K[1](u) = Phi(u / sqrt(2)); frozen at u = 1: (1 + erf(0.5)) / 2
  const std::vector<double> ones = sample(u_max, du, [](double) { return 1.0; });
  const std::vector<double> image_ones = apply_kernel(ones, u_max, du);
  const auto at = [&](double u) { return static_cast<std::size_t>(std::llround(u / du)); };
  CHECK(image_ones[at(1.0)] == doctest::Approx(0.760249938906523269).epsilon(1e-10));
  // half-line kernel: image at 8 misses exactly the mass below zero
  CHECK(image_ones[at(8.0)] ==
        doctest::Approx(1.0 - 0.5 * 1.54172579002800189e-8).epsilon(1e-13));

  // K[w](u) = u Phi(u/sqrt(2)) + e^{-u^2/4} / sqrt(pi)
  const std::vector<double> ramp = sample(u_max, du, [](double u) { return u; });
  const std::vector<double> image_ramp = apply_kernel(ramp, u_max, du);
  CHECK(image_ramp[at(0.0)] == doctest::Approx(0.564189583547756287).epsilon(1e-10));
  CHECK(image_ramp[at(1.0)] == doctest::Approx(1.19964122837424567).epsilon(1e-10));
  // far from the boundary the ramp is reproduced
  CHECK(image_ramp[at(10.0)] == doctest::Approx(10.0).epsilon(1e-10));
}

TEST_CASE("fixed point converges to the universal shape") {
  FixedPointOptions options;
  options.u_max = 12.0;
  options.du = 0.05;
  const PhiSolution solution = solve_fixed_point(options);
  CHECK(std::abs(solution.u0 - 0.824) < 0.01);
  CHECK(solution.slope == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(solution.residual < 1e-6);  // discretization-limited at du = 0.05
  CHECK(solution.iterations > 10);
  REQUIRE(solution.delta_history.size() == solution.iterations);
  // contraction: changes decay by orders of magnitude
  CHECK(solution.delta_history.back() < 1e-9);

  // phi is positive, increasing, and asymptotically affine with the fitted u0
  REQUIRE(solution.u.size() == solution.phi.size());
  for (std::size_t i = 1; i < solution.phi.size(); ++i) {
    CHECK(solution.phi[i] > 0.0);
    CHECK(solution.phi[i] >= solution.phi[i - 1]);
  }
  const std::size_t tail = solution.u.size() - 1;
  CHECK(solution.phi[tail] == doctest::Approx(solution.u[tail] + solution.u0).epsilon(1e-4));
  // boundary value phi(0) is finite and lands at ~1.0
  CHECK(solution.phi[0] > 0.3);
  CHECK(solution.phi[0] < 1.2);
}

TEST_CASE("fixed point options are validated") {
  FixedPointOptions options;
  options.u_max = 8.0;  // too small to fit the affine window
  CHECK_THROWS_AS(solve_fixed_point(options), ValidationError);
  options.u_max = 16.0;
  options.du = 0.2;  // too coarse
  CHECK_THROWS_AS(solve_fixed_point(options), ValidationError);
  options.du = 0.025;
  options.max_iterations = 3;
  CHECK_THROWS_AS(solve_fixed_point(options), NumericError);
}

TEST_CASE("phi csv and metadata files") {
  FixedPointOptions options;
  options.u_max = 12.0;
  options.du = 0.05;
  const PhiSolution solution = solve_fixed_point(options);
  const auto dir = std::filesystem::temp_directory_path() / "msdlab_wh";
  std::filesystem::create_directories(dir);
  const auto csv = dir / "phi.csv";
  const auto meta = dir / "meta.txt";
  write_phi_csv(solution, csv.string(), meta.string());
  std::ifstream in(csv);
  std::string line;
  std::getline(in, line);
  CHECK(line == "u,phi");
  std::size_t rows = 0;
  while (std::getline(in, line)) ++rows;
  CHECK(rows == solution.u.size());
  std::ifstream meta_in(meta);
  std::getline(meta_in, line);
  CHECK(line.rfind("u0=", 0) == 0);
}

TEST_CASE("auction cycles approach the universal shape as tau shrinks") {
  ModelParams params;
  params.diffusivity = 1.0;
  params.nu = RateFunction::constant(0.01);
  params.omega = RateFunction::step_pair(0.1, 0.1);
  FixedPointOptions options;
  options.u_max = 12.0;
  options.du = 0.05;
  const PhiSolution solution = solve_fixed_point(options);
  const std::vector<CycleComparison> rows =
      compare_with_auction_sequence(params, {0.1, 0.025}, solution);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].tau == 0.1);
  // quartering tau halves the sup deviation (sqrt(tau) ansatz error)
  CHECK(rows[1].deviation < 0.65 * rows[0].deviation);
  CHECK(rows[1].deviation < 0.2);
}
