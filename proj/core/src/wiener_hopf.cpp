#include "msdlab/wiener_hopf.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "msdlab/analytics.hpp"
#include "msdlab/auction.hpp"
#include "msdlab/csv.hpp"
#include "msdlab/errors.hpp"
#include "msdlab/evolution.hpp"
#include "msdlab/numerics.hpp"

namespace msd {

namespace {

constexpr double kInvSqrtPi = 0.5641895835477562869;

std::vector<double> u_nodes(double u_max, double du) {
  const double ratio = u_max / du;
  const auto count = static_cast<std::size_t>(std::llround(ratio));
  if (!(u_max > 0.0) || !(du > 0.0) || std::abs(ratio - static_cast<double>(count)) > 1e-9) {
    throw ValidationError("fixed point: u_max must be a positive multiple of du");
  }
  std::vector<double> u(count + 1);
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = du * static_cast<double>(i);
  return u;
}

// Gaussian moments of the affine tail beyond A against the variance-2 kernel:
// K0 = int_A^inf k(u - w) dw, K1 = int_A^inf w k(u - w) dw.
void tail_moments(double u, double a, double& k0, double& k1) {
  const double z = 0.5 * (a - u);
  k0 = 0.5 * std::erfc(z);
  k1 = u * k0 + std::exp(-z * z) * kInvSqrtPi;
}

num::AffineFit asymptote_fit(const std::vector<double>& u, const std::vector<double>& phi) {
  const double u_max = u.back();
  std::size_t lo = 0;
  std::size_t hi = 0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (u[i] < 0.5 * u_max) lo = i + 1;
    if (u[i] <= 0.75 * u_max) hi = i;
  }
  return num::fit_affine(u, phi, lo, hi);
}

}  // namespace

std::vector<double> apply_kernel(const std::vector<double>& phi, double u_max, double du) {
  const std::vector<double> u = u_nodes(u_max, du);
  if (phi.size() != u.size()) {
    throw ValidationError("apply_kernel: sample count does not match u_max / du");
  }
  const num::AffineFit tail = asymptote_fit(u, phi);
  std::vector<double> out(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    double k0 = 0.0, k1 = 0.0;
    tail_moments(u[i], u_max, k0, k1);
    out[i] = num::convolve_linear_gaussian(u, phi, u[i], 2.0) + tail.slope * k1 +
             tail.intercept * k0;
  }
  return out;
}

PhiSolution solve_fixed_point(const FixedPointOptions& options) {
  if (!(options.u_max >= 12.0)) throw ValidationError("fixed point: u_max >= 12 required");
  if (!(options.du > 0.0) || options.du > 0.05) {
    throw ValidationError("fixed point: du in (0, 0.05] required");
  }
  if (!(options.tol > 0.0)) throw ValidationError("fixed point: tol must be > 0");
  if (options.max_iterations == 0) throw ValidationError("fixed point: max_iterations >= 1");

  PhiSolution solution;
  solution.u = u_nodes(options.u_max, options.du);
  if (options.initial.empty()) {
    solution.phi = solution.u;
  } else if (options.initial.size() == solution.u.size()) {
    solution.phi = options.initial;
  } else {
    throw ValidationError("fixed point: initial guess size does not match the grid");
  }

  bool converged = false;
  for (std::size_t it = 0; it < options.max_iterations; ++it) {
    std::vector<double> next = apply_kernel(solution.phi, options.u_max, options.du);
    const num::AffineFit fit = asymptote_fit(solution.u, next);
    solution.slope = fit.slope;
    for (double& v : next) v /= fit.slope;
    double delta = 0.0;
    for (std::size_t i = 0; i < next.size(); ++i) {
      delta = std::max(delta, std::abs(next[i] - solution.phi[i]));
    }
    solution.delta_history.push_back(delta);
    solution.phi = std::move(next);
    solution.iterations = it + 1;
    if (delta < options.tol) {
      converged = true;
      break;
    }
  }
  if (!converged) {
    std::ostringstream msg;
    msg << "fixed point: no convergence after " << solution.iterations
        << " iterations; last changes:";
    const std::size_t shown = std::min<std::size_t>(solution.delta_history.size(), 5);
    for (std::size_t i = solution.delta_history.size() - shown; i < solution.delta_history.size();
         ++i) {
      msg << ' ' << format_double(solution.delta_history[i]);
    }
    throw NumericError(msg.str());
  }

  const num::AffineFit fit = asymptote_fit(solution.u, solution.phi);
  solution.u0 = fit.intercept / fit.slope;
  const std::vector<double> image = apply_kernel(solution.phi, options.u_max, options.du);
  double residual = 0.0;
  for (std::size_t i = 0; i < solution.u.size() && solution.u[i] <= 0.5 * options.u_max; ++i) {
    residual = std::max(residual, std::abs(solution.phi[i] - image[i]));
  }
  solution.residual = residual;
  return solution;
}

std::vector<CycleComparison> compare_with_auction_sequence(const ModelParams& params,
                                                           const std::vector<double>& taus,
                                                           const PhiSolution& solution) {
  validate(params);
  const double liquidity = liquidity_L(params);
  std::vector<CycleComparison> out;
  out.reserve(taus.size());
  for (const double tau : taus) {
    if (!(tau > 0.0)) throw ValidationError("cycle comparison: tau must be > 0");
    const double width = std::sqrt(params.diffusivity * tau);
    const double dy = width / 10.0;
    // the pile-up decays over the screening length sqrt(D/nu); pinning the
    // boundary closer than that squashes the u0 offset out of the window
    const double screening = std::sqrt(params.diffusivity / *params.nu.constant_level());
    const double half_target = std::max({2.0, 12.0 * width, 3.0 * screening});
    auto half_cells = static_cast<std::size_t>(std::ceil(half_target / dy));
    const double half = dy * static_cast<double>(half_cells);
    const PriceGrid grid(-half, half, 2 * half_cells);

    ModelParams cycle_params = params;
    cycle_params.tau = tau;
    EvolutionConfig config;
    config.dt = tau / 50.0;
    config.scheme = Scheme::crank_nicolson;
    config.boundary = Boundary::dirichlet_hold;
    SequenceOptions options;
    options.stop_on_cycle = true;
    options.cycle_tol = 1e-7;
    const auto n_auctions = static_cast<std::size_t>(std::ceil(30.0 / tau));
    const MsdCurve initial = absorbing_stationary_curve(grid, cycle_params);
    const AuctionSeries series =
        run_auction_sequence(initial, cycle_params, config, n_auctions, options);

    const MsdCurve& book = series.final_pre_curve;
    const auto nodes = grid.node_values();
    double deviation = 0.0;
    for (std::size_t i = 0; i < solution.u.size() && solution.u[i] <= 3.0; ++i) {
      const double y = solution.u[i] * width;
      const double empirical =
          num::interp_linear(nodes, book.rho_s, y) / (liquidity * width);
      deviation = std::max(deviation, std::abs(empirical - solution.phi[i]));
    }
    out.push_back(CycleComparison{tau, deviation});
  }
  return out;
}

void write_phi_csv(const PhiSolution& solution, const std::string& path,
                   const std::string& metadata_path) {
  CsvWriter out(path, {"u", "phi"});
  for (std::size_t i = 0; i < solution.u.size(); ++i) {
    out.row_values({solution.u[i], solution.phi[i]});
  }
  write_key_values(metadata_path,
                   {{"u0", format_double(solution.u0)},
                    {"slope", format_double(solution.slope)},
                    {"residual", format_double(solution.residual)},
                    {"iterations", std::to_string(solution.iterations)}});
}

}  // namespace msd
