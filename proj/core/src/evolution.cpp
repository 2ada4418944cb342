#include "msdlab/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "msdlab/analytics.hpp"
#include "msdlab/errors.hpp"
#include "msdlab/numerics.hpp"

namespace msd {

namespace {

constexpr double kClampBudget = 1e-3;  // tolerated clipped mass, relative to the book

struct SideFields {
  std::vector<double> nu;
  std::vector<double> omega;
  double pin_lo = 0.0;
  double pin_hi = 0.0;
};

SideFields sample_side(const PriceGrid& grid, const ModelParams& params, Side side) {
  SideFields fields;
  fields.nu.resize(grid.nodes());
  fields.omega.resize(grid.nodes());
  for (std::size_t k = 0; k < grid.nodes(); ++k) {
    const double y = grid.node(k);
    fields.nu[k] = params.nu(side, y);
    fields.omega[k] = params.omega(side, y);
  }
  return fields;
}

double clamp_negative(std::vector<double>& rho) {
  double clipped = 0.0;
  const std::size_t n = rho.size();
  for (std::size_t k = 0; k < n; ++k) {
    if (rho[k] < 0.0) {
      const double weight = (k == 0 || k == n - 1) ? 0.5 : 1.0;
      clipped += -rho[k] * weight;
      rho[k] = 0.0;
    }
  }
  return clipped;
}

class SideStepper {
 public:
  SideStepper(const PriceGrid& grid, const SideFields& fields, const EvolutionConfig& config,
              double diffusivity, double dt)
      : fields_(fields), config_(config), dt_(dt) {
    lambda_ = diffusivity * dt / (grid.dy() * grid.dy());
    const std::size_t n = grid.nodes();
    if (config.scheme == Scheme::crank_nicolson) {
      lower_.assign(n, -0.5 * lambda_);
      upper_.assign(n, -0.5 * lambda_);
      diag_.resize(n);
      for (std::size_t k = 0; k < n; ++k) {
        diag_[k] = 1.0 + lambda_ + 0.5 * fields.nu[k] * dt;
      }
      if (config.boundary == Boundary::zero_flux) {
        upper_[0] = -lambda_;
        lower_[n - 1] = -lambda_;
      } else {
        diag_[0] = diag_[n - 1] = 1.0;
        upper_[0] = 0.0;
        lower_[n - 1] = 0.0;
      }
      scratch_diag_.resize(n);
      rhs_.resize(n);
    }
  }

  void step(std::vector<double>& rho) {
    const std::size_t n = rho.size();
    if (config_.scheme == Scheme::explicit_euler) {
      next_.resize(n);
      for (std::size_t k = 1; k + 1 < n; ++k) {
        next_[k] = rho[k] + lambda_ * (rho[k + 1] - 2.0 * rho[k] + rho[k - 1]) +
                   dt_ * (fields_.omega[k] - fields_.nu[k] * rho[k]);
      }
      if (config_.boundary == Boundary::zero_flux) {
        next_[0] = rho[0] + 2.0 * lambda_ * (rho[1] - rho[0]) +
                   dt_ * (fields_.omega[0] - fields_.nu[0] * rho[0]);
        next_[n - 1] = rho[n - 1] + 2.0 * lambda_ * (rho[n - 2] - rho[n - 1]) +
                       dt_ * (fields_.omega[n - 1] - fields_.nu[n - 1] * rho[n - 1]);
      } else {
        next_[0] = fields_.pin_lo;
        next_[n - 1] = fields_.pin_hi;
      }
      rho.swap(next_);
      return;
    }
    scratch_diag_ = diag_;
    for (std::size_t k = 1; k + 1 < n; ++k) {
      rhs_[k] = rho[k] + 0.5 * lambda_ * (rho[k + 1] - 2.0 * rho[k] + rho[k - 1]) -
                0.5 * fields_.nu[k] * dt_ * rho[k] + dt_ * fields_.omega[k];
    }
    if (config_.boundary == Boundary::zero_flux) {
      rhs_[0] = rho[0] + lambda_ * (rho[1] - rho[0]) - 0.5 * fields_.nu[0] * dt_ * rho[0] +
                dt_ * fields_.omega[0];
      rhs_[n - 1] = rho[n - 1] + lambda_ * (rho[n - 2] - rho[n - 1]) -
                    0.5 * fields_.nu[n - 1] * dt_ * rho[n - 1] + dt_ * fields_.omega[n - 1];
    } else {
      rhs_[0] = fields_.pin_lo;
      rhs_[n - 1] = fields_.pin_hi;
    }
    num::solve_tridiagonal(lower_, scratch_diag_, upper_, rhs_);
    rho = rhs_;
  }

 private:
  const SideFields& fields_;
  const EvolutionConfig& config_;
  double dt_;
  double lambda_ = 0.0;
  std::vector<double> lower_, diag_, upper_, scratch_diag_, rhs_, next_;
};

void resolve_pins(const MsdCurve& initial, const ModelParams& params,
                  const EvolutionConfig& config, SideFields& supply, SideFields& demand) {
  const PriceGrid& grid = initial.grid;
  if (config.boundary == Boundary::dirichlet_stationary) {
    supply.pin_lo = stationary_density_at(params, Side::sell, grid.y_min());
    supply.pin_hi = stationary_density_at(params, Side::sell, grid.y_max());
    demand.pin_lo = stationary_density_at(params, Side::buy, grid.y_min());
    demand.pin_hi = stationary_density_at(params, Side::buy, grid.y_max());
  } else if (config.boundary == Boundary::dirichlet_hold) {
    supply.pin_lo = initial.rho_s.front();
    supply.pin_hi = initial.rho_s.back();
    demand.pin_lo = initial.rho_d.front();
    demand.pin_hi = initial.rho_d.back();
  }
}

}  // namespace

MsdCurve evolve(const MsdCurve& initial, const ModelParams& params, const EvolutionConfig& config,
                double t, EvolveStats* stats) {
  validate(params);
  if (!(t >= 0.0) || !std::isfinite(t)) throw ValidationError("evolve: t must be finite, >= 0");
  if (!(config.dt > 0.0)) throw ValidationError("evolve: dt must be > 0");
  if (stats != nullptr) *stats = EvolveStats{};
  if (t == 0.0) return initial;

  const PriceGrid& grid = initial.grid;
  auto steps = static_cast<std::size_t>(std::ceil(t / config.dt - 1e-12));
  if (steps == 0) steps = 1;
  const double dt = t / static_cast<double>(steps);
  if (config.scheme == Scheme::explicit_euler &&
      params.diffusivity * dt / (grid.dy() * grid.dy()) > 0.25 + 1e-12) {
    throw ValidationError("evolve: explicit scheme needs D dt / dy^2 <= 0.25");
  }

  SideFields supply = sample_side(grid, params, Side::sell);
  SideFields demand = sample_side(grid, params, Side::buy);
  resolve_pins(initial, params, config, supply, demand);

  SideStepper supply_step(grid, supply, config, params.diffusivity, dt);
  SideStepper demand_step(grid, demand, config, params.diffusivity, dt);

  std::vector<double> rho_s = initial.rho_s;
  std::vector<double> rho_d = initial.rho_d;
  double clamped = 0.0;
  double reference = num::trapezoid(rho_s, grid.dy()) + num::trapezoid(rho_d, grid.dy());
  for (std::size_t step = 0; step < steps; ++step) {
    supply_step.step(rho_s);
    demand_step.step(rho_d);
    clamped += (clamp_negative(rho_s) + clamp_negative(rho_d)) * grid.dy();
    reference = std::max(reference,
                         num::trapezoid(rho_s, grid.dy()) + num::trapezoid(rho_d, grid.dy()));
    if (clamped > kClampBudget * reference) {
      throw NumericError("evolve: clipped negative mass exceeded 0.1% of the book");
    }
  }
  if (stats != nullptr) {
    stats->clamped_mass = clamped;
    stats->reference_mass = reference;
    stats->steps = steps;
  }
  return MsdCurve(grid, std::move(rho_s), std::move(rho_d));
}

namespace {

double normal_cdf(double z) { return 0.5 * std::erfc(-z / 1.4142135623730950488); }

// Time-integrated deposition for the propagator solution, evaluated per node.
double green_source(const ModelParams& params, Side side, double nu, double y, double t) {
  const double diffusivity = params.diffusivity;
  return std::visit(
      [&](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, ConstantRate>) {
          const double decay = nu * t < 1e-14 ? t : -std::expm1(-nu * t) / nu;
          return r.level * decay;
        } else if constexpr (std::is_same_v<T, ExponentialPairRate>) {
          const double a = diffusivity * r.mu * r.mu - nu;
          const double growth = std::abs(a) * t < 1e-14 ? t : std::expm1(a * t) / a;
          const double amp = side == Side::buy ? r.omega_plus * std::exp(-r.mu * y)
                                               : r.omega_minus * std::exp(r.mu * y);
          return amp * growth;
        } else if constexpr (std::is_same_v<T, StepPairRate>) {
          const double level = side == Side::buy ? r.omega0_plus : r.omega0_minus;
          const double sign = side == Side::buy ? -1.0 : 1.0;
          const auto f = [&](double root_s) {
            const double s = root_s * root_s;
            double smeared;
            if (s == 0.0) {
              smeared = sign * y > 0.0 ? 1.0 : (y == 0.0 ? 0.5 : 0.0);
            } else {
              smeared = normal_cdf(sign * y / std::sqrt(2.0 * diffusivity * s));
            }
            return 2.0 * root_s * std::exp(-nu * s) * level * smeared;
          };
          return num::simpson(f, 0.0, std::sqrt(t), 200);
        } else {
          const auto f = [&](double root_s) {
            const double s = root_s * root_s;
            double smeared;
            if (s == 0.0) {
              smeared = params.omega(side, y);
            } else {
              const double var = 2.0 * diffusivity * s;
              const double sd = std::sqrt(var);
              const auto& values = side == Side::buy ? r.buy_values : r.sell_values;
              smeared = num::convolve_linear_gaussian(r.y, values, y, var) +
                        values.front() * normal_cdf((r.y.front() - y) / sd) +
                        values.back() * normal_cdf((y - r.y.back()) / sd);
            }
            return 2.0 * root_s * std::exp(-nu * s) * smeared;
          };
          return num::simpson(f, 0.0, std::sqrt(t), 200);
        }
      },
      params.omega.spec());
}

}  // namespace

MsdCurve evolve_green(const MsdCurve& initial, const ModelParams& params, double t) {
  validate(params);
  if (!(t >= 0.0) || !std::isfinite(t)) {
    throw ValidationError("evolve_green: t must be finite, >= 0");
  }
  const auto nu_level = params.nu.constant_level();
  if (!nu_level) throw ValidationError("evolve_green: constant cancellation required");
  if (t == 0.0) return initial;
  const double nu = *nu_level;
  const PriceGrid& grid = initial.grid;
  const auto nodes = grid.node_values();
  const double decay = std::exp(-nu * t);
  const double variance = 2.0 * params.diffusivity * t;
  std::vector<double> rho_s(grid.nodes());
  std::vector<double> rho_d(grid.nodes());
  for (std::size_t k = 0; k < grid.nodes(); ++k) {
    const double y = nodes[k];
    rho_s[k] = decay * num::convolve_linear_gaussian(nodes, initial.rho_s, y, variance) +
               green_source(params, Side::sell, nu, y, t);
    rho_d[k] = decay * num::convolve_linear_gaussian(nodes, initial.rho_d, y, variance) +
               green_source(params, Side::buy, nu, y, t);
  }
  for (double& v : rho_s) v = std::max(v, 0.0);
  for (double& v : rho_d) v = std::max(v, 0.0);
  return MsdCurve(grid, std::move(rho_s), std::move(rho_d));
}

MsdCurve stationary_numeric(const PriceGrid& grid, const ModelParams& params,
                            const EvolutionConfig& config, double tol, double max_time) {
  validate(params);
  if (params.stationary_state_exists() == false) {
    throw NumericError(
        "no stationary state: deposition outruns cancellation (for exponential deposition this "
        "requires nu > D mu^2)");
  }
  if (config.boundary == Boundary::dirichlet_hold) {
    throw ValidationError("stationary solve: dirichlet_hold has no initial curve to hold");
  }
  const auto nu_level = params.nu.constant_level();
  if (nu_level && *nu_level > 0.0) {
    // Direct solve of D rho'' - nu rho + omega = 0 per side.
    const std::size_t n = grid.nodes();
    const double dy2 = grid.dy() * grid.dy();
    const double diff = params.diffusivity / dy2;
    auto solve_side = [&](Side side) {
      std::vector<double> lower(n, diff);
      std::vector<double> upper(n, diff);
      std::vector<double> diag(n, -2.0 * diff - *nu_level);
      std::vector<double> rhs(n);
      for (std::size_t k = 0; k < n; ++k) rhs[k] = -params.omega(side, grid.node(k));
      if (config.boundary == Boundary::zero_flux) {
        upper[0] = 2.0 * diff;
        lower[n - 1] = 2.0 * diff;
      } else {
        diag[0] = diag[n - 1] = 1.0;
        upper[0] = 0.0;
        lower[n - 1] = 0.0;
        rhs[0] = stationary_density_at(params, side, grid.y_min());
        rhs[n - 1] = stationary_density_at(params, side, grid.y_max());
      }
      num::solve_tridiagonal(lower, diag, upper, rhs);
      for (double& v : rhs) v = std::max(v, 0.0);
      return rhs;
    };
    return MsdCurve(grid, solve_side(Side::sell), solve_side(Side::buy));
  }

  EvolutionConfig march = config;
  march.scheme = Scheme::crank_nicolson;
  MsdCurve current = MsdCurve::zero(grid);
  const double chunk = std::max(50.0 * march.dt, 1.0);
  double elapsed = 0.0;
  while (elapsed < max_time) {
    MsdCurve next = evolve(current, params, march, chunk);
    const double change = relative_linf_distance(next, current) / chunk;
    current = std::move(next);
    elapsed += chunk;
    if (change < tol) return current;
  }
  throw NumericError("stationary solve: no convergence within max_time");
}

}  // namespace msd
