#include "msdlab/analytics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "msdlab/auction.hpp"
#include "msdlab/csv.hpp"
#include "msdlab/errors.hpp"
#include "msdlab/numerics.hpp"

namespace msd {

namespace {

constexpr double kInvSqrtPi = 0.5641895835477562869;

double require_constant_nu(const ModelParams& params) {
  const auto level = params.nu.constant_level();
  if (!level || !(*level > 0.0)) {
    throw ValidationError("analytics: constant cancellation nu > 0 required");
  }
  return *level;
}

double screening_denominator(const ModelParams& params, const ExponentialPairRate& rate,
                             double nu) {
  const double denom = nu - params.diffusivity * rate.mu * rate.mu;
  if (!(denom > 0.0)) {
    throw NumericError("no stationary state: nu <= D mu^2 for exponential deposition");
  }
  return denom;
}

// int omega(side, y') e^{-alpha |y' - y|} dy' over the whole line, with the
// clamped tabulated tails integrated in closed form.
double screening_integral(const ModelParams& params, Side side, double y, double alpha) {
  const auto* tab = params.omega.get_if<TabulatedRate>();
  const double lo = tab->y.front();
  const double hi = tab->y.back();
  const auto f = [&](double yp) {
    return params.omega(side, yp) * std::exp(-alpha * std::abs(yp - y));
  };
  double total = 0.0;
  if (y > lo && y < hi) {
    total += num::simpson(f, lo, y, 800) + num::simpson(f, y, hi, 800);
  } else {
    total += num::simpson(f, lo, hi, 1600);
  }
  const auto& values = side == Side::buy ? tab->buy_values : tab->sell_values;
  // Constant tails: int_hi^inf v e^{-alpha |y' - y|} dy' and its mirror.
  const auto tail_above = [&](double edge, double v) {
    if (y <= edge) return v * std::exp(-alpha * (edge - y)) / alpha;
    return v * (2.0 - std::exp(-alpha * (y - edge))) / alpha;
  };
  const auto tail_below = [&](double edge, double v) {
    if (y >= edge) return v * std::exp(-alpha * (y - edge)) / alpha;
    return v * (2.0 - std::exp(-alpha * (edge - y))) / alpha;
  };
  total += tail_above(hi, values.back());
  total += tail_below(lo, values.front());
  return total;
}

ModelParams mirrored(const ModelParams& params);

RateFunction mirrored_rate(const RateFunction& rate) {
  return std::visit(
      [](const auto& r) -> RateFunction {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, ConstantRate>) {
          return RateFunction::constant(r.level);
        } else if constexpr (std::is_same_v<T, ExponentialPairRate>) {
          return RateFunction::exponential_pair(r.omega_minus, r.omega_plus, r.mu);
        } else if constexpr (std::is_same_v<T, StepPairRate>) {
          return RateFunction::step_pair(r.omega0_minus, r.omega0_plus);
        } else {
          std::vector<double> y(r.y.rbegin(), r.y.rend());
          for (double& v : y) v = -v;
          std::vector<double> buy(r.sell_values.rbegin(), r.sell_values.rend());
          std::vector<double> sell(r.buy_values.rbegin(), r.buy_values.rend());
          return RateFunction::tabulated(std::move(y), std::move(buy), std::move(sell));
        }
      },
      rate.spec());
}

ModelParams mirrored(const ModelParams& params) {
  ModelParams out = params;
  out.nu = mirrored_rate(params.nu);
  out.omega = mirrored_rate(params.omega);
  return out;
}

// Wide reference grid for books without a closed-form crossing: +- 12
// screening lengths around the price.
PriceGrid reference_grid(const ModelParams& params, double nu) {
  const double screen = std::sqrt(params.diffusivity / nu);
  double half = 12.0 * screen;
  if (const auto* tab = params.omega.get_if<TabulatedRate>()) {
    half = std::max({half, std::abs(tab->y.front()), std::abs(tab->y.back())});
  }
  return PriceGrid(-half, half, 24000);
}

double psi_shape(double u, double u0) {
  return std::exp(-0.25 * u * u) * kInvSqrtPi + 0.5 * (u0 - u) * std::erfc(0.5 * u);
}

}  // namespace

MsdCurve stationary_closed_form(const PriceGrid& grid, const ModelParams& params) {
  std::vector<double> rho_s(grid.nodes());
  std::vector<double> rho_d(grid.nodes());
  for (std::size_t k = 0; k < grid.nodes(); ++k) {
    rho_s[k] = stationary_density_at(params, Side::sell, grid.node(k));
    rho_d[k] = stationary_density_at(params, Side::buy, grid.node(k));
  }
  return MsdCurve(grid, std::move(rho_s), std::move(rho_d));
}

double stationary_density_at(const ModelParams& params, Side side, double y) {
  validate(params);
  const double nu = require_constant_nu(params);
  return std::visit(
      [&](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, ConstantRate>) {
          return r.level / nu;
        } else if constexpr (std::is_same_v<T, ExponentialPairRate>) {
          const double denom = screening_denominator(params, r, nu);
          return side == Side::buy ? r.omega_plus * std::exp(-r.mu * y) / denom
                                   : r.omega_minus * std::exp(r.mu * y) / denom;
        } else if constexpr (std::is_same_v<T, StepPairRate>) {
          const double alpha = std::sqrt(nu / params.diffusivity);
          const double decay = 1.0 - std::exp(-alpha * std::abs(y));
          const double sgn = y > 0.0 ? 1.0 : (y < 0.0 ? -1.0 : 0.0);
          if (side == Side::buy) return 0.5 * r.omega0_plus / nu * (1.0 - sgn * decay);
          return 0.5 * r.omega0_minus / nu * (1.0 + sgn * decay);
        } else {
          const double alpha = std::sqrt(nu / params.diffusivity);
          const double norm = 0.5 / std::sqrt(nu * params.diffusivity);
          return norm * screening_integral(params, side, y, alpha);
        }
      },
      params.omega.spec());
}

MsdCurve absorbing_stationary_curve(const PriceGrid& grid, const ModelParams& params) {
  const ModelParams flipped = mirrored(params);
  std::vector<double> rho_s(grid.nodes(), 0.0);
  std::vector<double> rho_d(grid.nodes(), 0.0);
  for (std::size_t k = 0; k < grid.nodes(); ++k) {
    const double y = grid.node(k);
    if (y > 0.0) rho_s[k] = phi_stationary(y, params);
    if (y < 0.0) rho_d[k] = phi_stationary(-y, flipped);
  }
  return MsdCurve(grid, std::move(rho_s), std::move(rho_d));
}

WalrasSolution walras_price_volume(double omega_plus, double omega_minus, double mu, double nu,
                                   double diffusivity) {
  if (!(omega_plus > 0.0) || !(omega_minus > 0.0) || !(mu > 0.0)) {
    throw ValidationError("walras: omega_plus, omega_minus and mu must be > 0");
  }
  const double denom = nu - diffusivity * mu * mu;
  if (!(denom > 0.0)) {
    throw NumericError("no stationary state: nu <= D mu^2 for exponential deposition");
  }
  WalrasSolution out;
  out.y_star = std::log(omega_plus / omega_minus) / (2.0 * mu);
  out.v_star = std::sqrt(omega_plus * omega_minus) / (mu * denom);
  return out;
}

double kyle_lambda_from_curve(const MsdCurve& curve) {
  const AuctionOutcome outcome = clear(curve);
  const double depth =
      curve.supply_density_at(outcome.y_star) + curve.demand_density_at(outcome.y_star);
  if (!(depth > 0.0)) return std::numeric_limits<double>::infinity();
  return 1.0 / depth;
}

double kyle_lambda(const ModelParams& params) {
  validate(params);
  const double nu = require_constant_nu(params);
  if (const auto* exp_pair = params.omega.get_if<ExponentialPairRate>()) {
    const double denom = screening_denominator(params, *exp_pair, nu);
    if (!(exp_pair->omega_plus > 0.0) || !(exp_pair->omega_minus > 0.0)) {
      throw ValidationError("kyle lambda: both deposition amplitudes must be > 0");
    }
    return denom / (2.0 * std::sqrt(exp_pair->omega_plus * exp_pair->omega_minus));
  }
  if (const auto* step = params.omega.get_if<StepPairRate>();
      step != nullptr && step->omega0_plus == step->omega0_minus) {
    if (!(step->omega0_plus > 0.0)) {
      throw ValidationError("kyle lambda: deposition level must be > 0");
    }
    return nu / step->omega0_plus;
  }
  if (const auto level = params.omega.constant_level()) {
    if (!(*level > 0.0)) throw ValidationError("kyle lambda: deposition level must be > 0");
    return nu / (2.0 * *level);
  }
  const MsdCurve curve = stationary_closed_form(reference_grid(params, nu), params);
  return kyle_lambda_from_curve(curve);
}

double kyle_lambda_symmetric_integral(const ModelParams& params) {
  validate(params);
  const double nu = require_constant_nu(params);
  const double alpha = std::sqrt(nu / params.diffusivity);
  const double root = std::sqrt(nu * params.diffusivity);
  return std::visit(
      [&](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, ConstantRate>) {
          if (!(r.level > 0.0)) throw ValidationError("kyle lambda: zero deposition");
          return root * alpha / (2.0 * r.level);
        } else if constexpr (std::is_same_v<T, ExponentialPairRate>) {
          if (!(alpha > r.mu)) {
            throw NumericError("no stationary state: nu <= D mu^2 for exponential deposition");
          }
          if (!(r.omega_minus > 0.0)) throw ValidationError("kyle lambda: zero deposition");
          const double integral =
              r.omega_minus * (1.0 / (alpha + r.mu) + 1.0 / (alpha - r.mu));
          return root / integral;
        } else if constexpr (std::is_same_v<T, StepPairRate>) {
          if (!(r.omega0_minus > 0.0)) throw ValidationError("kyle lambda: zero deposition");
          return root * alpha / r.omega0_minus;
        } else {
          const double integral = screening_integral(params, Side::sell, 0.0, alpha);
          if (!(integral > 0.0)) throw ValidationError("kyle lambda: zero deposition");
          return root / integral;
        }
      },
      params.omega.spec());
}

double liquidity_L(const ModelParams& params) {
  validate(params);
  const double nu = require_constant_nu(params);
  const double diffusivity = params.diffusivity;
  const double alpha = std::sqrt(nu / diffusivity);
  return std::visit(
      [&](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, ConstantRate>) {
          return r.level / (diffusivity * alpha);
        } else if constexpr (std::is_same_v<T, ExponentialPairRate>) {
          if (!(alpha > r.mu)) {
            throw NumericError("no stationary state: nu <= D mu^2 for exponential deposition");
          }
          return r.omega_minus / (diffusivity * (alpha - r.mu));
        } else if constexpr (std::is_same_v<T, StepPairRate>) {
          return r.omega0_minus / std::sqrt(nu * diffusivity);
        } else {
          const double hi = std::max(r.y.back(), 0.0);
          const auto f = [&](double y) {
            return std::exp(-alpha * y) * params.omega(Side::sell, y);
          };
          double total = num::simpson(f, 0.0, hi, 2000);
          total += r.sell_values.back() * std::exp(-alpha * hi) / alpha;
          return total / diffusivity;
        }
      },
      params.omega.spec());
}

double phi_stationary(double y, const ModelParams& params) {
  if (y < 0.0) throw ValidationError("phi_stationary: y must be >= 0");
  validate(params);
  const double nu = require_constant_nu(params);
  const double diffusivity = params.diffusivity;
  const double alpha = std::sqrt(nu / diffusivity);
  if (y == 0.0) return 0.0;
  return std::visit(
      [&](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, ConstantRate>) {
          return r.level / nu * (1.0 - std::exp(-alpha * y));
        } else if constexpr (std::is_same_v<T, ExponentialPairRate>) {
          if (!(alpha > r.mu)) {
            throw NumericError("no stationary state: nu <= D mu^2 for exponential deposition");
          }
          const double denom = nu - diffusivity * r.mu * r.mu;
          return r.omega_minus * (std::exp(r.mu * y) - std::exp(-alpha * y)) / denom;
        } else if constexpr (std::is_same_v<T, StepPairRate>) {
          return r.omega0_minus / nu * (1.0 - std::exp(-alpha * y));
        } else {
          const double hi = std::max(r.y.back(), y);
          const auto j_tail = [&](double from) {
            const auto f = [&](double v) {
              return std::exp(-alpha * v) * params.omega(Side::sell, v);
            };
            double total = from < hi ? num::simpson(f, from, hi, 400) : 0.0;
            total += r.sell_values.back() * std::exp(-alpha * std::max(from, hi)) / alpha;
            return total;
          };
          const auto inner = [&](double u) { return std::exp(2.0 * alpha * u) * j_tail(u); };
          const double integral = num::simpson(inner, 0.0, y, 400);
          return std::exp(-alpha * y) * integral / diffusivity;
        }
      },
      params.omega.spec());
}

double post_auction_G(double u, double u0) {
  const double gauss = std::exp(-0.25 * u * u) * kInvSqrtPi;
  return 0.5 * std::erfc(0.5 * u) * (0.5 * u * u - u0 * u + 1.0) - gauss * (0.5 * u - u0);
}

double post_auction_F(double u, double u0) {
  return post_auction_G(u, u0) / post_auction_G(0.0, u0);
}

double wrong_side_density(double u, double liquidity, double diffusivity, double tau, double u0) {
  if (!(tau > 0.0) || !(diffusivity > 0.0)) {
    throw ValidationError("wrong side density: tau and diffusivity must be > 0");
  }
  return liquidity * std::sqrt(diffusivity * tau) * psi_shape(u, u0);
}

double impact_scaling_Y(double q, double u0) {
  if (!(q >= 0.0) || !std::isfinite(q)) throw ValidationError("impact: q must be finite, >= 0");
  if (q == 0.0) return 0.0;
  const double g0 = post_auction_G(0.0, u0);
  const auto f = [&](double value) {
    return u0 * value + 0.5 * value * value + g0 - post_auction_G(value, u0) - q;
  };
  const double hi = std::sqrt(2.0 * q) + 2.0 * u0 + 2.0;
  return num::bisect_increasing(f, 0.0, hi, 1e-13 * std::max(1.0, hi));
}

double impact_full(double volume, double liquidity, double diffusivity, double tau, double u0) {
  if (!(liquidity > 0.0) || !(diffusivity > 0.0) || !(tau > 0.0)) {
    throw ValidationError("impact: liquidity, diffusivity and tau must be > 0");
  }
  const double scale = std::sqrt(diffusivity * tau);
  return scale * impact_scaling_Y(volume / (liquidity * diffusivity * tau), u0);
}

SdPair sd_curves_near_price(double y, double liquidity, double diffusivity, double tau,
                            double u0) {
  if (!(liquidity > 0.0) || !(diffusivity > 0.0) || !(tau > 0.0)) {
    throw ValidationError("sd curves: liquidity, diffusivity and tau must be > 0");
  }
  const double scale = std::sqrt(diffusivity * tau);
  const double v_star = liquidity * diffusivity * tau;
  const double own = liquidity * (u0 * scale * std::abs(y) + 0.5 * y * y) + v_star;
  const double wrong = v_star * post_auction_F(std::abs(y) / scale, u0);
  SdPair out;
  if (y >= 0.0) {
    out.supply = own;
    out.demand = wrong;
  } else {
    out.supply = wrong;
    out.demand = own;
  }
  return out;
}

ImpactCurve impact_curve(double q_min, double q_max, std::size_t count, double liquidity,
                         double diffusivity, double tau, double u0) {
  if (!(q_min > 0.0) || !(q_max > q_min) || count < 2) {
    throw ValidationError("impact curve: need 0 < q_min < q_max and >= 2 points");
  }
  const double linear_slope = 1.0 / (u0 + psi_shape(0.0, u0));
  ImpactCurve curve;
  curve.points.reserve(count);
  const double log_lo = std::log(q_min);
  const double log_hi = std::log(q_max);
  for (std::size_t i = 0; i < count; ++i) {
    const double q =
        std::exp(log_lo + (log_hi - log_lo) * static_cast<double>(i) /
                              static_cast<double>(count - 1));
    const double y_value = impact_scaling_Y(q, u0);
    ImpactPoint point;
    point.q = q;
    point.impact = std::sqrt(diffusivity * tau) * y_value;
    if (std::abs(y_value - linear_slope * q) <= 0.05 * y_value) {
      point.regime = "linear";
    } else if (std::abs(y_value - std::sqrt(2.0 * q)) <= 0.05 * y_value) {
      point.regime = "square_root";
    } else {
      point.regime = "crossover";
    }
    curve.points.push_back(std::move(point));
  }
  return curve;
}

LiquidityReport walrasian_liquidity_report(const ModelParams& params) {
  validate(params);
  const double nu = require_constant_nu(params);
  LiquidityReport report;
  report.liquidity = liquidity_L(params);
  report.lambda = kyle_lambda(params);
  if (const auto* exp_pair = params.omega.get_if<ExponentialPairRate>()) {
    report.v_star =
        walras_price_volume(exp_pair->omega_plus, exp_pair->omega_minus, exp_pair->mu, nu,
                            params.diffusivity)
            .v_star;
  } else {
    const MsdCurve curve = stationary_closed_form(reference_grid(params, nu), params);
    report.v_star = clear(curve).v_star;
  }
  return report;
}

LiquidityReport cycle_liquidity_report(const ModelParams& params, double tau, double u0) {
  if (!(tau > 0.0)) throw ValidationError("cycle report: tau must be > 0");
  LiquidityReport report;
  report.liquidity = liquidity_L(params);
  report.lambda = 1.0 / (2.0 * report.liquidity * u0 * std::sqrt(params.diffusivity * tau));
  report.v_star = report.liquidity * params.diffusivity * tau;
  return report;
}

void write_impact_csv(const ImpactCurve& curve, const std::string& path) {
  CsvWriter out(path, {"q", "impact", "regime"});
  for (const auto& point : curve.points) {
    out.row({format_double(point.q), format_double(point.impact), point.regime});
  }
}

}  // namespace msd
