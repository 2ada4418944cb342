#pragma once

#include <string>
#include <vector>

#include "msdlab/curve.hpp"
#include "msdlab/params.hpp"

namespace msd {

/// Literature value of the universal offset in the post-auction profile;
/// solve_fixed_point reproduces it to ~1e-4. Analytics entry points take u0
/// as a defaulted argument so a freshly computed value can be threaded
/// through.
inline constexpr double kU0Literature = 0.824;

/// Stationary book profile of the free dynamics, sampled on grid. Constant
/// nu > 0 required. Exponential pairs use the closed form
/// Omega exp(-/+ mu y) / (nu - D mu^2) (requires nu > D mu^2); step pairs use
/// omega0/(2 nu) [1 -/+ sign(y)(1 - e^{-sqrt(nu/D)|y|})]; constant deposition
/// gives the flat level omega/nu; tabulated deposition is resolved through
/// the exponential-screening integral
///   rho(y) = 1/(2 sqrt(nu D)) int omega(y') e^{-sqrt(nu/D)|y'-y|} dy'.
MsdCurve stationary_closed_form(const PriceGrid& grid, const ModelParams& params);

/// Point evaluation of the same profile (used for boundary pinning).
double stationary_density_at(const ModelParams& params, Side side, double y);

/// Stationary book when the price acts as an absorbing boundary: supply
/// phi_stationary(y) for y > 0, demand its mirror image below. The natural
/// initial state for auction-cycle runs.
MsdCurve absorbing_stationary_curve(const PriceGrid& grid, const ModelParams& params);

struct WalrasSolution {
  double y_star = 0.0;
  double v_star = 0.0;
};

/// Walrasian crossing of the stationary exponential book:
///   y* = ln(omega_plus/omega_minus) / (2 mu),
///   v* = sqrt(omega_plus omega_minus) / (mu (nu - D mu^2)).
WalrasSolution walras_price_volume(double omega_plus, double omega_minus, double mu, double nu,
                                   double diffusivity);

/// Price response to a marginal market order, lambda = 1/(rho_S(y*) +
/// rho_D(y*)), evaluated from node densities at the curve's crossing.
/// Returns +infinity when the book is locally empty at the crossing.
double kyle_lambda_from_curve(const MsdCurve& curve);

/// Closed-form lambda for the stationary book. Exponential pairs:
/// (nu - D mu^2) / (2 sqrt(omega_plus omega_minus)); symmetric steps:
/// nu / omega0; constant deposition: nu / (2 level). Asymmetric steps and
/// tabulated deposition are evaluated from a finely sampled stationary curve.
double kyle_lambda(const ModelParams& params);

/// Symmetric-book integral form: lambda = sqrt(nu D) / int omega(|y'|)
/// e^{-sqrt(nu/D)|y'|} dy' with omega the one-sided deposition profile.
double kyle_lambda_symmetric_integral(const ModelParams& params);

/// Liquidity scale of the sloped book near the price,
///   L = (1/D) int_0^inf e^{-sqrt(nu/D) y} omega_sell(y) dy
/// (steps: omega0 / sqrt(nu D)). Constant nu > 0 required.
double liquidity_L(const ModelParams& params);

/// Stationary profile with an absorbing price boundary,
///   phi_st(y) = (1/D) e^{-alpha y} int_0^y dy' e^{2 alpha y'}
///               int_{y'}^inf dy'' e^{-alpha y''} omega(y''),
/// alpha = sqrt(nu/D), evaluated by nested quadrature on the sell side.
/// phi_st(0) = 0 and the slope at 0+ is L.
double phi_stationary(double y, const ModelParams& params);

/// Normalized shape of the demand left behind above the price after an
/// auction: F(0) = 1, strictly decreasing, F -> 0. u is the distance in units
/// of sqrt(D tau).
double post_auction_F(double u, double u0 = kU0Literature);

/// Un-normalized tail integral G(u) = int_u^inf psi, with G(0) = 1/2 +
/// u0/sqrt(pi); post_auction_F = G(u)/G(0).
double post_auction_G(double u, double u0 = kU0Literature);

/// Density stranded on the wrong side of the price at distance u sqrt(D tau):
///   L sqrt(D tau) [ e^{-u^2/4}/sqrt(pi) + (u0 - u)/2 erfc(u/2) ].
double wrong_side_density(double u, double liquidity, double diffusivity, double tau,
                          double u0 = kU0Literature);

/// Dimensionless impact Y(q) solving u0 Y + Y^2/2 + (G(0) - G(Y)) = q.
/// Linear for small q (slope 1/(u0 + psi(0)) ~ 0.555), square-root for large q
/// (Y -> sqrt(2q)).
double impact_scaling_Y(double q, double u0 = kU0Literature);

/// Peak impact of a meta-order of volume Q executed in one auction against
/// the steady-cycle book: sqrt(D tau) Y(Q / (L D tau)).
double impact_full(double volume, double liquidity, double diffusivity, double tau,
                   double u0 = kU0Literature);

struct SdPair {
  double supply = 0.0;
  double demand = 0.0;
};

/// Cumulative supply/demand near the price in the steady cycle: on its own
/// side each curve is the quadratic L (u0 sqrt(D tau) |y| + y^2/2) + v*, on
/// the wrong side v* F(|y|/sqrt(D tau)), with v* = L D tau.
SdPair sd_curves_near_price(double y, double liquidity, double diffusivity, double tau,
                            double u0 = kU0Literature);

struct ImpactPoint {
  double q = 0.0;       ///< volume in units of L D tau
  double impact = 0.0;  ///< price displacement
  std::string regime;   ///< "linear", "crossover" or "square_root"
};

struct ImpactCurve {
  std::vector<ImpactPoint> points;
};

/// Samples impact_full on a log-spaced q range; regime labels mark where the
/// value is within 5% of the linear (0.555 q) or square-root (sqrt(2q))
/// asymptote.
ImpactCurve impact_curve(double q_min, double q_max, std::size_t count, double liquidity,
                         double diffusivity, double tau, double u0 = kU0Literature);

struct LiquidityReport {
  double liquidity = 0.0;
  double lambda = 0.0;
  double v_star = 0.0;
};

/// Stationary Walrasian view: lambda from the closed forms, v* the overlap
/// volume of the stationary book.
LiquidityReport walrasian_liquidity_report(const ModelParams& params);

/// Steady-cycle view at inter-auction time tau: lambda = 1/(2 L u0
/// sqrt(D tau)) (affine near-price book), v* = L D tau.
LiquidityReport cycle_liquidity_report(const ModelParams& params, double tau,
                                       double u0 = kU0Literature);

void write_impact_csv(const ImpactCurve& curve, const std::string& path);

}  // namespace msd
