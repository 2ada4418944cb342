#pragma once

#include "msdlab/curve.hpp"
#include "msdlab/params.hpp"

namespace msd {

enum class Scheme { explicit_euler, crank_nicolson };

/// dirichlet_stationary pins the end nodes to the analytic stationary values
/// (needs constant nu > 0); dirichlet_hold pins them to the values they carry
/// in the initial curve; zero_flux reflects at the ends and conserves mass
/// exactly when nu = omega = 0.
enum class Boundary { dirichlet_stationary, dirichlet_hold, zero_flux };

struct EvolutionConfig {
  double dt = 1e-3;
  Scheme scheme = Scheme::crank_nicolson;
  Boundary boundary = Boundary::dirichlet_stationary;
};

struct EvolveStats {
  double clamped_mass = 0.0;   ///< total negative mass clipped to zero
  double reference_mass = 0.0; ///< max book mass seen while stepping
  std::size_t steps = 0;
};

/// Advances both sides of the book by t under
///   d rho/dt = D d2/dy2 rho - nu_side(y) rho + omega_side(y).
/// The step count is ceil(t / config.dt) with the step shrunk to land exactly
/// on t. The explicit scheme requires D dt / dy^2 <= 0.25 (checked before
/// stepping). Negative values produced by the update are clamped to zero; if
/// the clamped mass exceeds 0.1% of the book mass the run aborts with a
/// NumericError.
MsdCurve evolve(const MsdCurve& initial, const ModelParams& params, const EvolutionConfig& config,
                double t, EvolveStats* stats = nullptr);

/// Closed-form propagator solution for constant nu:
///   rho(y,t) = (K_t * rho_0)(y) e^{-nu t}
///            + int_0^t (K_s * omega)(y) e^{-nu s} ds,
/// with K_t the heat kernel of variance 2 D t. The initial condition is the
/// piecewise-linear interpolant of the curve (zero outside the grid); the
/// source integral is evaluated in closed form for constant and exponential
/// deposition and by quadrature in sqrt(s) otherwise. Requires constant nu.
MsdCurve evolve_green(const MsdCurve& initial, const ModelParams& params, double t);

/// Stationary profile of the free dynamics. With constant nu > 0 the
/// steady-state tridiagonal system is solved directly; otherwise the curve is
/// marched with Crank-Nicolson until the relative change per unit time falls
/// below tol. Exponential deposition with constant nu requires nu > D mu^2
/// (throws NumericError naming the condition otherwise).
MsdCurve stationary_numeric(const PriceGrid& grid, const ModelParams& params,
                            const EvolutionConfig& config, double tol = 1e-10,
                            double max_time = 1e6);

}  // namespace msd
