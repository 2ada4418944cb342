#pragma once

#include <optional>

#include "msdlab/rate_function.hpp"

namespace msd {

/// Model parameters for the mesoscopic book dynamics
///   d rho/dt = D d2rho/dy2 - nu(y) rho + omega_side(y).
struct ModelParams {
  double diffusivity = 1.0;       ///< D > 0
  RateFunction nu;                ///< cancellation rate, >= 0
  RateFunction omega;             ///< deposition intensity, >= 0
  double tau = 0.0;               ///< inter-auction time, >= 0
  double sigma = 0.0;             ///< common news volatility, >= 0 (agent sims)

  /// Whether the free dynamics admit a stationary profile. Exponential
  /// deposition with constant cancellation requires nu > D mu^2; any bounded
  /// deposition with strictly positive cancellation is fine; zero cancellation
  /// with nonzero deposition grows without bound. Empty when undecidable.
  std::optional<bool> stationary_state_exists() const;
};

/// Throws ValidationError unless diffusivity > 0, tau >= 0, sigma >= 0 and the
/// rate functions are finite and non-negative.
void validate(const ModelParams& params);

}  // namespace msd
