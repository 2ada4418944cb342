#include "msdlab/params.hpp"

#include <cmath>

#include "msdlab/errors.hpp"

namespace msd {

namespace {

bool vanishes_everywhere(const RateFunction& rate) {
  return std::visit(
      [](const auto& r) -> bool {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, ConstantRate>) {
          return r.level == 0.0;
        } else if constexpr (std::is_same_v<T, ExponentialPairRate>) {
          return r.omega_plus == 0.0 && r.omega_minus == 0.0;
        } else if constexpr (std::is_same_v<T, StepPairRate>) {
          return r.omega0_plus == 0.0 && r.omega0_minus == 0.0;
        } else {
          for (const double v : r.buy_values)
            if (v != 0.0) return false;
          for (const double v : r.sell_values)
            if (v != 0.0) return false;
          return true;
        }
      },
      rate.spec());
}

}  // namespace

std::optional<bool> ModelParams::stationary_state_exists() const {
  if (const auto* exp_pair = omega.get_if<ExponentialPairRate>();
      exp_pair != nullptr && exp_pair->mu > 0.0 &&
      (exp_pair->omega_plus > 0.0 || exp_pair->omega_minus > 0.0)) {
    const auto nu_level = nu.constant_level();
    if (!nu_level) return std::nullopt;
    return *nu_level > diffusivity * exp_pair->mu * exp_pair->mu;
  }
  if (vanishes_everywhere(omega)) return true;
  if (nu.min_value() > 0.0) return true;
  if (nu.constant_level() == 0.0) return false;
  return std::nullopt;
}

void validate(const ModelParams& params) {
  if (!std::isfinite(params.diffusivity) || !(params.diffusivity > 0.0)) {
    throw ValidationError("params: diffusivity must be finite and > 0");
  }
  if (!std::isfinite(params.tau) || params.tau < 0.0) {
    throw ValidationError("params: tau must be finite and >= 0");
  }
  if (!std::isfinite(params.sigma) || params.sigma < 0.0) {
    throw ValidationError("params: sigma must be finite and >= 0");
  }
}

}  // namespace msd
