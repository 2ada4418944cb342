#include "msdlab/rate_function.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "msdlab/errors.hpp"
#include "msdlab/numerics.hpp"

namespace msd {

namespace {

void require_level(double v, const char* what) {
  if (!std::isfinite(v) || v < 0.0) {
    throw ValidationError(std::string("rate: ") + what + " must be finite and >= 0");
  }
}

struct Validator {
  void operator()(const ConstantRate& r) const { require_level(r.level, "level"); }
  void operator()(const ExponentialPairRate& r) const {
    require_level(r.omega_plus, "omega_plus");
    require_level(r.omega_minus, "omega_minus");
    if (!std::isfinite(r.mu) || r.mu < 0.0) {
      throw ValidationError("rate: mu must be finite and >= 0");
    }
  }
  void operator()(const StepPairRate& r) const {
    require_level(r.omega0_plus, "omega0_plus");
    require_level(r.omega0_minus, "omega0_minus");
  }
  void operator()(const TabulatedRate& r) const {
    if (r.y.size() < 2 || r.buy_values.size() != r.y.size() ||
        r.sell_values.size() != r.y.size()) {
      throw ValidationError("rate: tabulated needs >= 2 knots with matching value arrays");
    }
    for (std::size_t i = 0; i < r.y.size(); ++i) {
      if (!std::isfinite(r.y[i])) throw ValidationError("rate: tabulated knot not finite");
      if (i > 0 && !(r.y[i] > r.y[i - 1])) {
        throw ValidationError("rate: tabulated knots must be strictly increasing");
      }
      require_level(r.buy_values[i], "buy value");
      require_level(r.sell_values[i], "sell value");
    }
  }
};

}  // namespace

RateFunction::RateFunction(Spec spec) : spec_(std::move(spec)) {
  std::visit(Validator{}, spec_);
}

double RateFunction::operator()(Side side, double y) const {
  return std::visit(
      [&](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, ConstantRate>) {
          return r.level;
        } else if constexpr (std::is_same_v<T, ExponentialPairRate>) {
          return side == Side::buy ? r.omega_plus * std::exp(-r.mu * y)
                                   : r.omega_minus * std::exp(r.mu * y);
        } else if constexpr (std::is_same_v<T, StepPairRate>) {
          if (side == Side::buy) {
            if (y < 0.0) return r.omega0_plus;
            return y == 0.0 ? 0.5 * r.omega0_plus : 0.0;
          }
          if (y > 0.0) return r.omega0_minus;
          return y == 0.0 ? 0.5 * r.omega0_minus : 0.0;
        } else {
          const auto& values = side == Side::buy ? r.buy_values : r.sell_values;
          return num::interp_linear(r.y, values, y);
        }
      },
      spec_);
}

std::optional<double> RateFunction::constant_level() const {
  if (const auto* c = std::get_if<ConstantRate>(&spec_)) return c->level;
  return std::nullopt;
}

double RateFunction::min_value() const {
  return std::visit(
      [](const auto& r) -> double {
        using T = std::decay_t<decltype(r)>;
        if constexpr (std::is_same_v<T, ConstantRate>) {
          return r.level;
        } else if constexpr (std::is_same_v<T, ExponentialPairRate>) {
          if (r.mu == 0.0) return std::min(r.omega_plus, r.omega_minus);
          return 0.0;
        } else if constexpr (std::is_same_v<T, StepPairRate>) {
          return 0.0;
        } else {
          double lo = r.buy_values.front();
          for (const double v : r.buy_values) lo = std::min(lo, v);
          for (const double v : r.sell_values) lo = std::min(lo, v);
          return lo;
        }
      },
      spec_);
}

double evaluate_rate(const RateFunction& rate, Side side, double y) { return rate(side, y); }

}  // namespace msd
