#pragma once

#include <optional>
#include <variant>
#include <vector>

namespace msd {

/// Which side of the book a rate applies to. Buy intentions accumulate below
/// the price (demand), sell intentions above it (supply).
enum class Side { buy, sell };

/// Same level on both sides, independent of y.
struct ConstantRate {
  double level = 0.0;
};

/// Exponential deposition pair: buy side omega_plus * exp(-mu y), sell side
/// omega_minus * exp(+mu y). Buy flow concentrates below the price, sell flow
/// above it.
struct ExponentialPairRate {
  double omega_plus = 0.0;
  double omega_minus = 0.0;
  double mu = 0.0;
};

/// Step deposition pair: buy side active for y < 0 at omega0_plus, sell side
/// active for y > 0 at omega0_minus. At y = 0 each side contributes half its
/// level (mid-cell convention for the discontinuity).
struct StepPairRate {
  double omega0_plus = 0.0;
  double omega0_minus = 0.0;
};

/// Piecewise-linear rate sampled at strictly increasing knots, one value array
/// per side. Evaluation clamps to the end values outside the knot range.
struct TabulatedRate {
  std::vector<double> y;
  std::vector<double> buy_values;
  std::vector<double> sell_values;
};

/// A non-negative rate of y, evaluated per side. Used for both the deposition
/// intensity omega and the cancellation rate nu.
class RateFunction {
 public:
  using Spec = std::variant<ConstantRate, ExponentialPairRate, StepPairRate, TabulatedRate>;

  RateFunction() : spec_(ConstantRate{0.0}) {}
  explicit RateFunction(Spec spec);

  static RateFunction constant(double level) { return RateFunction(ConstantRate{level}); }
  static RateFunction exponential_pair(double omega_plus, double omega_minus, double mu) {
    return RateFunction(ExponentialPairRate{omega_plus, omega_minus, mu});
  }
  static RateFunction step_pair(double omega0_plus, double omega0_minus) {
    return RateFunction(StepPairRate{omega0_plus, omega0_minus});
  }
  static RateFunction tabulated(std::vector<double> y, std::vector<double> buy,
                                std::vector<double> sell) {
    return RateFunction(TabulatedRate{std::move(y), std::move(buy), std::move(sell)});
  }

  double operator()(Side side, double y) const;

  const Spec& spec() const { return spec_; }

  template <typename T>
  const T* get_if() const {
    return std::get_if<T>(&spec_);
  }

  bool is_constant() const { return std::holds_alternative<ConstantRate>(spec_); }

  /// Level of a ConstantRate, empty otherwise.
  std::optional<double> constant_level() const;

  /// Smallest value the rate can take over the whole line (exact per variant).
  double min_value() const;

 private:
  Spec spec_;
};

/// Pointwise evaluation; the primary entry point named in the interface.
double evaluate_rate(const RateFunction& rate, Side side, double y);

}  // namespace msd
