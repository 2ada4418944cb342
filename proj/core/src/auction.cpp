#include "msdlab/auction.hpp"

#include <algorithm>
#include <cmath>

#include "msdlab/csv.hpp"
#include "msdlab/errors.hpp"

namespace msd {

namespace {

struct Crossing {
  double y_star = 0.0;
  double supply_filled = 0.0;
  double demand_filled = 0.0;
};

Crossing find_crossing(const MsdCurve& curve, double q_extra) {
  const auto s_cum = cumulative_supply_nodes(curve);
  const auto d_cum = cumulative_demand_nodes(curve);
  const std::size_t n = curve.grid.nodes();
  const double g_lo = s_cum.front() - d_cum.front() - q_extra;
  const double g_hi = s_cum.back() - d_cum.back() - q_extra;
  if (g_lo >= 0.0 || g_hi < 0.0) {
    if (q_extra == 0.0) throw NumericError("clearing: a book side is empty");
    const double fillable = q_extra > 0.0 ? s_cum.back() : d_cum.front();
    throw SaturationError("clearing: extra volume pushes the crossing off the grid", fillable);
  }
  std::size_t k = 1;
  while (k < n && s_cum[k] - d_cum[k] - q_extra < 0.0) ++k;
  const std::size_t k0 = k - 1;
  const double g0 = s_cum[k0] - d_cum[k0] - q_extra;
  const double g1 = s_cum[k] - d_cum[k] - q_extra;
  const double frac = -g0 / (g1 - g0);
  Crossing out;
  out.y_star = curve.grid.node(k0) + frac * curve.grid.dy();
  out.supply_filled = s_cum[k0] + frac * (s_cum[k] - s_cum[k0]);
  out.demand_filled = d_cum[k0] + frac * (d_cum[k] - d_cum[k0]);
  return out;
}

}  // namespace

AuctionOutcome clear(const MsdCurve& curve) { return clear_with_extra(curve, 0.0); }

AuctionOutcome clear_with_extra(const MsdCurve& curve, double q_extra) {
  if (!std::isfinite(q_extra)) throw ValidationError("clearing: extra volume must be finite");
  const Crossing crossing = find_crossing(curve, q_extra);
  AuctionOutcome outcome;
  outcome.y_star = crossing.y_star;
  outcome.v_star = std::min(crossing.supply_filled, crossing.demand_filled);
  outcome.q_extra = q_extra;
  return outcome;
}

MsdCurve truncate(const MsdCurve& curve, double y_star) {
  const PriceGrid& grid = curve.grid;
  if (!grid.contains(y_star)) throw ValidationError("truncate: y_star outside the grid");
  const auto s_cum = cumulative_supply_nodes(curve);
  const auto d_cum = cumulative_demand_nodes(curve);
  const std::size_t n = grid.cells();
  const double dy = grid.dy();

  std::size_t k = grid.cell_of(y_star);
  if (grid.node(k + 1) <= y_star) ++k;  // y_star exactly on the right node
  const double frac = k < n ? (y_star - grid.node(k)) / dy : 0.0;
  const double s_lin = k < n ? s_cum[k] + frac * (s_cum[k + 1] - s_cum[k]) : s_cum[n];
  const double d_lin = k < n ? d_cum[k] + frac * (d_cum[k + 1] - d_cum[k]) : d_cum[n];

  std::vector<double> rho_s = curve.rho_s;
  std::vector<double> rho_d = curve.rho_d;

  // Supply executes at and below y_star; the surviving fractional mass of the
  // cut cell is folded into the first surviving node.
  for (std::size_t j = 0; j <= std::min(k, n); ++j) rho_s[j] = 0.0;
  if (k < n) {
    rho_s[k + 1] = std::max(0.0, (s_cum[k + 1] + 0.5 * dy * curve.rho_s[k + 1] - s_lin) / dy);
  }

  // Demand executes at and above y_star; mirrored fold.
  if (k == 0 && grid.node(0) >= y_star) {
    std::fill(rho_d.begin(), rho_d.end(), 0.0);
  } else {
    const std::size_t j = grid.node(k) < y_star ? k : k - 1;
    for (std::size_t i = j + 1; i <= n; ++i) rho_d[i] = 0.0;
    rho_d[j] = std::max(0.0, (d_cum[j] + 0.5 * dy * curve.rho_d[j] - d_lin) / dy);
  }

  return MsdCurve(grid, std::move(rho_s), std::move(rho_d));
}

AuctionSeries run_auction_sequence(const MsdCurve& initial, const ModelParams& params,
                                   const EvolutionConfig& config, std::size_t n_auctions,
                                   const SequenceOptions& options) {
  validate(params);
  if (!(params.tau > 0.0)) throw ValidationError("auction sequence: params.tau must be > 0");
  if (n_auctions == 0) throw ValidationError("auction sequence: need at least one auction");

  std::vector<AuctionOutcome> outcomes;
  outcomes.reserve(n_auctions);
  std::optional<std::size_t> converged_at;
  MsdCurve state = initial;
  std::optional<MsdCurve> previous_pre;
  double time = 0.0;

  for (std::size_t i = 0; i < n_auctions; ++i) {
    MsdCurve pre = evolve(state, params, config, params.tau);
    time += params.tau;
    AuctionOutcome outcome = clear(pre);
    outcome.time = time;
    if (options.record_curves) outcome.pre_curve = pre;
    if (!converged_at && previous_pre &&
        relative_linf_distance(pre, *previous_pre) <= options.cycle_tol) {
      converged_at = i;
    }
    MsdCurve post = truncate(pre, outcome.y_star);
    if (options.record_curves) outcome.post_curve = post;
    outcomes.push_back(std::move(outcome));
    const bool stop = options.stop_on_cycle && converged_at.has_value();
    previous_pre = std::move(pre);
    state = std::move(post);
    if (stop) break;
  }
  return AuctionSeries{std::move(outcomes), converged_at, std::move(*previous_pre)};
}

void write_auction_series_csv(const AuctionSeries& series, const std::string& path) {
  CsvWriter out(path, {"auction_index", "time", "y_star", "v_star", "q_extra"});
  for (std::size_t i = 0; i < series.outcomes.size(); ++i) {
    const AuctionOutcome& o = series.outcomes[i];
    out.row({format_double(static_cast<double>(i)), format_double(o.time),
             format_double(o.y_star), format_double(o.v_star), format_double(o.q_extra)});
  }
}

}  // namespace msd
