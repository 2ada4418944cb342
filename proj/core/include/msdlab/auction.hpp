#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "msdlab/curve.hpp"
#include "msdlab/evolution.hpp"
#include "msdlab/params.hpp"

namespace msd {

/// Result of one batch auction.
struct AuctionOutcome {
  double y_star = 0.0;   ///< clearing price offset
  double v_star = 0.0;   ///< volume exchanged (book side; excludes q_extra)
  double q_extra = 0.0;  ///< injected market order volume (buy > 0, sell < 0)
  double time = 0.0;     ///< simulation time of the auction
  std::optional<MsdCurve> pre_curve;
  std::optional<MsdCurve> post_curve;
};

/// Walrasian clearing: the unique root of S(y) - D(y) inside the grid, found
/// on the node cumulatives and interpolated linearly inside the bracketing
/// cell; |S(y*) - D(y*)| <= 1e-10 x total mass by construction. Both sides
/// must carry mass (empty-market error otherwise).
AuctionOutcome clear(const MsdCurve& curve);

/// Clearing with an extra market order: root of S(y) - D(y) - q. Throws
/// SaturationError carrying the largest fillable volume when the crossing
/// leaves the grid.
AuctionOutcome clear_with_extra(const MsdCurve& curve, double q_extra);

/// Removes the transacted volume: supply vanishes at nodes with y <= y_star,
/// demand at nodes with y >= y_star, and the cut cell's surviving fractional
/// mass is folded into the first surviving node so that removed supply =
/// removed demand = v* exactly under the trapezoid convention.
MsdCurve truncate(const MsdCurve& curve, double y_star);

struct SequenceOptions {
  bool record_curves = false;     ///< keep pre/post curves in each outcome
  bool stop_on_cycle = false;     ///< stop once the cycle is detected
  double cycle_tol = 1e-6;        ///< relative L-inf change between successive
                                  ///< pre-auction curves that counts as cycled
};

struct AuctionSeries {
  std::vector<AuctionOutcome> outcomes;
  std::optional<std::size_t> converged_at;  ///< first auction whose pre-curve
                                            ///< matched its predecessor
  MsdCurve final_pre_curve;                 ///< book just before the last clearing
};

/// Alternates evolve(tau) / clear / truncate for n_auctions rounds starting
/// from initial.
AuctionSeries run_auction_sequence(const MsdCurve& initial, const ModelParams& params,
                                   const EvolutionConfig& config, std::size_t n_auctions,
                                   const SequenceOptions& options = {});

/// Writes `auction_index,time,y_star,v_star,q_extra` rows.
void write_auction_series_csv(const AuctionSeries& series, const std::string& path);

}  // namespace msd
