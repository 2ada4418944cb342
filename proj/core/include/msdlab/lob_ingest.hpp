#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "msdlab/curve.hpp"
#include "msdlab/rate_function.hpp"

namespace msd {

struct BookLevel {
  Side side = Side::buy;
  double price = 0.0;
  double quantity = 0.0;
};

/// One snapshot of visible book levels. Levels are stored sorted by price per
/// side, prices strictly increasing within a side; the mid is the average of
/// the best bid and best ask, which must not cross.
struct Snapshot {
  std::int64_t timestamp = 0;
  std::vector<BookLevel> levels;
  double mid = 0.0;
};

/// Parses `timestamp,side,price,quantity` rows (side B for bids, S for asks;
/// an optional header row is skipped). Rows are grouped by timestamp and the
/// snapshots returned sorted by it. Malformed rows and crossed or one-sided
/// books raise errors naming the offending line or timestamp.
std::vector<Snapshot> load_snapshots(const std::string& path);

struct AverageMsd {
  MsdCurve curve;                    ///< bid quantities -> demand, asks -> supply
  std::vector<std::size_t> counts_s; ///< level observations per supply bin
  std::vector<std::size_t> counts_d;
  std::size_t n_snapshots = 0;
};

/// Re-expresses levels as y = price - mid, bins them on node-centered bins of
/// width bin_width over [-max_offset, max_offset], converts to quantity per
/// unit price and averages uniformly across snapshots.
AverageMsd average_msd(const std::vector<Snapshot>& snapshots, double bin_width,
                       double max_offset);

struct VShapeFit {
  double slope_bid = 0.0;       ///< liquidity estimate from the bid side
  double slope_ask = 0.0;
  double intercept_bid = 0.0;
  double intercept_ask = 0.0;
  double stderr_bid = 0.0;      ///< OLS standard error of the slope
  double stderr_ask = 0.0;
  double r2_bid = 0.0;
  double r2_ask = 0.0;
  std::size_t n_bins_bid = 0;
  std::size_t n_bins_ask = 0;
};

/// Ordinary least squares of density against |y| per side over |y| in
/// [window_lo, window_hi]. Requires at least 5 populated bins per side and
/// window_lo of at least one bin width.
VShapeFit fit_v_shape(const AverageMsd& averaged, double window_lo, double window_hi);

struct SyntheticBookSpec {
  double liquidity = 1.0;       ///< target V slope
  double y0 = 0.0;              ///< offset: density L (|y| + y0)
  double saturation = 1e30;     ///< density cap far from mid
  double noise = 0.0;           ///< multiplicative level noise amplitude
  double mid = 100.0;
  double tick = 0.25;           ///< price lattice step
  double depth = 8.0;           ///< levels span [mid - depth, mid + depth]
  std::size_t n_snapshots = 50;
  std::uint64_t seed = 0;
};

/// Deterministic synthetic book generator: expected level density
/// min(L(|y| + y0), saturation) with multiplicative noise. Bids below mid,
/// asks above.
std::vector<Snapshot> generate_synthetic(const SyntheticBookSpec& spec);

/// Writes snapshots in the load_snapshots CSV schema.
void write_snapshots_csv(const std::vector<Snapshot>& snapshots, const std::string& path);

}  // namespace msd
