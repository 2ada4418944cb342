#include "msdlab/lob_ingest.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "msdlab/csv.hpp"
#include "msdlab/errors.hpp"
#include "msdlab/numerics.hpp"
#include "msdlab/rng.hpp"

namespace msd {

namespace {

bool parse_number(const std::string& field, double& out) {
  const char* begin = field.c_str();
  char* end = nullptr;
  out = std::strtod(begin, &end);
  return end != begin && *end == '\0' && std::isfinite(out);
}

bool parse_timestamp(const std::string& field, std::int64_t& out) {
  if (field.empty()) return false;
  const char* begin = field.c_str();
  char* end = nullptr;
  const long long value = std::strtoll(begin, &end, 10);
  if (end == begin || *end != '\0') return false;
  out = value;
  return true;
}

}  // namespace

std::vector<Snapshot> load_snapshots(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);

  std::map<std::int64_t, std::vector<BookLevel>> grouped;
  std::string line;
  std::size_t line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    std::int64_t timestamp = 0;
    if (line_number == 1 && !parse_timestamp(fields[0], timestamp)) continue;  // header
    if (fields.size() != 4) {
      throw ParseError("expected 4 fields", line_number);
    }
    if (!parse_timestamp(fields[0], timestamp)) {
      throw ParseError("bad timestamp '" + fields[0] + "'", line_number);
    }
    BookLevel level;
    if (fields[1] == "B") {
      level.side = Side::buy;
    } else if (fields[1] == "S") {
      level.side = Side::sell;
    } else {
      throw ParseError("side must be B or S, got '" + fields[1] + "'", line_number);
    }
    if (!parse_number(fields[2], level.price)) {
      throw ParseError("bad price '" + fields[2] + "'", line_number);
    }
    if (!parse_number(fields[3], level.quantity) || level.quantity < 0.0) {
      throw ParseError("bad quantity '" + fields[3] + "'", line_number);
    }
    grouped[timestamp].push_back(level);
  }

  std::vector<Snapshot> snapshots;
  snapshots.reserve(grouped.size());
  for (auto& [timestamp, levels] : grouped) {
    Snapshot snap;
    snap.timestamp = timestamp;
    std::stable_sort(levels.begin(), levels.end(), [](const BookLevel& a, const BookLevel& b) {
      if (a.side != b.side) return a.side == Side::buy;
      return a.price < b.price;
    });
    double best_bid = 0.0;
    double best_ask = 0.0;
    bool has_bid = false;
    bool has_ask = false;
    double prev_price = 0.0;
    Side prev_side = Side::buy;
    bool first = true;
    for (const BookLevel& level : levels) {
      if (!first && level.side == prev_side && !(level.price > prev_price)) {
        throw ParseError("duplicate price level at timestamp " + std::to_string(timestamp),
                         line_number);
      }
      prev_price = level.price;
      prev_side = level.side;
      first = false;
      if (level.side == Side::buy) {
        best_bid = level.price;  // bids sorted ascending: last is best
        has_bid = true;
      } else if (!has_ask) {
        best_ask = level.price;  // asks sorted ascending: first is best
        has_ask = true;
      }
    }
    if (!has_bid || !has_ask) {
      throw ParseError("one-sided book at timestamp " + std::to_string(timestamp), line_number);
    }
    if (!(best_bid < best_ask)) {
      throw ParseError("crossed book at timestamp " + std::to_string(timestamp), line_number);
    }
    snap.mid = 0.5 * (best_bid + best_ask);
    snap.levels = std::move(levels);
    snapshots.push_back(std::move(snap));
  }
  if (snapshots.empty()) throw ParseError("no snapshots in " + path, line_number);
  return snapshots;
}

AverageMsd average_msd(const std::vector<Snapshot>& snapshots, double bin_width,
                       double max_offset) {
  if (snapshots.empty()) throw ValidationError("average msd: no snapshots");
  if (!(bin_width > 0.0) || !(max_offset > bin_width)) {
    throw ValidationError("average msd: need bin_width > 0 and max_offset > bin_width");
  }
  const auto n_cells = static_cast<std::size_t>(std::llround(2.0 * max_offset / bin_width));
  if (std::abs(n_cells * bin_width - 2.0 * max_offset) > 1e-9 * max_offset) {
    throw ValidationError("average msd: max_offset must be a multiple of bin_width");
  }
  PriceGrid grid(-max_offset, max_offset, n_cells);
  std::vector<double> rho_s(grid.nodes(), 0.0);
  std::vector<double> rho_d(grid.nodes(), 0.0);
  AverageMsd out{MsdCurve::zero(grid), std::vector<std::size_t>(grid.nodes(), 0),
                 std::vector<std::size_t>(grid.nodes(), 0), snapshots.size()};
  for (const Snapshot& snap : snapshots) {
    for (const BookLevel& level : snap.levels) {
      const double y = level.price - snap.mid;
      const double offset = std::floor((y + max_offset) / bin_width + 0.5);
      if (offset < 0.0 || offset > static_cast<double>(n_cells)) continue;
      const auto k = static_cast<std::size_t>(offset);
      if (level.side == Side::buy) {
        rho_d[k] += level.quantity / bin_width;
        ++out.counts_d[k];
      } else {
        rho_s[k] += level.quantity / bin_width;
        ++out.counts_s[k];
      }
    }
  }
  const double norm = static_cast<double>(snapshots.size());
  for (double& v : rho_s) v /= norm;
  for (double& v : rho_d) v /= norm;
  out.curve = MsdCurve(grid, std::move(rho_s), std::move(rho_d));
  return out;
}

VShapeFit fit_v_shape(const AverageMsd& averaged, double window_lo, double window_hi) {
  const PriceGrid& grid = averaged.curve.grid;
  if (!(window_lo >= grid.dy())) {
    throw ValidationError("v-shape fit: window_lo must be at least one bin width");
  }
  if (!(window_hi > window_lo)) {
    throw ValidationError("v-shape fit: window must be non-empty");
  }

  const auto fit_side = [&](bool ask, double& slope, double& intercept, double& stderr_out,
                            double& r2, std::size_t& n_bins) {
    std::vector<double> xs;
    std::vector<double> ys;
    for (std::size_t k = 0; k < grid.nodes(); ++k) {
      const double y = grid.node(k);
      const double a = std::abs(y);
      if (a < window_lo || a > window_hi) continue;
      if (ask && y <= 0.0) continue;
      if (!ask && y >= 0.0) continue;
      const std::size_t count = ask ? averaged.counts_s[k] : averaged.counts_d[k];
      if (count == 0) continue;
      xs.push_back(a);
      ys.push_back(ask ? averaged.curve.rho_s[k] : averaged.curve.rho_d[k]);
    }
    if (xs.size() < 5) {
      throw ValidationError("v-shape fit: fewer than 5 populated bins in the window");
    }
    const num::AffineFit fit = num::fit_affine(xs, ys, 0, xs.size() - 1);
    slope = fit.slope;
    intercept = fit.intercept;
    n_bins = xs.size();
    const double n = static_cast<double>(xs.size());
    double x_mean = 0.0;
    double y_mean = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      x_mean += xs[i];
      y_mean += ys[i];
    }
    x_mean /= n;
    y_mean /= n;
    double sxx = 0.0;
    double ssr = 0.0;
    double sst = 0.0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
      const double resid = ys[i] - (fit.intercept + fit.slope * xs[i]);
      ssr += resid * resid;
      sxx += (xs[i] - x_mean) * (xs[i] - x_mean);
      sst += (ys[i] - y_mean) * (ys[i] - y_mean);
    }
    stderr_out = std::sqrt(ssr / (n - 2.0) / sxx);
    r2 = sst > 0.0 ? 1.0 - ssr / sst : 1.0;
  };

  VShapeFit fit;
  fit_side(false, fit.slope_bid, fit.intercept_bid, fit.stderr_bid, fit.r2_bid, fit.n_bins_bid);
  fit_side(true, fit.slope_ask, fit.intercept_ask, fit.stderr_ask, fit.r2_ask, fit.n_bins_ask);
  return fit;
}

std::vector<Snapshot> generate_synthetic(const SyntheticBookSpec& spec) {
  if (!(spec.liquidity > 0.0) || !(spec.tick > 0.0) || !(spec.depth >= spec.tick)) {
    throw ValidationError("synthetic book: need liquidity > 0, tick > 0, depth >= tick");
  }
  if (spec.noise < 0.0 || spec.noise >= 1.0) {
    throw ValidationError("synthetic book: noise must be in [0, 1)");
  }
  if (spec.n_snapshots == 0) throw ValidationError("synthetic book: need snapshots");
  Rng rng(spec.seed, "synthetic");
  const auto n_levels = static_cast<std::size_t>(std::floor(spec.depth / spec.tick));
  std::vector<Snapshot> snapshots;
  snapshots.reserve(spec.n_snapshots);
  for (std::size_t s = 0; s < spec.n_snapshots; ++s) {
    Snapshot snap;
    snap.timestamp = static_cast<std::int64_t>(s);
    snap.mid = spec.mid;
    for (std::size_t j = 1; j <= n_levels; ++j) {
      const double dist = spec.tick * static_cast<double>(j);
      const double density = std::min(spec.liquidity * (dist + spec.y0), spec.saturation);
      for (const Side side : {Side::buy, Side::sell}) {
        BookLevel level;
        level.side = side;
        level.price = side == Side::buy ? spec.mid - dist : spec.mid + dist;
        const double jitter = 1.0 + spec.noise * rng.uniform(-1.0, 1.0);
        level.quantity = std::max(0.0, density * spec.tick * jitter);
        snap.levels.push_back(level);
      }
    }
    std::stable_sort(snap.levels.begin(), snap.levels.end(),
                     [](const BookLevel& a, const BookLevel& b) {
                       if (a.side != b.side) return a.side == Side::buy;
                       return a.price < b.price;
                     });
    snapshots.push_back(std::move(snap));
  }
  return snapshots;
}

void write_snapshots_csv(const std::vector<Snapshot>& snapshots, const std::string& path) {
  CsvWriter out(path, {"timestamp", "side", "price", "quantity"});
  for (const Snapshot& snap : snapshots) {
    for (const BookLevel& level : snap.levels) {
      out.row({std::to_string(snap.timestamp), level.side == Side::buy ? "B" : "S",
               format_double(level.price), format_double(level.quantity)});
    }
  }
}

}  // namespace msd
