#include "msdlab/curve.hpp"

#include <algorithm>
#include <cmath>

#include "msdlab/csv.hpp"
#include "msdlab/errors.hpp"
#include "msdlab/numerics.hpp"

namespace msd {

namespace {

void require_density(const std::vector<double>& rho, std::size_t nodes, const char* side) {
  if (rho.size() != nodes) {
    throw ValidationError(std::string("curve: ") + side + " size does not match the grid");
  }
  for (const double v : rho) {
    if (!std::isfinite(v) || v < 0.0) {
      throw ValidationError(std::string("curve: ") + side + " must be finite and >= 0");
    }
  }
}

double density_at(const PriceGrid& grid, const std::vector<double>& rho, double y) {
  const std::size_t k = grid.cell_of(y);
  const double t = (y - grid.node(k)) / grid.dy();
  return rho[k] + t * (rho[k + 1] - rho[k]);
}

}  // namespace

MsdCurve::MsdCurve(PriceGrid grid_, std::vector<double> rho_s_, std::vector<double> rho_d_)
    : grid(grid_), rho_s(std::move(rho_s_)), rho_d(std::move(rho_d_)) {
  require_density(rho_s, grid.nodes(), "rho_s");
  require_density(rho_d, grid.nodes(), "rho_d");
}

MsdCurve MsdCurve::zero(const PriceGrid& grid) {
  return MsdCurve(grid, std::vector<double>(grid.nodes(), 0.0),
                  std::vector<double>(grid.nodes(), 0.0));
}

double MsdCurve::total_supply() const { return num::trapezoid(rho_s, grid.dy()); }

double MsdCurve::total_demand() const { return num::trapezoid(rho_d, grid.dy()); }

double MsdCurve::supply_density_at(double y) const { return density_at(grid, rho_s, y); }

double MsdCurve::demand_density_at(double y) const { return density_at(grid, rho_d, y); }

std::vector<double> cumulative_supply_nodes(const MsdCurve& curve) {
  const double dy = curve.grid.dy();
  std::vector<double> cum(curve.grid.nodes(), 0.0);
  for (std::size_t k = 1; k < cum.size(); ++k) {
    cum[k] = cum[k - 1] + 0.5 * dy * (curve.rho_s[k - 1] + curve.rho_s[k]);
  }
  return cum;
}

std::vector<double> cumulative_demand_nodes(const MsdCurve& curve) {
  const double dy = curve.grid.dy();
  std::vector<double> cum(curve.grid.nodes(), 0.0);
  for (std::size_t k = cum.size() - 1; k-- > 0;) {
    cum[k] = cum[k + 1] + 0.5 * dy * (curve.rho_d[k] + curve.rho_d[k + 1]);
  }
  return cum;
}

double cumulative_supply(const MsdCurve& curve, double y) {
  const auto nodes = cumulative_supply_nodes(curve);
  const std::size_t k = curve.grid.cell_of(y);
  const double t = y - curve.grid.node(k);
  const double here = curve.supply_density_at(y);
  return nodes[k] + 0.5 * (curve.rho_s[k] + here) * t;
}

double cumulative_demand(const MsdCurve& curve, double y) {
  const auto nodes = cumulative_demand_nodes(curve);
  const std::size_t k = curve.grid.cell_of(y);
  const double t = curve.grid.node(k + 1) - y;
  const double here = curve.demand_density_at(y);
  return nodes[k + 1] + 0.5 * (curve.rho_d[k + 1] + here) * t;
}

void write_curve_csv(const MsdCurve& curve, const std::string& path) {
  CsvWriter out(path, {"y", "rho_s", "rho_d", "S_cum", "D_cum"});
  const auto s_cum = cumulative_supply_nodes(curve);
  const auto d_cum = cumulative_demand_nodes(curve);
  for (std::size_t k = 0; k < curve.grid.nodes(); ++k) {
    out.row_values({curve.grid.node(k), curve.rho_s[k], curve.rho_d[k], s_cum[k], d_cum[k]});
  }
}

double relative_linf_distance(const MsdCurve& a, const MsdCurve& b) {
  if (!(a.grid == b.grid)) throw ValidationError("curve distance: grids differ");
  double diff = 0.0;
  double scale = 0.0;
  for (std::size_t k = 0; k < a.grid.nodes(); ++k) {
    diff = std::max(diff, std::abs(a.rho_s[k] - b.rho_s[k]));
    diff = std::max(diff, std::abs(a.rho_d[k] - b.rho_d[k]));
    scale = std::max({scale, std::abs(a.rho_s[k]), std::abs(a.rho_d[k]), std::abs(b.rho_s[k]),
                      std::abs(b.rho_d[k])});
  }
  if (scale == 0.0) return 0.0;
  return diff / scale;
}

}  // namespace msd
