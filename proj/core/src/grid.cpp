#include "msdlab/grid.hpp"

#include <cmath>

#include "msdlab/errors.hpp"

namespace msd {

PriceGrid::PriceGrid(double y_min, double y_max, std::size_t n_cells)
    : y_min_(y_min), y_max_(y_max), n_(n_cells) {
  if (!std::isfinite(y_min) || !std::isfinite(y_max)) {
    throw ValidationError("grid: bounds must be finite");
  }
  if (!(y_min < 0.0) || !(y_max > 0.0)) {
    throw ValidationError("grid: must straddle the price (y_min < 0 < y_max)");
  }
  if (n_cells < 2) throw ValidationError("grid: need at least 2 cells");
  dy_ = (y_max - y_min) / static_cast<double>(n_cells);
}

std::vector<double> PriceGrid::node_values() const {
  std::vector<double> values(nodes());
  for (std::size_t k = 0; k < values.size(); ++k) values[k] = node(k);
  return values;
}

std::size_t PriceGrid::cell_of(double y) const {
  if (!contains(y)) throw ValidationError("grid: point outside [y_min, y_max]");
  const double offset = (y - y_min_) / dy_;
  auto cell = static_cast<std::size_t>(offset);
  if (cell >= n_) cell = n_ - 1;
  return cell;
}

}  // namespace msd
