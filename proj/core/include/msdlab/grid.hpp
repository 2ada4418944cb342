#pragma once

#include <cstddef>
#include <vector>

namespace msd {

/// Uniform grid in shifted price y = p - p_ref covering [y_min, y_max] with n
/// cells (n + 1 nodes). The grid must straddle the reference price: y_min < 0
/// and y_max > 0.
class PriceGrid {
 public:
  PriceGrid(double y_min, double y_max, std::size_t n_cells);

  double y_min() const { return y_min_; }
  double y_max() const { return y_max_; }
  double dy() const { return dy_; }
  std::size_t cells() const { return n_; }
  std::size_t nodes() const { return n_ + 1; }

  double node(std::size_t k) const { return y_min_ + dy_ * static_cast<double>(k); }
  std::vector<double> node_values() const;

  /// Index of the cell containing y, clamped to [0, cells()-1]; y must lie in
  /// [y_min, y_max].
  std::size_t cell_of(double y) const;

  bool contains(double y) const { return y >= y_min_ && y <= y_max_; }

  bool operator==(const PriceGrid& other) const {
    return y_min_ == other.y_min_ && y_max_ == other.y_max_ && n_ == other.n_;
  }

 private:
  double y_min_;
  double y_max_;
  std::size_t n_;
  double dy_;
};

}  // namespace msd
