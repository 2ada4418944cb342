#pragma once

#include <string>
#include <vector>

#include "msdlab/grid.hpp"

namespace msd {

/// Marginal supply/demand densities sampled at the nodes of a PriceGrid.
/// rho_s is the supply (sell) density, rho_d the demand (buy) density; both
/// are non-negative and finite. Between nodes the density is understood as
/// piecewise linear, which fixes the quadrature convention for the cumulative
/// curves.
struct MsdCurve {
  MsdCurve(PriceGrid grid_, std::vector<double> rho_s_, std::vector<double> rho_d_);

  static MsdCurve zero(const PriceGrid& grid);

  PriceGrid grid;
  std::vector<double> rho_s;
  std::vector<double> rho_d;

  double total_supply() const;
  double total_demand() const;

  /// Linear interpolation of the node densities at y (in-grid only).
  double supply_density_at(double y) const;
  double demand_density_at(double y) const;
};

/// S(y) = integral of rho_s from y_min to y (trapezoid between nodes, linear
/// inside the cut cell). Non-decreasing in y; S(y_min) = 0.
double cumulative_supply(const MsdCurve& curve, double y);

/// D(y) = integral of rho_d from y to y_max. Non-increasing in y;
/// D(y_max) = 0.
double cumulative_demand(const MsdCurve& curve, double y);

/// Node-sampled prefix integrals, matched to cumulative_supply /
/// cumulative_demand at the nodes.
std::vector<double> cumulative_supply_nodes(const MsdCurve& curve);
std::vector<double> cumulative_demand_nodes(const MsdCurve& curve);

/// Writes `y,rho_s,rho_d,S_cum,D_cum` rows (header included).
void write_curve_csv(const MsdCurve& curve, const std::string& path);

/// Max relative L-inf distance between two curves on a shared grid, scaled by
/// the larger of the two sup norms (0 when both vanish).
double relative_linf_distance(const MsdCurve& a, const MsdCurve& b);

}  // namespace msd
