#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "msdlab/params.hpp"

namespace msd {

/// Converged shape of the pre-auction book in the frequent-auction limit,
/// normalized to unit asymptotic slope: phi(u) ~ u + u0 for large u.
struct PhiSolution {
  std::vector<double> u;
  std::vector<double> phi;
  double u0 = 0.0;
  double slope = 0.0;       ///< asymptotic slope before normalization of the last iterate
  double residual = 0.0;    ///< max |phi - K[phi]| on [0, u_max/2]
  std::size_t iterations = 0;
  std::vector<double> delta_history;  ///< successive sup-norm changes
};

struct FixedPointOptions {
  double u_max = 16.0;   ///< >= 12 required
  double du = 0.025;     ///< <= 0.05 required
  double tol = 1e-9;     ///< successive-change stopping threshold
  std::size_t max_iterations = 4000;
  std::vector<double> initial;  ///< optional phi_0 samples; default phi_0(u) = u
};

/// One application of the smoothing kernel,
///   K[phi](u) = int_0^inf phi(w) e^{-(u-w)^2/4} / sqrt(4 pi) dw.
/// phi is the piecewise-linear interpolant of the samples on [0, u_max]
/// (integrated exactly); beyond u_max it is continued by the affine asymptote
/// fitted on [u_max/2, 3 u_max/4], whose Gaussian moments are closed form.
std::vector<double> apply_kernel(const std::vector<double>& phi, double u_max, double du);

/// Picard iteration of apply_kernel with slope renormalization after each
/// step. Converges when the sup-norm change drops below tol; throws
/// NumericError with the residual history when max_iterations is hit.
PhiSolution solve_fixed_point(const FixedPointOptions& options = {});

struct CycleComparison {
  double tau = 0.0;
  double deviation = 0.0;  ///< sup |phi_emp - phi| on u in [0, 3]
};

/// Runs auction cycles at each tau, rescales the converged pre-auction supply
/// density by 1/(L sqrt(D tau)) and reports the sup-distance from phi on
/// u in [0, 3]. Deviations shrink as tau decreases.
std::vector<CycleComparison> compare_with_auction_sequence(const ModelParams& params,
                                                           const std::vector<double>& taus,
                                                           const PhiSolution& solution);

/// Writes `u,phi` rows plus a metadata block (u0, slope, residual,
/// iterations) as key=value lines in a sibling file.
void write_phi_csv(const PhiSolution& solution, const std::string& path,
                   const std::string& metadata_path);

}  // namespace msd
