#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace msd::num {

/// Trapezoid weight integral of node samples on a uniform grid.
double trapezoid(std::span<const double> values, double dx);

/// Composite Simpson over [a, b] with n panels (n rounded up to even).
double simpson(const std::function<double(double)>& f, double a, double b, std::size_t panels);

/// Solves a tridiagonal system in place (Thomas algorithm). lower[0] and
/// upper[n-1] are ignored. diag must be non-degenerate.
void solve_tridiagonal(std::span<const double> lower, std::span<double> diag,
                       std::span<const double> upper, std::span<double> rhs);

/// Exact integral of the piecewise-linear interpolant of (x_i, f_i) against a
/// Gaussian kernel exp(-(x-center)^2 / (2 var)) / sqrt(2 pi var). Nodes must
/// be uniformly spaced. Contributions beyond ~9 standard deviations from
/// center are dropped.
double convolve_linear_gaussian(std::span<const double> xs, std::span<const double> fs,
                                double center, double variance);

struct AffineFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Ordinary least squares of f against x over indices [lo, hi].
AffineFit fit_affine(std::span<const double> xs, std::span<const double> fs, std::size_t lo,
                     std::size_t hi);

/// Root of a strictly increasing f on [lo, hi] by bisection; requires
/// f(lo) <= 0 <= f(hi). Stops when the bracket is below tol.
double bisect_increasing(const std::function<double(double)>& f, double lo, double hi, double tol);

/// Linear interpolation of (xs, fs) with clamping outside the range. xs must
/// be strictly increasing.
double interp_linear(std::span<const double> xs, std::span<const double> fs, double x);

}  // namespace msd::num
