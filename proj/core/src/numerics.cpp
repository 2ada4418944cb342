#include "msdlab/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "msdlab/errors.hpp"

namespace msd::num {

namespace {
constexpr double kInvSqrt2Pi = 0.3989422804014326779;
constexpr double kSqrt2 = 1.4142135623730950488;
}  // namespace

double trapezoid(std::span<const double> values, double dx) {
  if (values.size() < 2) return 0.0;
  double sum = 0.5 * (values.front() + values.back());
  for (std::size_t i = 1; i + 1 < values.size(); ++i) sum += values[i];
  return sum * dx;
}

double simpson(const std::function<double(double)>& f, double a, double b, std::size_t panels) {
  if (panels == 0) panels = 2;
  if (panels % 2 != 0) ++panels;
  const double h = (b - a) / static_cast<double>(panels);
  double sum = f(a) + f(b);
  for (std::size_t i = 1; i < panels; ++i) {
    sum += f(a + h * static_cast<double>(i)) * (i % 2 == 1 ? 4.0 : 2.0);
  }
  return sum * h / 3.0;
}

void solve_tridiagonal(std::span<const double> lower, std::span<double> diag,
                       std::span<const double> upper, std::span<double> rhs) {
  const std::size_t n = diag.size();
  if (lower.size() != n || upper.size() != n || rhs.size() != n) {
    throw ValidationError("tridiagonal solve: band sizes differ");
  }
  if (n == 0) return;
  for (std::size_t i = 1; i < n; ++i) {
    if (diag[i - 1] == 0.0) throw NumericError("tridiagonal solve: zero pivot");
    const double w = lower[i] / diag[i - 1];
    diag[i] -= w * upper[i - 1];
    rhs[i] -= w * rhs[i - 1];
  }
  if (diag[n - 1] == 0.0) throw NumericError("tridiagonal solve: zero pivot");
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) {
    rhs[i] = (rhs[i] - upper[i] * rhs[i + 1]) / diag[i];
  }
}

double convolve_linear_gaussian(std::span<const double> xs, std::span<const double> fs,
                                double center, double variance) {
  if (xs.size() != fs.size() || xs.size() < 2) {
    throw ValidationError("gaussian convolution: need matching samples with >= 2 nodes");
  }
  if (!(variance > 0.0)) throw ValidationError("gaussian convolution: variance must be > 0");
  const double dx = xs[1] - xs[0];
  const double sd = std::sqrt(variance);
  const double reach = 9.0 * sd;
  const std::size_t n = xs.size();
  std::size_t first = 0;
  std::size_t last = n - 2;
  if (center - reach > xs.front()) {
    first = static_cast<std::size_t>((center - reach - xs.front()) / dx);
    if (first > n - 2) return 0.0;
  }
  if (center + reach < xs.back()) {
    const double upper_off = (center + reach - xs.front()) / dx;
    if (upper_off < 0.0) return 0.0;
    last = std::min<std::size_t>(last, static_cast<std::size_t>(upper_off) + 1);
  }
  double total = 0.0;
  double za = (xs[first] - center) / sd;
  double cdf_a = 0.5 * std::erfc(-za / kSqrt2);
  double pdf_a = std::exp(-0.5 * za * za) * kInvSqrt2Pi;
  for (std::size_t i = first; i <= last; ++i) {
    const double zb = (xs[i + 1] - center) / sd;
    const double cdf_b = 0.5 * std::erfc(-zb / kSqrt2);
    const double pdf_b = std::exp(-0.5 * zb * zb) * kInvSqrt2Pi;
    const double i0 = cdf_b - cdf_a;
    // int (x - x_i) n(x) dx = (center - x_i) i0 - sd (pdf_b - pdf_a)
    const double i1 = (center - xs[i]) * i0 - sd * (pdf_b - pdf_a);
    const double slope = (fs[i + 1] - fs[i]) / dx;
    total += fs[i] * i0 + slope * i1;
    cdf_a = cdf_b;
    pdf_a = pdf_b;
  }
  return total;
}

AffineFit fit_affine(std::span<const double> xs, std::span<const double> fs, std::size_t lo,
                     std::size_t hi) {
  if (xs.size() != fs.size() || hi >= xs.size() || lo >= hi) {
    throw ValidationError("affine fit: bad index range");
  }
  const double n = static_cast<double>(hi - lo + 1);
  double sx = 0.0, sf = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) {
    sx += xs[i];
    sf += fs[i];
  }
  const double mx = sx / n;
  const double mf = sf / n;
  double sxx = 0.0, sxf = 0.0;
  for (std::size_t i = lo; i <= hi; ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxf += (xs[i] - mx) * (fs[i] - mf);
  }
  if (sxx == 0.0) throw NumericError("affine fit: degenerate abscissae");
  AffineFit fit;
  fit.slope = sxf / sxx;
  fit.intercept = mf - fit.slope * mx;
  return fit;
}

double bisect_increasing(const std::function<double(double)>& f, double lo, double hi,
                         double tol) {
  double flo = f(lo);
  double fhi = f(hi);
  if (flo > 0.0 || fhi < 0.0) throw NumericError("bisection: root not bracketed");
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fm = f(mid);
    if (fm < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double interp_linear(std::span<const double> xs, std::span<const double> fs, double x) {
  if (xs.size() != fs.size() || xs.empty()) {
    throw ValidationError("interpolation: need matching non-empty samples");
  }
  if (x <= xs.front()) return fs.front();
  if (x >= xs.back()) return fs.back();
  const auto it = std::upper_bound(xs.begin(), xs.end(), x);
  const std::size_t k = static_cast<std::size_t>(it - xs.begin()) - 1;
  const double t = (x - xs[k]) / (xs[k + 1] - xs[k]);
  return fs[k] + t * (fs[k + 1] - fs[k]);
}

}  // namespace msd::num
