#include <cmath>
#include <vector>

#include <doctest.h>

#include "msdlab/errors.hpp"
#include "msdlab/numerics.hpp"

using namespace msd;

TEST_CASE("trapezoid integrates linear functions exactly") {
  std::vector<double> f;
  const double dx = 0.1;
  for (int i = 0; i <= 50; ++i) f.push_back(2.0 + 3.0 * dx * i);
  // int_0^5 (2 + 3x) dx = 10 + 37.5
  CHECK(num::trapezoid(f, dx) == doctest::Approx(47.5).epsilon(1e-14));
  CHECK(num::trapezoid(std::vector<double>{4.0}, dx) == 0.0);
}

TEST_CASE("simpson converges at fourth order") {
  const auto f = [](double x) { return std::exp(-x) * std::sin(3.0 * x); };
  // int_0^2 e^{-x} sin(3x) dx = (3 - e^{-2}(3 cos 6 + sin 6)) / 10
  const double exact = (3.0 - std::exp(-2.0) * (3.0 * std::cos(6.0) + std::sin(6.0))) / 10.0;
  const double err64 = std::abs(num::simpson(f, 0.0, 2.0, 64) - exact);
  const double err128 = std::abs(num::simpson(f, 0.0, 2.0, 128) - exact);
  CHECK(err64 < 5e-7);
  CHECK(err64 / err128 == doctest::Approx(16.0).epsilon(0.15));  // h^4 halving
  CHECK(num::simpson(f, 0.0, 2.0, 1024) == doctest::Approx(exact).epsilon(1e-9));
  // odd panel counts are rounded up, zero works too
  CHECK(std::abs(num::simpson(f, 0.0, 2.0, 63) - exact) < 5e-7);
  CHECK(num::simpson(f, 1.0, 1.0, 10) == 0.0);
}

TEST_CASE("tridiagonal solver reproduces a dense solve") {
  // system: [2 -1 0; -1 2 -1; 0 -1 2] x = [1, 0, 1] -> x = [1, 1, 1]
  std::vector<double> lower{0.0, -1.0, -1.0};
  std::vector<double> diag{2.0, 2.0, 2.0};
  std::vector<double> upper{-1.0, -1.0, 0.0};
  std::vector<double> rhs{1.0, 0.0, 1.0};
  num::solve_tridiagonal(lower, diag, upper, rhs);
  CHECK(rhs[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rhs[1] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rhs[2] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("tridiagonal solver rejects singular pivots") {
  std::vector<double> lower{0.0, 1.0};
  std::vector<double> diag{0.0, 1.0};
  std::vector<double> upper{1.0, 0.0};
  std::vector<double> rhs{1.0, 1.0};
  CHECK_THROWS_AS(num::solve_tridiagonal(lower, diag, upper, rhs), NumericError);
}

TEST_CASE("gaussian convolution of a wide linear ramp is exact") {
  // For f(x) = a + b x sampled far beyond the kernel reach, the convolution
  // at interior points is a + b * center.
  std::vector<double> xs;
  std::vector<double> fs;
  for (int i = 0; i <= 400; ++i) {
    const double x = -20.0 + 0.1 * i;
    xs.push_back(x);
    fs.push_back(2.5 - 0.75 * x);
  }
  for (const double center : {-3.0, 0.0, 1.7}) {
    const double got = num::convolve_linear_gaussian(xs, fs, center, 2.0);
    CHECK(got == doctest::Approx(2.5 - 0.75 * center).epsilon(1e-12));
  }
}

TEST_CASE("gaussian convolution matches a frozen half-line value") {
  // f = 1 on [0, 40], zero outside; kernel variance 2 at center 1:
  // integral = Phi(1/sqrt(2)) = (1 + erf(0.5)) / 2 with erf(0.5) =
  // 0.520499877813046538 (tail beyond 40 is ~1e-170).
  std::vector<double> xs;
  std::vector<double> fs;
  for (int i = 0; i <= 800; ++i) {
    xs.push_back(0.05 * i);
    fs.push_back(1.0);
  }
  const double got = num::convolve_linear_gaussian(xs, fs, 1.0, 2.0);
  CHECK(got == doctest::Approx(0.5 * (1.0 + 0.520499877813046538)).epsilon(1e-12));
}

TEST_CASE("affine fit recovers exact lines and index windows") {
  std::vector<double> xs{0.0, 1.0, 2.0, 3.0, 4.0, 5.0};
  std::vector<double> fs{1.0, 1.5, 2.0, 2.5, 3.0, 100.0};
  const num::AffineFit fit = num::fit_affine(xs, fs, 0, 4);
  CHECK(fit.slope == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(fit.intercept == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("bisection finds the root of an increasing function") {
  const auto f = [](double x) { return x * x * x - 2.0; };
  const double root = num::bisect_increasing(f, 0.0, 2.0, 1e-12);
  CHECK(root == doctest::Approx(std::cbrt(2.0)).epsilon(1e-10));
  CHECK_THROWS_AS(num::bisect_increasing(f, 2.0, 3.0, 1e-12), NumericError);
}

TEST_CASE("linear interpolation clamps outside the range") {
  std::vector<double> xs{0.0, 1.0, 3.0};
  std::vector<double> fs{1.0, 2.0, 0.0};
  CHECK(num::interp_linear(xs, fs, 0.5) == doctest::Approx(1.5));
  CHECK(num::interp_linear(xs, fs, 2.0) == doctest::Approx(1.0));
  CHECK(num::interp_linear(xs, fs, -5.0) == 1.0);
  CHECK(num::interp_linear(xs, fs, 99.0) == 0.0);
}
