#include <cmath>
#include <cstdint>
#include <vector>

#include <doctest.h>

#include "msdlab/rng.hpp"

using namespace msd;

TEST_CASE("identical seed and stream reproduce the sequence") {
  Rng a(42, "deposition");
  Rng b(42, "deposition");
  for (int i = 0; i < 100; ++i) {
    CHECK(a.next_u64() == b.next_u64());
  }
  CHECK(a.normal() == b.normal());
  CHECK(a.poisson(7.5) == b.poisson(7.5));
}

TEST_CASE("streams with different names are decoupled") {
  Rng a(42, "deposition");
  Rng b(42, "cancellation");
  int same = 0;
  for (int i = 0; i < 64; ++i) {
    if (a.next_u64() == b.next_u64()) ++same;
  }
  CHECK(same == 0);
  CHECK(Rng::derive(42, "deposition") != Rng::derive(42, "cancellation"));
  CHECK(Rng::derive(42, "deposition") != Rng::derive(43, "deposition"));
}

TEST_CASE("uniform stays inside its interval") {
  Rng rng(7, "u");
  for (int i = 0; i < 10000; ++i) {
    const double v = rng.uniform();
    CHECK(v >= 0.0);
    CHECK(v < 1.0);
  }
  for (int i = 0; i < 1000; ++i) {
    const double v = rng.uniform(-2.0, 3.0);
    CHECK(v >= -2.0);
    CHECK(v < 3.0);
  }
}

TEST_CASE("normal moments agree with the standard law") {
  Rng rng(1234, "n");
  const int n = 200000;
  double sum = 0.0;
  double sum2 = 0.0;
  double sum4 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double v = rng.normal();
    sum += v;
    sum2 += v * v;
    sum4 += v * v * v * v;
  }
  const double mean = sum / n;
  const double var = sum2 / n - mean * mean;
  const double kurt = sum4 / n;
  CHECK(std::abs(mean) < 0.01);          // s.e. ~ 0.0022
  CHECK(var == doctest::Approx(1.0).epsilon(0.02));
  CHECK(kurt == doctest::Approx(3.0).epsilon(0.05));
}

TEST_CASE("poisson mean and variance track the rate") {
  Rng rng(99, "p");
  for (const double mean : {0.03, 2.5, 18.0, 120.0}) {
    const int n = 40000;
    double sum = 0.0;
    double sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double v = static_cast<double>(rng.poisson(mean));
      sum += v;
      sum2 += v * v;
    }
    const double m = sum / n;
    const double var = sum2 / n - m * m;
    const double se = std::sqrt(mean / n);
    CHECK(std::abs(m - mean) < 5.0 * se);
    CHECK(var == doctest::Approx(mean).epsilon(0.08));
  }
  CHECK(rng.poisson(0.0) == 0);
}
