#include "msdlab/rng.hpp"

#include <cmath>

#include "msdlab/errors.hpp"

namespace msd {

namespace {

std::uint64_t mix(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t Rng::derive(std::uint64_t seed, std::string_view stream) {
  // FNV-1a over the stream name folded into the seed, then tempered.
  std::uint64_t h = 1469598103934665603ULL;
  for (const char c : stream) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  std::uint64_t s = seed ^ h;
  mix(s);
  mix(s);
  return s;
}

Rng::Rng(std::uint64_t seed, std::string_view stream) : state_(derive(seed, stream)) {}

std::uint64_t Rng::next_u64() { return mix(state_); }

double Rng::uniform() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double a, double b) { return a + (b - a) * uniform(); }

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * 3.14159265358979323846 * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::uint64_t Rng::poisson(double mean) {
  if (!(mean >= 0.0) || !std::isfinite(mean)) {
    throw ValidationError("poisson: mean must be finite and >= 0");
  }
  if (mean == 0.0) return 0;
  if (mean > 30.0) {
    // Split recursively; the sum of independent halves has the exact law.
    const double half = 0.5 * mean;
    return poisson(half) + poisson(mean - half);
  }
  const double limit = std::exp(-mean);
  std::uint64_t k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= uniform();
  } while (p > limit);
  return k - 1;
}

}  // namespace msd
