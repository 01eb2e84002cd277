#include "feasproj/random.hpp"

#include <cmath>
#include <numbers>

namespace feasproj {

namespace {

// splitmix64 finalizer
std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

double RandomSource::next_double01() {
  return double(next_u64() >> 11) * 0x1.0p-53;
}

double RandomSource::next_open01() {
  return double((next_u64() >> 11) + 1) * 0x1.0p-53;
}

double RandomSource::next_uniform(double lo, double hi) {
  if (!(std::isfinite(lo) && std::isfinite(hi)) || !(lo < hi)) {
    throw ConfigError("next_uniform: bounds must be finite with lo < hi");
  }
  return lo + (hi - lo) * next_double01();
}

double RandomSource::next_gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = next_open01();
  const double u2 = next_double01();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

std::uint64_t RandomSource::next_below(std::uint64_t bound) {
  if (bound == 0) throw ConfigError("next_below: bound must be positive");
  // reject the lowest (2^64 mod bound) values to keep the draw unbiased
  const std::uint64_t threshold = (0 - bound) % bound;
  for (;;) {
    const std::uint64_t x = next_u64();
    if (x >= threshold) return x % bound;
  }
}

std::uint64_t RandomSource::derive_seed(std::uint64_t base,
                                        std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(base);
  for (std::uint64_t v : path) {
    h = mix64(h ^ (mix64(v) + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2)));
  }
  return h;
}

Matrix gaussian_matrix(Index rows, Index cols, RandomSource& rng) {
  if (rows < 1 || cols < 1) {
    throw ConfigError("gaussian_matrix: dimensions must be positive, got " +
                      shape_string(rows, cols));
  }
  Matrix out(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      out(i, j) = rng.next_gaussian();
    }
  }
  return out;
}

}  // namespace feasproj
