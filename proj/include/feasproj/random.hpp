#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

#include "feasproj/matrix.hpp"

namespace feasproj {

/// Deterministic random stream. The engine is mt19937_64, whose output
/// sequence is pinned by the C++ standard, and every derived draw below is
/// implemented by hand on top of the raw 64-bit stream:
///
///   - uniform doubles take the top 53 bits,
///   - standard normals use the Box-Muller transform (pairs, one cached),
///   - bounded integers use rejection sampling (no modulo bias).
///
/// Library distributions are avoided on purpose: their value sequences are
/// implementation-defined, which would break seed-for-seed reproducibility.
/// A RandomSource is single-consumer; concurrent tasks must each own one,
/// seeded via derive_seed.
class RandomSource {
public:
  explicit RandomSource(std::uint64_t seed) : engine_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64() { return engine_(); }

  /// Uniform on [0,1) with 53-bit resolution.
  double next_double01();

  /// Uniform on (0,1]; safe as a log() argument.
  double next_open01();

  /// Uniform on [lo, hi).
  double next_uniform(double lo, double hi);

  /// Standard normal via Box-Muller.
  double next_gaussian();

  /// Uniform integer on [0, bound), bound >= 1.
  std::uint64_t next_below(std::uint64_t bound);

  /// Derive an independent child seed from a base seed and a path of
  /// indices (e.g. {cell_row, cell_col, run}). splitmix64-based hash chain;
  /// fixed for all time so that sweeps replay identically.
  static std::uint64_t derive_seed(std::uint64_t base,
                                   std::initializer_list<std::uint64_t> path);

private:
  std::mt19937_64 engine_;
  std::uint64_t seed_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// rows x cols matrix of i.i.d. standard normal entries, filled in row-major
/// order from the given stream.
Matrix gaussian_matrix(Index rows, Index cols, RandomSource& rng);

}  // namespace feasproj
