#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "feasproj/mask.hpp"
#include "feasproj/random.hpp"
#include "oracles.hpp"

using namespace feasproj;

namespace {

Matrix random_matrix(Index rows, Index cols, std::uint64_t seed) {
  RandomSource rng(seed);
  return gaussian_matrix(rows, cols, rng);
}

}  // namespace

TEST_CASE("restrict keeps observed entries and zeros the rest") {
  const Matrix m = random_matrix(3, 3, 1);

  SUBCASE("full mask is the identity") {
    CHECK(oracles::bit_equal(restrict(m, ObservationMask::full(3, 3)), m));
  }
  SUBCASE("empty mask gives the zero matrix") {
    CHECK(restrict(m, ObservationMask::empty(3, 3)).norm() == 0.0);
  }
  SUBCASE("two-entry mask keeps exactly those entries") {
    const ObservationMask mask(3, 3, {{0, 0}, {2, 1}});
    const Matrix out = restrict(m, mask);
    for (Index i = 0; i < 3; ++i) {
      for (Index j = 0; j < 3; ++j) {
        const bool observed = (i == 0 && j == 0) || (i == 2 && j == 1);
        CHECK(out(i, j) == (observed ? m(i, j) : 0.0));
      }
    }
  }
  SUBCASE("dimension mismatch is rejected") {
    CHECK_THROWS_AS(restrict(m, ObservationMask::full(4, 3)), DimensionError);
    CHECK_THROWS_AS(complement_restrict(m, ObservationMask::full(3, 2)), DimensionError);
  }
}

TEST_CASE("restriction pair reproduces the matrix bit-exactly") {
  const Matrix m = random_matrix(5, 4, 2);
  RandomSource rng(3);
  std::vector<std::pair<Index, Index>> observed;
  for (Index i = 0; i < 5; ++i) {
    for (Index j = 0; j < 4; ++j) {
      if (rng.next_double01() < 0.4) observed.emplace_back(i, j);
    }
  }
  const ObservationMask mask(5, 4, observed);
  const Matrix on = restrict(m, mask);
  const Matrix off = complement_restrict(m, mask);
  CHECK(oracles::bit_equal(Matrix(on + off), m));

  CHECK(oracles::bit_equal(complement_restrict(m, ObservationMask::full(5, 4)),
                           Matrix(Matrix::Zero(5, 4))));
  CHECK(oracles::bit_equal(complement_restrict(m, ObservationMask::empty(5, 4)), m));
}

TEST_CASE("restriction is idempotent and linear") {
  const Matrix m = random_matrix(6, 5, 4);
  const Matrix n = random_matrix(6, 5, 5);
  const ObservationMask mask(6, 5, {{0, 0}, {1, 3}, {2, 2}, {4, 4}, {5, 0}});

  CHECK(oracles::bit_equal(restrict(restrict(m, mask), mask), restrict(m, mask)));

  const Matrix lhs = restrict(Matrix(2.5 * m - 0.75 * n), mask);
  const Matrix rhs = 2.5 * restrict(m, mask) - 0.75 * restrict(n, mask);
  CHECK((lhs - rhs).norm() <= 1e-14 * (1.0 + rhs.norm()));
}

TEST_CASE("mask validation") {
  CHECK_THROWS_AS(ObservationMask(3, 3, {{0, 0}, {0, 0}}), ConfigError);
  CHECK_THROWS_AS(ObservationMask(3, 3, {{3, 0}}), ConfigError);
  CHECK_THROWS_AS(ObservationMask(3, 3, {{0, -1}}), ConfigError);
  CHECK_THROWS_AS(ObservationMask(0, 3, {}), ConfigError);

  const ObservationMask mask(3, 4, {{1, 2}, {0, 0}});
  CHECK(mask.count() == 2);
  CHECK(mask.contains(1, 2));
  CHECK(mask.contains(0, 0));
  CHECK_FALSE(mask.contains(2, 2));
  CHECK_FALSE(mask.contains(5, 5));

  // copies keep the index set and rebuild the membership view on their own
  ObservationMask copy = mask;
  CHECK(copy == mask);
  CHECK(copy.contains(1, 2));
}

TEST_CASE("non-finite input aborts with a numeric error") {
  Matrix m = random_matrix(3, 3, 6);
  m(1, 1) = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(restrict(m, ObservationMask::full(3, 3)), NumericError);
  m(1, 1) = std::numeric_limits<double>::infinity();
  CHECK_THROWS_AS(complement_restrict(m, ObservationMask::full(3, 3)), NumericError);
}

TEST_CASE("gaussian_matrix is deterministic per seed") {
  RandomSource a(7), b(7), c(8);
  const Matrix ma = gaussian_matrix(2, 2, a);
  const Matrix mb = gaussian_matrix(2, 2, b);
  const Matrix mc = gaussian_matrix(2, 2, c);
  CHECK(oracles::bit_equal(ma, mb));
  CHECK_FALSE(oracles::bit_equal(ma, mc));
}

TEST_CASE("gaussian_matrix moments at scale") {
  RandomSource rng(123);
  const Matrix m = gaussian_matrix(1000, 1000, rng);
  const double mean = m.mean();
  const double var = (m.array() - mean).square().sum() / double(m.size() - 1);
  CHECK(std::abs(mean) < 0.01);
  CHECK(std::abs(var - 1.0) < 0.02);
}

TEST_CASE("gaussian_matrix rejects empty shapes") {
  RandomSource rng(1);
  CHECK_THROWS_AS(gaussian_matrix(0, 4, rng), ConfigError);
  CHECK_THROWS_AS(gaussian_matrix(4, 0, rng), ConfigError);
}

TEST_CASE("RandomSource streams and derived seeds") {
  RandomSource a(42), b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

  RandomSource r(9);
  for (int i = 0; i < 1000; ++i) {
    CHECK(r.next_below(17) < 17);
    const double u = r.next_double01();
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const double v = r.next_open01();
    CHECK(v > 0.0);
    CHECK(v <= 1.0);
  }
  CHECK_THROWS_AS(r.next_below(0), ConfigError);
  CHECK_THROWS_AS(r.next_uniform(1.0, 1.0), ConfigError);

  // distinct paths give distinct child seeds
  std::set<std::uint64_t> seeds;
  for (std::uint64_t i = 0; i < 10; ++i) {
    for (std::uint64_t j = 0; j < 10; ++j) {
      seeds.insert(RandomSource::derive_seed(5, {i, j}));
    }
  }
  CHECK(seeds.size() == 100);
  CHECK(RandomSource::derive_seed(5, {1, 2}) != RandomSource::derive_seed(5, {2, 1}));
  CHECK(RandomSource::derive_seed(5, {1, 2}) == RandomSource::derive_seed(5, {1, 2}));
}
