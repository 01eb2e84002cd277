#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "feasproj/bench.hpp"
#include "oracles.hpp"

using namespace feasproj;

TEST_CASE("gen_synthetic invariants") {
  RandomSource rng(42);
  const auto inst = gen_synthetic(50, 40, 4, 0.1, -500, 500, rng);

  SUBCASE("additive identity is exact") {
    const Matrix gap = inst.a - inst.low_rank_true - inst.sparse_true;
    CHECK((gap.array() == 0.0).all());
  }
  SUBCASE("low-rank part has numeric rank r") {
    CHECK(oracles::numeric_rank(inst.low_rank_true) == 4);
  }
  SUBCASE("sparse part obeys the budget and the magnitude range") {
    CHECK(oracles::within_sparsity_budget(inst.sparse_true, 0.1));
    CHECK(inst.sparse_true.cwiseAbs().maxCoeff() <= 500.0);
    CHECK(inst.sparse_true.cwiseAbs().maxCoeff() > 0.0);
  }
  SUBCASE("deterministic per seed") {
    RandomSource a(9), b(9);
    const auto ia = gen_synthetic(20, 20, 2, 0.2, -10, 10, a);
    const auto ib = gen_synthetic(20, 20, 2, 0.2, -10, 10, b);
    CHECK(oracles::bit_equal(ia.a, ib.a));
  }
  SUBCASE("tiny alpha floors at one nonzero per row and column") {
    RandomSource r2(11);
    const auto tiny = gen_synthetic(30, 30, 2, 0.001, -5, 5, r2);
    CHECK(oracles::within_sparsity_budget(tiny.sparse_true, 0.001));
  }
  SUBCASE("parameter validation") {
    RandomSource r3(1);
    CHECK_THROWS_AS(gen_synthetic(10, 10, 0, 0.1, -1, 1, r3), ConfigError);
    CHECK_THROWS_AS(gen_synthetic(10, 10, 11, 0.1, -1, 1, r3), ConfigError);
    CHECK_THROWS_AS(gen_synthetic(10, 10, 2, 0.1, 1, -1, r3), ConfigError);
    CHECK_THROWS_AS(gen_synthetic(10, 10, 2, 1.5, -1, 1, r3), ConfigError);
  }
}

TEST_CASE("gen_mask") {
  RandomSource rng(5);
  SUBCASE("fraction one is the full mask") {
    CHECK(gen_mask(7, 6, 1.0, rng).is_full());
  }
  SUBCASE("cardinality is exact") {
    CHECK(gen_mask(10, 10, 0.5, rng).count() == 50);
    CHECK(gen_mask(10, 10, 0.33, rng).count() == 33);
  }
  SUBCASE("same seed same mask, fresh seeds differ") {
    RandomSource a(6), b(6), c(7);
    const auto ma = gen_mask(20, 20, 0.4, a);
    const auto mb = gen_mask(20, 20, 0.4, b);
    const auto mc = gen_mask(20, 20, 0.4, c);
    CHECK(ma == mb);
    CHECK_FALSE(ma == mc);
  }
  SUBCASE("fraction out of range rejected") {
    CHECK_THROWS_AS(gen_mask(5, 5, 0.0, rng), ConfigError);
    CHECK_THROWS_AS(gen_mask(5, 5, 1.2, rng), ConfigError);
  }
}

TEST_CASE("recovery metrics") {
  RandomSource rng(8);
  const Matrix l = gaussian_matrix(6, 5, rng);
  const Matrix s = gaussian_matrix(6, 5, rng);
  const Matrix a = l + s;

  SUBCASE("perfect recovery scores zero") {
    CHECK(relative_error_rpca(l, s, l, s, a) == 0.0);
    CHECK(relative_error_rmc(l, l) == 0.0);
    CHECK(rmse(l, l) == 0.0);
  }
  SUBCASE("zero estimate plugs in") {
    const Matrix z = Matrix::Zero(6, 5);
    CHECK(relative_error_rpca(l, s, z, z, a) ==
          doctest::Approx((l.norm() + s.norm()) / a.norm()).epsilon(1e-14));
  }
  SUBCASE("perturbation of known size") {
    RandomSource r2(9);
    Matrix p = gaussian_matrix(6, 5, r2);
    p *= 0.37 / p.norm();
    CHECK(std::abs(relative_error_rpca(l, s, Matrix(l + p), s, a) - 0.37 / a.norm()) <=
          1e-12);
  }
  SUBCASE("doubling gives relative error one") {
    CHECK(relative_error_rmc(l, Matrix(2.0 * l)) == 1.0);
  }
  SUBCASE("single entry off by six over a 3x3 grid") {
    Matrix base = Matrix::Zero(3, 3);
    Matrix off = base;
    off(1, 2) = 6.0;
    CHECK(rmse(base, off) == doctest::Approx(2.0).epsilon(1e-15));
  }
  SUBCASE("metrics scale with the error") {
    RandomSource r3(10);
    Matrix p = gaussian_matrix(6, 5, r3);
    const double one = relative_error_rmc(l, Matrix(l + p));
    const double three = relative_error_rmc(l, Matrix(l + 3.0 * p));
    CHECK(three == doctest::Approx(3.0 * one).epsilon(1e-12));
    CHECK(rmse(l, Matrix(l + 3.0 * p)) ==
          doctest::Approx(3.0 * rmse(l, Matrix(l + p))).epsilon(1e-12));
  }
  SUBCASE("degenerate denominators rejected") {
    const Matrix z = Matrix::Zero(6, 5);
    CHECK_THROWS_AS(relative_error_rpca(z, z, l, s, z), ConfigError);
    CHECK_THROWS_AS(relative_error_rmc(z, l), ConfigError);
  }
}

TEST_CASE("proximity measure") {
  Matrix x(4, 1), y(4, 1);
  x << 0.0, 0.0, 0.0, 0.0;
  y << 0.0, 0.1, 0.2, 0.3;

  CHECK(proximity_measure(x, x, 0.0) == 1.0);
  CHECK(proximity_measure(x, y, 1.0) == 1.0);
  CHECK(proximity_measure(x, y, 0.15) == 0.5);

  double prev = 0.0;
  for (double eps : {0.0, 0.05, 0.1, 0.2, 0.25, 0.31, 1.0}) {
    const double d = proximity_measure(x, y, eps);
    CHECK(d >= prev);
    CHECK(d >= 0.0);
    CHECK(d <= 1.0);
    prev = d;
  }

  Matrix bad = y;
  bad(0, 0) = 1.5;
  CHECK_THROWS_AS(proximity_measure(x, bad, 0.5), ConfigError);
  CHECK_THROWS_AS(proximity_measure(x, y, 2.0), ConfigError);
}

TEST_CASE("phase_sweep cells") {
  SUBCASE("feasible cell succeeds") {
    SweepConfig cfg;
    cfg.rows = cfg.cols = 100;
    cfg.rho_axis = {0.05};
    cfg.alpha_axis = {0.05};
    cfg.runs_per_cell = 1;
    const auto grid = phase_sweep(cfg);
    CHECK(grid.cell(0, 0).success_fraction == 1.0);
    CHECK(grid.cell(0, 0).runs == 1);
    CHECK(grid.cell(0, 0).mean_relative_error < 0.01);
  }
  SUBCASE("extreme corner fails") {
    SweepConfig cfg;
    cfg.rows = cfg.cols = 100;
    cfg.rho_axis = {0.9};
    cfg.alpha_axis = {0.9};
    cfg.runs_per_cell = 1;
    cfg.solver_max_iterations = 100;
    const auto grid = phase_sweep(cfg);
    CHECK(grid.cell(0, 0).success_fraction == 0.0);
  }
  SUBCASE("config validation") {
    SweepConfig cfg;
    cfg.rho_axis = {};
    cfg.alpha_axis = {0.1};
    CHECK_THROWS_AS(phase_sweep(cfg), ConfigError);
    cfg.rho_axis = {0.001};  // rank rounds to zero
    CHECK_THROWS_AS(phase_sweep(cfg), ConfigError);
    cfg.rho_axis = {0.1};
    cfg.alpha_axis = {0.0};
    CHECK_THROWS_AS(phase_sweep(cfg), ConfigError);
  }
}

TEST_CASE("phase_sweep is reproducible and worker-count invariant") {
  SweepConfig cfg;
  cfg.rows = cfg.cols = 30;
  cfg.rho_axis = {0.1, 0.2};
  cfg.alpha_axis = {0.05, 0.1};
  cfg.runs_per_cell = 2;
  cfg.solver_max_iterations = 120;
  cfg.base_seed = 77;

  setenv("FEASPROJ_THREADS", "1", 1);
  const auto serial = phase_sweep(cfg);
  setenv("FEASPROJ_THREADS", "4", 1);
  const auto parallel = phase_sweep(cfg);
  unsetenv("FEASPROJ_THREADS");
  const auto defaulted = phase_sweep(cfg);

  auto cells_equal = [](const PhaseGrid& a, const PhaseGrid& b) {
    if (a.cells.size() != b.cells.size()) return false;
    for (std::size_t i = 0; i < a.cells.size(); ++i) {
      if (a.cells[i].success_fraction != b.cells[i].success_fraction) return false;
      if (a.cells[i].mean_relative_error != b.cells[i].mean_relative_error) return false;
      if (a.cells[i].mean_rmse != b.cells[i].mean_rmse) return false;
    }
    return true;
  };
  CHECK(cells_equal(serial, parallel));
  CHECK(cells_equal(serial, defaulted));
}

TEST_CASE("sensitivity: random starts") {
  SensitivityConfig cfg;
  cfg.mode = SensitivityMode::InitSensitivity;
  cfg.rows = cfg.cols = 50;
  cfg.rank = 2;
  cfg.alpha = 0.05;
  cfg.num_starts = 8;
  cfg.solver_max_iterations = 150;
  const auto report = sensitivity_suite(cfg);

  CHECK(report.runs.rows.size() == 8);
  int converged = 0;
  for (const auto& row : report.runs.rows) converged += row[1] == 1.0 ? 1 : 0;
  CHECK(converged == 8);

  REQUIRE(report.per_iteration.columns ==
          std::vector<std::string>{"iteration", "best", "median", "worst"});
  for (const auto& row : report.per_iteration.rows) {
    CHECK(row[1] <= row[2]);  // best <= median
    CHECK(row[2] <= row[3]);  // median <= worst
  }
}

TEST_CASE("sensitivity: observed fraction sweep") {
  SensitivityConfig cfg;
  cfg.mode = SensitivityMode::OmegaSweep;
  cfg.rows = cfg.cols = 40;
  cfg.rank = 2;
  cfg.alpha = 0.05;
  cfg.observed_fractions = {0.4, 1.0};
  cfg.solver_max_iterations = 150;
  const auto report = sensitivity_suite(cfg);

  CHECK(report.runs.rows.size() == 2);
  CHECK(report.per_iteration.columns.size() == 3);  // iteration + one per fraction
  CHECK(report.runs.rows[1][1] == 1.0);             // fully observed converges
}

TEST_CASE("sensitivity: parameter misspecification") {
  SensitivityConfig cfg;
  cfg.mode = SensitivityMode::ParamMisspecification;
  cfg.rows = cfg.cols = 40;
  cfg.rank = 4;
  cfg.alpha = 0.05;
  cfg.rank_offsets = {-2, 0};
  cfg.alpha_factors = {1.0};
  cfg.solver_max_iterations = 150;
  const auto report = sensitivity_suite(cfg);

  REQUIRE(report.runs.rows.size() == 2);
  CHECK(report.runs.rows[0][0] == 2.0);  // underestimated rank
  CHECK(report.runs.rows[0][2] == 0.0);  // does not converge
  CHECK(report.runs.rows[1][0] == 4.0);  // true rank
  CHECK(report.runs.rows[1][2] == 1.0);  // converges
}
