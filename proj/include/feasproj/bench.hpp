#pragma once

#include <optional>
#include <string>
#include <vector>

#include "feasproj/solver.hpp"

namespace feasproj {

struct SyntheticParams {
  Index rows = 0;
  Index cols = 0;
  Index rank = 0;
  double alpha = 0.0;
  double magnitude_lo = 0.0;
  double magnitude_hi = 0.0;
  std::uint64_t seed = 0;
};

/// Ground-truth decomposition A = L + S. The identity holds bit-exactly:
/// S is stored as A - L after rounding, so (A - L) - S evaluates to zero.
struct SyntheticInstance {
  Matrix a;
  Matrix low_rank_true;
  Matrix sparse_true;
  std::optional<ObservationMask> mask;
  SyntheticParams params;
};

/// Random test instance: L is a product of two i.i.d. standard normal
/// factors (m x r and n x r, full rank almost surely), S starts from dense
/// uniform values in [magnitude_lo, magnitude_hi) and is thinned by
/// sparsify_alpha, and A = L + S.
SyntheticInstance gen_synthetic(Index rows, Index cols, Index rank, double alpha,
                                double magnitude_lo, double magnitude_hi,
                                RandomSource& rng);

/// Uniformly random set of round(observed_fraction * rows * cols) entries,
/// sampled without replacement (partial Fisher-Yates), deterministic per
/// stream state.
ObservationMask gen_mask(Index rows, Index cols, double observed_fraction,
                         RandomSource& rng);

/// Combined recovery error (||L - L_hat||_F + ||S - S_hat||_F) / ||A||_F.
double relative_error_rpca(const Matrix& l, const Matrix& s, const Matrix& l_hat,
                           const Matrix& s_hat, const Matrix& a);

/// ||L - L_hat||_F / ||L||_F; requires ||L||_F > 0.
double relative_error_rmc(const Matrix& l, const Matrix& l_hat);

/// ||L - L_hat||_F / sqrt(m n).
double rmse(const Matrix& l, const Matrix& l_hat);

/// Fraction of (frame, pixel) pairs with |x - y| <= epsilon, for frame
/// sequences stored one frame per column with values in [0,1]. Always in
/// [0,1], nondecreasing in epsilon, and exactly 1 at epsilon = 1.
double proximity_measure(const Matrix& x, const Matrix& y, double epsilon);

/// How a sweep run counts as a success.
enum class SuccessRule {
  RpcaCombined,  // combined relative error below threshold (fully observed)
  RmcRelative,   // low-rank relative error below threshold (partially observed)
  Rmse,          // no threshold; success means the solver converged
};

struct SweepConfig {
  Index rows = 100;
  Index cols = 100;
  std::vector<double> rho_axis;    // rank = round(rho * rows) per cell
  std::vector<double> alpha_axis;  // each in (0,1]
  int runs_per_cell = 5;
  SuccessRule rule = SuccessRule::RpcaCombined;
  double success_threshold = 0.01;
  double unobserved_fraction = 0.0;  // RMC rules only
  double magnitude_lo = -500.0;
  double magnitude_hi = 500.0;
  double solver_tolerance = 2e-4;
  int solver_max_iterations = 500;
  SvdBackend svd = SvdBackend::exact();
  std::uint64_t base_seed = 0;
};

struct PhaseCell {
  double success_fraction = 0.0;
  double mean_relative_error = 0.0;
  double mean_rmse = 0.0;
  int runs = 0;
};

struct PhaseGrid {
  std::vector<double> rho_axis;
  std::vector<double> alpha_axis;
  std::vector<PhaseCell> cells;  // rho-major

  const PhaseCell& cell(std::size_t rho_idx, std::size_t alpha_idx) const {
    return cells.at(rho_idx * alpha_axis.size() + alpha_idx);
  }
};

/// Phase-transition sweep. For every (rho, alpha) cell and run index, an
/// independent child seed drives instance generation (plus mask for RMC
/// rules) and the solve uses the cell's true rank and alpha. Cells and runs
/// execute on a worker pool (FEASPROJ_THREADS caps it) but the result is
/// bit-identical for any worker count. A NumericError in one run counts as
/// a failure for that run and never aborts the sweep.
PhaseGrid phase_sweep(const SweepConfig& cfg);

enum class SensitivityMode { InitSensitivity, OmegaSweep, ParamMisspecification };

struct SensitivityConfig {
  SensitivityMode mode = SensitivityMode::InitSensitivity;
  Index rows = 100;
  Index cols = 100;
  Index rank = 5;
  double alpha = 0.05;
  // moderate outliers, comparable to the low-rank part's entry scale; the
  // regime where every start family converges at the same rate
  double magnitude_lo = -3.0;
  double magnitude_hi = 3.0;
  int num_starts = 50;                                 // InitSensitivity
  std::vector<double> observed_fractions =             // OmegaSweep
      {0.05, 0.1, 0.25, 0.5, 0.75, 0.9, 1.0};
  std::vector<Index> rank_offsets = {-2, 0, 2};        // ParamMisspecification
  std::vector<double> alpha_factors = {0.5, 1.0, 2.0}; // ParamMisspecification
  double solver_tolerance = 1e-4;
  int solver_max_iterations = 200;
  SvdBackend svd = SvdBackend::exact();
  std::uint64_t base_seed = 0;
};

/// Plain numeric table; written out as CSV with one header line.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// Sensitivity experiment output. `per_iteration` holds the mode's residual
/// trace view (best/median/worst per iteration for random starts; one
/// column per observed fraction or per parameter choice otherwise), with
/// finished runs padded by their final residual. `runs` holds one row per
/// solve with its outcome.
struct SensitivityReport {
  Table per_iteration;
  Table runs;
};

/// One synthetic instance, then:
///   InitSensitivity      - num_starts random starting pairs on it;
///   OmegaSweep           - one solve per observed fraction;
///   ParamMisspecification- solves over rank_offsets x alpha_factors around
///                          the true parameters.
SensitivityReport sensitivity_suite(const SensitivityConfig& cfg);

/// Worker count for sweeps: FEASPROJ_THREADS when set to a positive value,
/// otherwise the machine default.
int worker_count();

}  // namespace feasproj
