#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "feasproj/projections.hpp"

namespace feasproj {

/// Starting pair for the alternating projections.
///
/// SparseFirst (the default) sets S0 to the sparsified input (masked input
/// for the partially observed solver) and L0 to zero, so the first rank
/// projection acts on data with the large outliers already removed. When
/// outliers dwarf the low-rank part, a zero or small random start makes the
/// first SVD lock onto outlier directions and progress collapses to a crawl
/// (observed decay rate ~0.9999 per iteration); the sparse-first start
/// recovers the fast regime. On instances where the low-rank part dominates
/// the choice is immaterial: every start family converges at the same rate.
struct Initialization {
  enum class Kind { SparseFirst, Zeros, Given, RandomGaussian };

  Kind kind = Kind::SparseFirst;
  Matrix l0, s0;           // Given
  std::uint64_t seed = 0;  // RandomGaussian

  static Initialization sparse_first() { return {}; }
  static Initialization zeros() {
    Initialization init;
    init.kind = Kind::Zeros;
    return init;
  }
  static Initialization given(Matrix l0, Matrix s0) {
    Initialization init;
    init.kind = Kind::Given;
    init.l0 = std::move(l0);
    init.s0 = std::move(s0);
    return init;
  }
  static Initialization random_gaussian(std::uint64_t seed) {
    Initialization init;
    init.kind = Kind::RandomGaussian;
    init.seed = seed;
    return init;
  }
};

struct SolverConfig {
  Index rank = 1;
  SparsityLevel alpha{0.1};
  double tolerance = 2e-4;
  int max_iterations = 500;
  SvdBackend svd = SvdBackend::exact();
  Initialization init = Initialization::sparse_first();
};

struct DecompositionResult {
  Matrix low_rank;
  Matrix sparse;
  /// Relative feasibility residual after each full iteration, i.e. on the
  /// pair that just left the rank and sparsity projections.
  std::vector<double> residual_trace;
  int iterations = 0;
  bool converged = false;
  SvdFlags metadata;
};

/// Invoked after each full iteration with the just-produced pair and its
/// residual; used by the harness and tests to inspect every iterate.
using IterationObserver =
    std::function<void(int iteration, const Matrix& l, const Matrix& s, double residual)>;

/// Alternating projections for A = L + S with rank(L) <= r and row/column
/// sparse S. Each iteration projects (L,S) onto the consistency constraint
/// (closed form), then L onto the rank constraint and S onto the sparsity
/// pattern. Stops when ||A - L - S||_F / max(||A||_F, 1) <= tolerance or at
/// max_iterations; non-convergence is a normal outcome reported through the
/// converged flag. A NaN/Inf mid-iteration aborts with the trace retained
/// in the thrown NumericError.
DecompositionResult solve_rpca(const Matrix& a, const SolverConfig& cfg,
                               const IterationObserver& observer = {});

/// Partially observed variant: the consistency projection binds only the
/// observed entries, the rank projection acts on the observed update plus
/// the previous iterate's unobserved part, and the residual is measured on
/// observed entries only: ||P(A-L-S)||_F / max(||P(A)||_F, 1). With a full
/// mask the iterate sequence is bit-identical to solve_rpca. An empty mask
/// is rejected.
DecompositionResult solve_rmc(const Matrix& a, const ObservationMask& mask,
                              const SolverConfig& cfg,
                              const IterationObserver& observer = {});

/// Geometric decay rate fitted to the tail of a residual trace.
struct RateEstimate {
  double c_hat = 0.0;          // exp(slope) of the log-linear fit
  bool above_one = false;      // trace is not decaying over the window
  int window_begin = 0;        // [begin, end) iteration indices used
  int window_end = 0;
  double r_squared = 0.0;
};

/// Least-squares fit of log(residual_k) = log(d0) + k log(c) over the tail
/// of the trace (default: last half). Requires at least 5 strictly positive
/// residuals; nonpositive entries inside the window are skipped.
RateEstimate estimate_rate(const std::vector<double>& trace, double tail_fraction = 0.5);

}  // namespace feasproj
