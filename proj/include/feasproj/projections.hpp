#pragma once

#include <cstdint>
#include <utility>

#include "feasproj/mask.hpp"
#include "feasproj/random.hpp"

namespace feasproj {

/// Per-row / per-column sparsity budget. A value alpha in (0,1] allows at
/// most max(1, floor(alpha * n)) nonzeros in a length-n row (and the
/// analogous count per column). The floor keeps the constraint conservative;
/// the lower bound of one nonzero is a deliberate choice so that the
/// operator never degenerates to an all-zero map for tiny alpha.
class SparsityLevel {
public:
  explicit SparsityLevel(double alpha);

  double value() const { return alpha_; }

  /// Nonzero budget for a row/column of the given length.
  Index budget(Index length) const;

private:
  double alpha_;
};

/// Backend for the rank-r projection: exact truncated SVD, or a randomized
/// block Krylov basis with accuracy parameter epsilon in (0,1).
struct SvdBackend {
  enum class Kind { Exact, BlockKrylov };

  Kind kind = Kind::Exact;
  double epsilon = 0.1;
  std::uint64_t seed = 0;

  static SvdBackend exact() { return {}; }
  static SvdBackend block_krylov(double epsilon, std::uint64_t seed) {
    return {Kind::BlockKrylov, epsilon, seed};
  }
};

/// Diagnostics accumulated by the rank projection and surfaced in solver
/// results.
struct SvdFlags {
  /// sigma_r and sigma_{r+1} coincide up to round-off: the rank-r truncation
  /// is not unique and the backend's deterministic ordering picked one.
  bool rank_ambiguous = false;
  /// The Krylov subspace would have needed at least min(m,n) columns; the
  /// exact SVD was used instead.
  bool krylov_fallback = false;
  /// A zero matrix was handed to the randomized basis; an arbitrary
  /// orthonormal basis was returned.
  bool degenerate_input = false;

  void merge(const SvdFlags& o) {
    rank_ambiguous |= o.rank_ambiguous;
    krylov_fallback |= o.krylov_fallback;
    degenerate_input |= o.degenerate_input;
  }
};

/// Nearest pair (L*, S*) to (L0, S0) in the Frobenius sense subject to
/// L + S = A. Closed form: L* = L0 + g, S* = A - L*, with g = (A-L0-S0)/2,
/// algebraically equal to L* = (L0-S0+A)/2, S* = (S0-L0+A)/2. The
/// correction form is used so that re-projecting the output computes a gap
/// of exactly zero and returns the pair bit-for-bit unchanged.
std::pair<Matrix, Matrix> project_linear(const Matrix& l0, const Matrix& s0,
                                         const Matrix& a);

/// Masked variant: the constraint only binds observed entries, and the
/// problem separates per coordinate. Applies the project_linear update on
/// observed cells and writes exact zeros elsewhere. With a full mask this
/// is identical to project_linear.
std::pair<Matrix, Matrix> project_linear_masked(const Matrix& l0, const Matrix& s0,
                                                const Matrix& a,
                                                const ObservationMask& mask);

/// Orthonormal basis approximating the top-r left singular space.
struct KrylovBasis {
  Matrix basis;  // m x r, orthonormal columns
  bool used_exact_fallback = false;
  bool degenerate_input = false;
};

/// Randomized block Krylov method. Builds the Krylov space
/// span{L*Pi, (L L^T) L*Pi, ..., (L L^T)^q L*Pi} from a Gaussian sketch
/// Pi (n x r), orthonormalizes it, and extracts the top r directions from
/// the projected Gram matrix. q = ceil(log(n)/sqrt(epsilon)), clamped to
/// [2,64]. Blocks are re-orthonormalized between multiplications, which
/// spans the same space in exact arithmetic and avoids the numerical
/// collapse of raw power iterates.
///
/// With high probability ||L - Z Z^T L||_F <= (1+epsilon) ||L - L_r||_F
/// where L_r is the best rank-r approximation. When the Krylov space would
/// need >= min(m,n) columns the exact SVD is used and flagged; a zero input
/// yields an arbitrary orthonormal basis, also flagged.
KrylovBasis block_krylov_svd(const Matrix& l, Index r, double epsilon,
                             RandomSource& rng);

/// Rank-r hard thresholding: the Frobenius-nearest matrix of rank <= r.
/// Exact backend truncates the SVD (ties at the cut are resolved by the
/// backend's deterministic ordering and flagged); BlockKrylov returns
/// Z (Z^T m) for the randomized basis Z. A caller-held RandomSource keeps
/// one Krylov stream across repeated calls; when absent a fresh stream is
/// seeded from backend.seed.
Matrix hard_threshold_rank(const Matrix& m, Index r, const SvdBackend& backend,
                           SvdFlags* flags = nullptr,
                           RandomSource* krylov_rng = nullptr);

/// Row/column sparsification: keeps entry (i,j) iff |m_ij| ranks within the
/// top k_row = budget(cols) magnitudes of its row AND the top
/// k_col = budget(rows) of its column; everything else becomes exactly
/// zero. Ties in magnitude are broken toward the lower row-major linear
/// index, making the operator deterministic. This targets a subset of the
/// row/column-sparse set, not the Euclidean projection onto it.
Matrix sparsify_alpha(const Matrix& m, SparsityLevel level);

}  // namespace feasproj
