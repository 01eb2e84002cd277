#include "feasproj/projections.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <vector>

namespace feasproj {

namespace {

Matrix thin_q(const Matrix& x) {
  Eigen::HouseholderQR<Matrix> qr(x);
  return qr.householderQ() * Matrix::Identity(x.rows(), x.cols());
}

Eigen::BDCSVD<Matrix> thin_svd(const Matrix& m, const char* where) {
  Eigen::BDCSVD<Matrix> svd(m, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.info() != Eigen::Success) {
    throw NumericError(std::string(where) + ": SVD did not converge");
  }
  return svd;
}

void require_rank_in_range(const Matrix& m, Index r, const char* where) {
  const Index cap = std::min(m.rows(), m.cols());
  if (r < 1 || r > cap) {
    throw ConfigError(std::string(where) + ": rank " + std::to_string(r) +
                      " outside [1, " + std::to_string(cap) + "] for " +
                      shape_string(m.rows(), m.cols()));
  }
}

}  // namespace

SparsityLevel::SparsityLevel(double alpha) : alpha_(alpha) {
  if (!(alpha > 0.0) || !(alpha <= 1.0)) {
    throw ConfigError("SparsityLevel: alpha must lie in (0,1], got " +
                      std::to_string(alpha));
  }
}

Index SparsityLevel::budget(Index length) const {
  if (length < 1) throw ConfigError("SparsityLevel: length must be positive");
  const Index k = Index(std::floor(alpha_ * double(length)));
  return std::max<Index>(1, k);
}

std::pair<Matrix, Matrix> project_linear(const Matrix& l0, const Matrix& s0,
                                         const Matrix& a) {
  require_same_shape(l0, s0, "project_linear");
  require_same_shape(l0, a, "project_linear");
  require_finite(l0, "project_linear");
  require_finite(s0, "project_linear");
  require_finite(a, "project_linear");

  Matrix gap = 0.5 * (a - l0 - s0);
  Matrix l = l0 + gap;
  Matrix s = a - l;
  return {std::move(l), std::move(s)};
}

std::pair<Matrix, Matrix> project_linear_masked(const Matrix& l0, const Matrix& s0,
                                                const Matrix& a,
                                                const ObservationMask& mask) {
  require_same_shape(l0, s0, "project_linear_masked");
  require_same_shape(l0, a, "project_linear_masked");
  if (mask.rows() != a.rows() || mask.cols() != a.cols()) {
    throw DimensionError("project_linear_masked: mask " +
                         shape_string(mask.rows(), mask.cols()) +
                         " does not match matrix " +
                         shape_string(a.rows(), a.cols()));
  }
  if (mask.is_full()) return project_linear(l0, s0, a);

  require_finite(l0, "project_linear_masked");
  require_finite(s0, "project_linear_masked");
  require_finite(a, "project_linear_masked");

  Matrix l = Matrix::Zero(a.rows(), a.cols());
  Matrix s = Matrix::Zero(a.rows(), a.cols());
  const Index cols = a.cols();
  for (std::uint64_t idx : mask.linear_indices()) {
    const Index i = Index(idx / std::uint64_t(cols));
    const Index j = Index(idx % std::uint64_t(cols));
    const double gap = 0.5 * (a(i, j) - l0(i, j) - s0(i, j));
    l(i, j) = l0(i, j) + gap;
    s(i, j) = a(i, j) - l(i, j);
  }
  return {std::move(l), std::move(s)};
}

KrylovBasis block_krylov_svd(const Matrix& l, Index r, double epsilon,
                             RandomSource& rng) {
  require_rank_in_range(l, r, "block_krylov_svd");
  if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
    throw ConfigError("block_krylov_svd: epsilon must lie in (0,1), got " +
                      std::to_string(epsilon));
  }
  require_finite(l, "block_krylov_svd");

  const Index m = l.rows();
  const Index n = l.cols();

  if (l.norm() == 0.0) {
    KrylovBasis out;
    out.basis = Matrix::Identity(m, r);
    out.degenerate_input = true;
    return out;
  }

  const Index q = std::clamp<Index>(
      Index(std::ceil(std::log(double(n)) / std::sqrt(epsilon))), 2, 64);
  const Index krylov_cols = (q + 1) * r;

  if (krylov_cols >= std::min(m, n)) {
    // the subspace construction degenerates; use the exact factorization
    auto svd = thin_svd(l, "block_krylov_svd");
    KrylovBasis out;
    out.basis = svd.matrixU().leftCols(r);
    out.used_exact_fallback = true;
    return out;
  }

  Matrix block = thin_q(l * gaussian_matrix(n, r, rng));
  Matrix krylov(m, krylov_cols);
  krylov.leftCols(r) = block;
  for (Index j = 1; j <= q; ++j) {
    block = thin_q(l * (l.transpose() * block));
    krylov.middleCols(j * r, r) = block;
  }

  Matrix q_basis = thin_q(krylov);
  Matrix w = q_basis.transpose() * l;
  Matrix gram = w * w.transpose();

  Eigen::SelfAdjointEigenSolver<Matrix> eig(gram);
  if (eig.info() != Eigen::Success) {
    throw NumericError("block_krylov_svd: eigendecomposition failed");
  }
  // eigenvalues come back ascending; take the top r, largest first
  Matrix top(krylov_cols, r);
  for (Index t = 0; t < r; ++t) {
    top.col(t) = eig.eigenvectors().col(krylov_cols - 1 - t);
  }

  KrylovBasis out;
  out.basis = q_basis * top;
  return out;
}

Matrix hard_threshold_rank(const Matrix& m, Index r, const SvdBackend& backend,
                           SvdFlags* flags, RandomSource* krylov_rng) {
  require_rank_in_range(m, r, "hard_threshold_rank");
  require_finite(m, "hard_threshold_rank");

  if (backend.kind == SvdBackend::Kind::BlockKrylov) {
    KrylovBasis kb;
    if (krylov_rng != nullptr) {
      kb = block_krylov_svd(m, r, backend.epsilon, *krylov_rng);
    } else {
      RandomSource fresh(backend.seed);
      kb = block_krylov_svd(m, r, backend.epsilon, fresh);
    }
    if (flags != nullptr) {
      flags->krylov_fallback |= kb.used_exact_fallback;
      flags->degenerate_input |= kb.degenerate_input;
    }
    return kb.basis * (kb.basis.transpose() * m);
  }

  auto svd = thin_svd(m, "hard_threshold_rank");
  const auto& sigma = svd.singularValues();
  if (flags != nullptr && r < sigma.size()) {
    const double gap = sigma(r - 1) - sigma(r);
    if (gap <= 1e-12 * sigma(0)) flags->rank_ambiguous = true;
  }
  return svd.matrixU().leftCols(r) * sigma.head(r).asDiagonal() *
         svd.matrixV().leftCols(r).transpose();
}

Matrix sparsify_alpha(const Matrix& m, SparsityLevel level) {
  require_finite(m, "sparsify_alpha");
  const Index rows = m.rows();
  const Index cols = m.cols();
  const Index k_row = std::min(level.budget(cols), cols);
  const Index k_col = std::min(level.budget(rows), rows);

  std::vector<std::uint8_t> row_keep(std::size_t(rows) * std::size_t(cols), 0);
  std::vector<std::uint8_t> col_keep(std::size_t(rows) * std::size_t(cols), 0);
  std::vector<Index> order;

  for (Index i = 0; i < rows; ++i) {
    order.resize(cols);
    for (Index j = 0; j < cols; ++j) order[j] = j;
    // magnitude descending, lower linear index (here: lower j) wins ties
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
      const double va = std::abs(m(i, a));
      const double vb = std::abs(m(i, b));
      if (va != vb) return va > vb;
      return a < b;
    });
    for (Index t = 0; t < k_row; ++t) {
      row_keep[std::size_t(i) * std::size_t(cols) + std::size_t(order[t])] = 1;
    }
  }

  for (Index j = 0; j < cols; ++j) {
    order.resize(rows);
    for (Index i = 0; i < rows; ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](Index a, Index b) {
      const double va = std::abs(m(a, j));
      const double vb = std::abs(m(b, j));
      if (va != vb) return va > vb;
      return a < b;
    });
    for (Index t = 0; t < k_col; ++t) {
      col_keep[std::size_t(order[t]) * std::size_t(cols) + std::size_t(j)] = 1;
    }
  }

  Matrix out = Matrix::Zero(rows, cols);
  for (Index i = 0; i < rows; ++i) {
    for (Index j = 0; j < cols; ++j) {
      const std::size_t flat = std::size_t(i) * std::size_t(cols) + std::size_t(j);
      if (row_keep[flat] && col_keep[flat]) out(i, j) = m(i, j);
    }
  }
  return out;
}

}  // namespace feasproj
