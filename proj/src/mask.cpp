#include "feasproj/mask.hpp"

#include <algorithm>
#include <numeric>

namespace feasproj {

ObservationMask::ObservationMask(Index rows, Index cols,
                                 const std::vector<std::pair<Index, Index>>& observed)
    : rows_(rows), cols_(cols) {
  if (rows < 1 || cols < 1) {
    throw ConfigError("ObservationMask: dimensions must be positive, got " +
                      shape_string(rows, cols));
  }
  linear_.reserve(observed.size());
  for (const auto& [i, j] : observed) {
    if (i < 0 || i >= rows || j < 0 || j >= cols) {
      throw ConfigError("ObservationMask: index (" + std::to_string(i) + "," +
                        std::to_string(j) + ") out of bounds for " +
                        shape_string(rows, cols));
    }
    linear_.push_back(std::uint64_t(i) * std::uint64_t(cols) + std::uint64_t(j));
  }
  std::sort(linear_.begin(), linear_.end());
  if (std::adjacent_find(linear_.begin(), linear_.end()) != linear_.end()) {
    throw ConfigError("ObservationMask: duplicate index pair");
  }
}

ObservationMask ObservationMask::full(Index rows, Index cols) {
  if (rows < 1 || cols < 1) {
    throw ConfigError("ObservationMask: dimensions must be positive");
  }
  ObservationMask mask(rows, cols);
  mask.linear_.resize(std::size_t(rows) * std::size_t(cols));
  std::iota(mask.linear_.begin(), mask.linear_.end(), std::uint64_t(0));
  return mask;
}

ObservationMask ObservationMask::empty(Index rows, Index cols) {
  if (rows < 1 || cols < 1) {
    throw ConfigError("ObservationMask: dimensions must be positive");
  }
  return ObservationMask(rows, cols);
}

ObservationMask ObservationMask::from_linear(Index rows, Index cols,
                                             std::vector<std::uint64_t> sorted_unique) {
  ObservationMask mask(rows, cols);
  if (rows < 1 || cols < 1) {
    throw ConfigError("ObservationMask: dimensions must be positive");
  }
  if (!sorted_unique.empty() &&
      sorted_unique.back() >= std::uint64_t(rows) * std::uint64_t(cols)) {
    throw ConfigError("ObservationMask: linear index out of bounds");
  }
  mask.linear_ = std::move(sorted_unique);
  return mask;
}

ObservationMask::ObservationMask(const ObservationMask& other)
    : rows_(other.rows_), cols_(other.cols_), linear_(other.linear_) {}

ObservationMask& ObservationMask::operator=(const ObservationMask& other) {
  if (this != &other) {
    rows_ = other.rows_;
    cols_ = other.cols_;
    linear_ = other.linear_;
    view_once_ = std::make_unique<std::once_flag>();
    view_.clear();
  }
  return *this;
}

const std::vector<std::uint8_t>& ObservationMask::dense_view() const {
  std::call_once(*view_once_, [this] {
    view_.assign(std::size_t(rows_) * std::size_t(cols_), 0);
    for (std::uint64_t idx : linear_) view_[idx] = 1;
  });
  return view_;
}

bool ObservationMask::contains(Index i, Index j) const {
  if (i < 0 || i >= rows_ || j < 0 || j >= cols_) return false;
  return dense_view()[std::size_t(i) * std::size_t(cols_) + std::size_t(j)] != 0;
}

std::vector<std::pair<Index, Index>> ObservationMask::index_pairs() const {
  std::vector<std::pair<Index, Index>> pairs;
  pairs.reserve(linear_.size());
  for (std::uint64_t idx : linear_) {
    pairs.emplace_back(Index(idx / std::uint64_t(cols_)), Index(idx % std::uint64_t(cols_)));
  }
  return pairs;
}

void ObservationMask::require_matching(const Matrix& m, const char* where) const {
  if (m.rows() != rows_ || m.cols() != cols_) {
    throw DimensionError(std::string(where) + ": mask " + shape_string(rows_, cols_) +
                         " does not match matrix " + shape_string(m.rows(), m.cols()));
  }
}

Matrix restrict(const Matrix& m, const ObservationMask& mask) {
  mask.require_matching(m, "restrict");
  require_finite(m, "restrict");
  Matrix out = Matrix::Zero(m.rows(), m.cols());
  const Index cols = mask.cols_;
  for (std::uint64_t idx : mask.linear_) {
    const Index i = Index(idx / std::uint64_t(cols));
    const Index j = Index(idx % std::uint64_t(cols));
    out(i, j) = m(i, j);
  }
  return out;
}

Matrix complement_restrict(const Matrix& m, const ObservationMask& mask) {
  mask.require_matching(m, "complement_restrict");
  require_finite(m, "complement_restrict");
  Matrix out = m;
  const Index cols = mask.cols_;
  for (std::uint64_t idx : mask.linear_) {
    const Index i = Index(idx / std::uint64_t(cols));
    const Index j = Index(idx % std::uint64_t(cols));
    out(i, j) = 0.0;
  }
  return out;
}

}  // namespace feasproj
