#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <utility>
#include <vector>

#include "feasproj/matrix.hpp"

namespace feasproj {

/// Set of observed entries of an m x n matrix. Indices are 0-based and stored
/// as sorted unique row-major linear offsets; a dense boolean view for O(1)
/// membership tests is materialized lazily on first use. Immutable after
/// construction and safe to share across threads for reading.
class ObservationMask {
public:
  ObservationMask(Index rows, Index cols,
                  const std::vector<std::pair<Index, Index>>& observed);

  static ObservationMask full(Index rows, Index cols);
  static ObservationMask empty(Index rows, Index cols);

  /// Takes pre-validated sorted unique linear offsets (i * cols + j).
  static ObservationMask from_linear(Index rows, Index cols,
                                     std::vector<std::uint64_t> sorted_unique);

  ObservationMask(const ObservationMask& other);
  ObservationMask& operator=(const ObservationMask& other);
  ObservationMask(ObservationMask&&) noexcept = default;
  ObservationMask& operator=(ObservationMask&&) noexcept = default;

  Index rows() const { return rows_; }
  Index cols() const { return cols_; }
  std::size_t count() const { return linear_.size(); }
  bool is_empty() const { return linear_.empty(); }
  bool is_full() const {
    return linear_.size() == std::size_t(rows_) * std::size_t(cols_);
  }

  bool contains(Index i, Index j) const;

  const std::vector<std::uint64_t>& linear_indices() const { return linear_; }
  std::vector<std::pair<Index, Index>> index_pairs() const;

  bool operator==(const ObservationMask& other) const {
    return rows_ == other.rows_ && cols_ == other.cols_ && linear_ == other.linear_;
  }

private:
  ObservationMask(Index rows, Index cols) : rows_(rows), cols_(cols) {}
  void require_matching(const Matrix& m, const char* where) const;
  const std::vector<std::uint8_t>& dense_view() const;

  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<std::uint64_t> linear_;

  mutable std::unique_ptr<std::once_flag> view_once_ = std::make_unique<std::once_flag>();
  mutable std::vector<std::uint8_t> view_;

  friend Matrix restrict(const Matrix&, const ObservationMask&);
  friend Matrix complement_restrict(const Matrix&, const ObservationMask&);
};

/// Keeps m's value on observed entries and writes exact zeros elsewhere.
Matrix restrict(const Matrix& m, const ObservationMask& mask);

/// Keeps m's value on unobserved entries, zero on observed ones, so that
/// restrict(m, mask) + complement_restrict(m, mask) == m bit-exactly.
Matrix complement_restrict(const Matrix& m, const ObservationMask& mask);

}  // namespace feasproj
