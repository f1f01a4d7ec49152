#pragma once

#include <mgcn/types.hpp>

#include <span>
#include <vector>

namespace mgcn {

struct Triplet {
  Index row = 0;
  Index col = 0;
  double value = 0.0;
};

enum class DuplicatePolicy { sum, max };

/// Compressed sparse row matrix of doubles.
///
/// Invariants checked on construction: row_offsets has rows()+1 non-decreasing
/// entries ending at nnz(), column indices are strictly increasing within a
/// row and below cols(), and no stored value is zero.
class SparseMatrix {
 public:
  SparseMatrix() : row_offsets_(1, 0) {}
  SparseMatrix(Index rows, Index cols, std::vector<Index> row_offsets,
               std::vector<Index> col_indices, std::vector<double> values);

  /// Builds from unordered triplets. Duplicates are merged by `policy`;
  /// entries that end up exactly zero are dropped.
  static SparseMatrix from_triplets(Index rows, Index cols, std::span<const Triplet> triplets,
                                    DuplicatePolicy policy = DuplicatePolicy::sum);
  static SparseMatrix from_dense(const Matrix& dense);
  static SparseMatrix identity(Index n);

  Index rows() const noexcept { return rows_; }
  Index cols() const noexcept { return cols_; }
  Index nnz() const noexcept { return static_cast<Index>(values_.size()); }

  std::span<const Index> row_offsets() const noexcept { return row_offsets_; }
  std::span<const Index> col_indices() const noexcept { return col_indices_; }
  std::span<const double> values() const noexcept { return values_; }

  std::span<const Index> row_cols(Index r) const noexcept {
    return {col_indices_.data() + row_offsets_[r], col_indices_.data() + row_offsets_[r + 1]};
  }
  std::span<const double> row_values(Index r) const noexcept {
    return {values_.data() + row_offsets_[r], values_.data() + row_offsets_[r + 1]};
  }

  double coeff(Index r, Index c) const;
  Vector diagonal() const;
  Matrix to_dense() const;
  SparseMatrix transpose() const;
  bool is_symmetric() const;

  /// Rows [row0, row0+n_rows) and columns [col0, col0+n_cols).
  SparseMatrix block(Index row0, Index n_rows, Index col0, Index n_cols) const;

  /// Symmetric permutation P S P^T; entry (i, j) moves to
  /// (new_of_old[i], new_of_old[j]). Requires a square matrix.
  SparseMatrix permuted(std::span<const Index> new_of_old) const;

  /// Same sparsity pattern with values replaced. Zero values are not allowed.
  SparseMatrix with_values(std::vector<double> values) const;

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

 private:
  Index rows_ = 0;
  Index cols_ = 0;
  std::vector<Index> row_offsets_;
  std::vector<Index> col_indices_;
  std::vector<double> values_;
};

/// S * M. Each output row is accumulated in stored column order.
Matrix spmm(const SparseMatrix& s, const Matrix& m);

/// S^T * M without materialising the transpose.
Matrix spmm_transposed(const SparseMatrix& s, const Matrix& m);

Vector spmv(const SparseMatrix& s, const Vector& v);

}  // namespace mgcn
