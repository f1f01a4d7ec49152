#include <mgcn/sparse.hpp>

#include <algorithm>
#include <numeric>
#include <string>

namespace mgcn {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw InvalidArgument("SparseMatrix: " + what);
}

}  // namespace

SparseMatrix::SparseMatrix(Index rows, Index cols, std::vector<Index> row_offsets,
                           std::vector<Index> col_indices, std::vector<double> values)
    : rows_(rows),
      cols_(cols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
  require(rows_ >= 0 && cols_ >= 0, "negative dimension");
  require(static_cast<Index>(row_offsets_.size()) == rows_ + 1, "row_offsets must have rows+1 entries");
  require(row_offsets_.front() == 0, "row_offsets must start at 0");
  require(col_indices_.size() == values_.size(), "col_indices/values length mismatch");
  require(row_offsets_.back() == static_cast<Index>(values_.size()),
          "last row offset must equal the number of stored values");
  for (Index r = 0; r < rows_; ++r) {
    require(row_offsets_[r] <= row_offsets_[r + 1], "row_offsets must be non-decreasing");
    for (Index k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      require(col_indices_[k] >= 0 && col_indices_[k] < cols_, "column index out of range");
      require(k == row_offsets_[r] || col_indices_[k - 1] < col_indices_[k],
              "column indices must be strictly increasing within a row");
      require(values_[k] != 0.0, "explicit zero stored");
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(Index rows, Index cols, std::span<const Triplet> triplets,
                                         DuplicatePolicy policy) {
  std::vector<Triplet> sorted(triplets.begin(), triplets.end());
  for (const auto& t : sorted) {
    require(t.row >= 0 && t.row < rows && t.col >= 0 && t.col < cols, "triplet index out of range");
  }
  std::stable_sort(sorted.begin(), sorted.end(), [](const Triplet& a, const Triplet& b) {
    return a.row != b.row ? a.row < b.row : a.col < b.col;
  });

  std::vector<Index> offsets(static_cast<std::size_t>(rows) + 1, 0);
  std::vector<Index> cols_out;
  std::vector<double> vals_out;
  cols_out.reserve(sorted.size());
  vals_out.reserve(sorted.size());

  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    double merged = sorted[i].value;
    for (++j; j < sorted.size() && sorted[j].row == sorted[i].row && sorted[j].col == sorted[i].col; ++j) {
      merged = policy == DuplicatePolicy::sum ? merged + sorted[j].value : std::max(merged, sorted[j].value);
    }
    if (merged != 0.0) {
      cols_out.push_back(sorted[i].col);
      vals_out.push_back(merged);
      ++offsets[sorted[i].row + 1];
    }
    i = j;
  }
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  return SparseMatrix(rows, cols, std::move(offsets), std::move(cols_out), std::move(vals_out));
}

SparseMatrix SparseMatrix::from_dense(const Matrix& dense) {
  std::vector<Index> offsets(static_cast<std::size_t>(dense.rows()) + 1, 0);
  std::vector<Index> cols_out;
  std::vector<double> vals_out;
  for (Index r = 0; r < dense.rows(); ++r) {
    for (Index c = 0; c < dense.cols(); ++c) {
      if (dense(r, c) != 0.0) {
        cols_out.push_back(c);
        vals_out.push_back(dense(r, c));
      }
    }
    offsets[r + 1] = static_cast<Index>(vals_out.size());
  }
  return SparseMatrix(dense.rows(), dense.cols(), std::move(offsets), std::move(cols_out), std::move(vals_out));
}

SparseMatrix SparseMatrix::identity(Index n) {
  std::vector<Index> offsets(static_cast<std::size_t>(n) + 1);
  std::iota(offsets.begin(), offsets.end(), Index{0});
  std::vector<Index> cols_out(static_cast<std::size_t>(n));
  std::iota(cols_out.begin(), cols_out.end(), Index{0});
  return SparseMatrix(n, n, std::move(offsets), std::move(cols_out), std::vector<double>(n, 1.0));
}

double SparseMatrix::coeff(Index r, Index c) const {
  require(r >= 0 && r < rows_ && c >= 0 && c < cols_, "coeff index out of range");
  const auto cols = row_cols(r);
  const auto it = std::lower_bound(cols.begin(), cols.end(), c);
  if (it == cols.end() || *it != c) return 0.0;
  return values_[row_offsets_[r] + (it - cols.begin())];
}

Vector SparseMatrix::diagonal() const {
  Vector d = Vector::Zero(std::min(rows_, cols_));
  for (Index r = 0; r < d.size(); ++r) d[r] = coeff(r, r);
  return d;
}

Matrix SparseMatrix::to_dense() const {
  Matrix out = Matrix::Zero(rows_, cols_);
  for (Index r = 0; r < rows_; ++r) {
    for (Index k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) out(r, col_indices_[k]) = values_[k];
  }
  return out;
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<Index> offsets(static_cast<std::size_t>(cols_) + 1, 0);
  for (Index c : col_indices_) ++offsets[c + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<Index> cursor(offsets.begin(), offsets.end() - 1);
  std::vector<Index> cols_out(values_.size());
  std::vector<double> vals_out(values_.size());
  for (Index r = 0; r < rows_; ++r) {
    for (Index k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      const Index dst = cursor[col_indices_[k]]++;
      cols_out[dst] = r;
      vals_out[dst] = values_[k];
    }
  }
  return SparseMatrix(cols_, rows_, std::move(offsets), std::move(cols_out), std::move(vals_out));
}

bool SparseMatrix::is_symmetric() const {
  if (rows_ != cols_) return false;
  return transpose() == *this;
}

SparseMatrix SparseMatrix::block(Index row0, Index n_rows, Index col0, Index n_cols) const {
  require(row0 >= 0 && n_rows >= 0 && row0 + n_rows <= rows_, "block rows out of range");
  require(col0 >= 0 && n_cols >= 0 && col0 + n_cols <= cols_, "block cols out of range");
  std::vector<Index> offsets(static_cast<std::size_t>(n_rows) + 1, 0);
  std::vector<Index> cols_out;
  std::vector<double> vals_out;
  for (Index r = 0; r < n_rows; ++r) {
    const Index src = row0 + r;
    for (Index k = row_offsets_[src]; k < row_offsets_[src + 1]; ++k) {
      const Index c = col_indices_[k];
      if (c >= col0 && c < col0 + n_cols) {
        cols_out.push_back(c - col0);
        vals_out.push_back(values_[k]);
      }
    }
    offsets[r + 1] = static_cast<Index>(vals_out.size());
  }
  return SparseMatrix(n_rows, n_cols, std::move(offsets), std::move(cols_out), std::move(vals_out));
}

SparseMatrix SparseMatrix::permuted(std::span<const Index> new_of_old) const {
  require(rows_ == cols_, "permuted requires a square matrix");
  require(static_cast<Index>(new_of_old.size()) == rows_, "permutation length mismatch");
  std::vector<Triplet> triplets;
  triplets.reserve(values_.size());
  for (Index r = 0; r < rows_; ++r) {
    for (Index k = row_offsets_[r]; k < row_offsets_[r + 1]; ++k) {
      triplets.push_back({new_of_old[r], new_of_old[col_indices_[k]], values_[k]});
    }
  }
  return from_triplets(rows_, cols_, triplets);
}

SparseMatrix SparseMatrix::with_values(std::vector<double> values) const {
  return SparseMatrix(rows_, cols_, row_offsets_, col_indices_, std::move(values));
}

Matrix spmm(const SparseMatrix& s, const Matrix& m) {
  if (s.cols() != m.rows()) throw InvalidArgument("spmm: inner dimensions disagree");
  Matrix out = Matrix::Zero(s.rows(), m.cols());
  for (Index r = 0; r < s.rows(); ++r) {
    const auto cols = s.row_cols(r);
    const auto vals = s.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) out.row(r).noalias() += vals[k] * m.row(cols[k]);
  }
  return out;
}

Matrix spmm_transposed(const SparseMatrix& s, const Matrix& m) {
  if (s.rows() != m.rows()) throw InvalidArgument("spmm_transposed: inner dimensions disagree");
  Matrix out = Matrix::Zero(s.cols(), m.cols());
  for (Index r = 0; r < s.rows(); ++r) {
    const auto cols = s.row_cols(r);
    const auto vals = s.row_values(r);
    for (std::size_t k = 0; k < cols.size(); ++k) out.row(cols[k]).noalias() += vals[k] * m.row(r);
  }
  return out;
}

Vector spmv(const SparseMatrix& s, const Vector& v) {
  if (s.cols() != v.size()) throw InvalidArgument("spmv: dimension mismatch");
  Vector out(s.rows());
  for (Index r = 0; r < s.rows(); ++r) {
    const auto cols = s.row_cols(r);
    const auto vals = s.row_values(r);
    double acc = 0.0;
    for (std::size_t k = 0; k < cols.size(); ++k) acc += vals[k] * v[cols[k]];
    out[r] = acc;
  }
  return out;
}

}  // namespace mgcn
