#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gpmr/vector_ops.hpp"

namespace gpmr {

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct Triplet {
  std::size_t row;
  std::size_t col;
  double value;
};

/// Compressed sparse row matrix.
///
/// Column indices are strictly increasing within each row. Explicitly stored
/// zeros are allowed; `nnz()` counts stored entries and `numeric_nnz()` the
/// nonzero ones.
class SparseMatrix {
 public:
  SparseMatrix() = default;

  /// Takes ownership of CSR arrays; throws std::invalid_argument if they
  /// violate the CSR invariants.
  SparseMatrix(std::size_t nrows, std::size_t ncols,
               std::vector<std::size_t> row_offsets,
               std::vector<std::size_t> col_indices,
               std::vector<double> values);

  /// Builds from coordinates in any order; duplicate coordinates are summed.
  static SparseMatrix from_triplets(std::size_t nrows, std::size_t ncols,
                                    std::span<const Triplet> entries);
  static SparseMatrix identity(std::size_t n, double diagonal = 1.0);
  static SparseMatrix zeros(std::size_t nrows, std::size_t ncols);
  /// Row-major dense input; zero entries are not stored.
  static SparseMatrix from_dense(std::size_t nrows, std::size_t ncols,
                                 std::span<const double> row_major);

  std::size_t nrows() const { return nrows_; }
  std::size_t ncols() const { return ncols_; }
  std::size_t nnz() const { return values_.size(); }
  std::size_t numeric_nnz() const;

  std::span<const std::size_t> row_offsets() const { return row_offsets_; }
  std::span<const std::size_t> col_indices() const { return col_indices_; }
  std::span<const double> values() const { return values_; }

  std::span<const std::size_t> row_cols(std::size_t i) const {
    return std::span<const std::size_t>(col_indices_).subspan(
        row_offsets_[i], row_offsets_[i + 1] - row_offsets_[i]);
  }
  std::span<const double> row_values(std::size_t i) const {
    return std::span<const double>(values_).subspan(
        row_offsets_[i], row_offsets_[i + 1] - row_offsets_[i]);
  }

  /// Stored value at (i, j), or 0 when the entry is not stored.
  double at(std::size_t i, std::size_t j) const;

  SparseMatrix transpose() const;
  std::vector<Triplet> to_triplets() const;
  std::vector<double> to_dense() const;  // row-major
  double frobenius_norm() const;

  friend bool operator==(const SparseMatrix&, const SparseMatrix&) = default;

 private:
  std::size_t nrows_ = 0;
  std::size_t ncols_ = 0;
  std::vector<std::size_t> row_offsets_{0};
  std::vector<std::size_t> col_indices_;
  std::vector<double> values_;
};

/// y = M x
void spmv(const SparseMatrix& m, std::span<const double> x, std::span<double> y);
Vector spmv(const SparseMatrix& m, std::span<const double> x);

/// y = M^T x
void spmv_transpose(const SparseMatrix& m, std::span<const double> x,
                    std::span<double> y);
Vector spmv_transpose(const SparseMatrix& m, std::span<const double> x);

}  // namespace gpmr
