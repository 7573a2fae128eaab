#include "gpmr/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace gpmr {

SparseMatrix::SparseMatrix(std::size_t nrows, std::size_t ncols,
                           std::vector<std::size_t> row_offsets,
                           std::vector<std::size_t> col_indices,
                           std::vector<double> values)
    : nrows_(nrows),
      ncols_(ncols),
      row_offsets_(std::move(row_offsets)),
      col_indices_(std::move(col_indices)),
      values_(std::move(values)) {
  if (row_offsets_.size() != nrows_ + 1)
    throw DimensionError("CSR: row_offsets must have nrows+1 entries");
  if (row_offsets_.front() != 0 || row_offsets_.back() != values_.size())
    throw DimensionError("CSR: row_offsets must span [0, nnz]");
  if (col_indices_.size() != values_.size())
    throw DimensionError("CSR: col_indices and values differ in length");
  for (std::size_t i = 0; i < nrows_; ++i) {
    if (row_offsets_[i] > row_offsets_[i + 1])
      throw DimensionError("CSR: row_offsets must be nondecreasing");
    for (std::size_t p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
      if (col_indices_[p] >= ncols_)
        throw DimensionError("CSR: column index out of range in row " +
                                    std::to_string(i));
      if (p > row_offsets_[i] && col_indices_[p - 1] >= col_indices_[p])
        throw DimensionError(
            "CSR: column indices not strictly increasing in row " +
            std::to_string(i));
    }
  }
}

SparseMatrix SparseMatrix::from_triplets(std::size_t nrows, std::size_t ncols,
                                         std::span<const Triplet> entries) {
  std::vector<std::size_t> count(nrows + 1, 0);
  for (const auto& t : entries) {
    if (t.row >= nrows || t.col >= ncols)
      throw DimensionError("triplet (" + std::to_string(t.row) + ", " +
                           std::to_string(t.col) + ") outside " +
                           std::to_string(nrows) + "x" + std::to_string(ncols));
    ++count[t.row + 1];
  }
  std::partial_sum(count.begin(), count.end(), count.begin());

  // Bucket by row, then sort each row by column and merge duplicates.
  std::vector<std::size_t> cols(entries.size());
  std::vector<double> vals(entries.size());
  std::vector<std::size_t> next(count.begin(), count.end() - 1);
  for (const auto& t : entries) {
    const std::size_t p = next[t.row]++;
    cols[p] = t.col;
    vals[p] = t.value;
  }

  std::vector<std::size_t> offsets(nrows + 1, 0);
  std::vector<std::size_t> out_cols;
  std::vector<double> out_vals;
  out_cols.reserve(entries.size());
  out_vals.reserve(entries.size());
  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < nrows; ++i) {
    const std::size_t begin = count[i];
    const std::size_t end = count[i + 1];
    order.resize(end - begin);
    std::iota(order.begin(), order.end(), begin);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return cols[a] < cols[b]; });
    for (std::size_t p : order) {
      if (out_cols.size() > offsets[i] && out_cols.back() == cols[p]) {
        out_vals.back() += vals[p];
      } else {
        out_cols.push_back(cols[p]);
        out_vals.push_back(vals[p]);
      }
    }
    offsets[i + 1] = out_cols.size();
  }
  return SparseMatrix(nrows, ncols, std::move(offsets), std::move(out_cols),
                      std::move(out_vals));
}

SparseMatrix SparseMatrix::identity(std::size_t n, double diagonal) {
  std::vector<std::size_t> offsets(n + 1);
  std::iota(offsets.begin(), offsets.end(), std::size_t{0});
  std::vector<std::size_t> cols(n);
  std::iota(cols.begin(), cols.end(), std::size_t{0});
  return SparseMatrix(n, n, std::move(offsets), std::move(cols),
                      std::vector<double>(n, diagonal));
}

SparseMatrix SparseMatrix::zeros(std::size_t nrows, std::size_t ncols) {
  return SparseMatrix(nrows, ncols, std::vector<std::size_t>(nrows + 1, 0), {}, {});
}

SparseMatrix SparseMatrix::from_dense(std::size_t nrows, std::size_t ncols,
                                      std::span<const double> row_major) {
  if (row_major.size() != nrows * ncols)
    throw DimensionError("from_dense: expected " + std::to_string(nrows * ncols) +
                         " values");
  std::vector<std::size_t> offsets(nrows + 1, 0);
  std::vector<std::size_t> cols;
  std::vector<double> vals;
  for (std::size_t i = 0; i < nrows; ++i) {
    for (std::size_t j = 0; j < ncols; ++j) {
      const double v = row_major[i * ncols + j];
      if (v != 0.0) {
        cols.push_back(j);
        vals.push_back(v);
      }
    }
    offsets[i + 1] = cols.size();
  }
  return SparseMatrix(nrows, ncols, std::move(offsets), std::move(cols),
                      std::move(vals));
}

std::size_t SparseMatrix::numeric_nnz() const {
  return static_cast<std::size_t>(
      std::count_if(values_.begin(), values_.end(), [](double v) { return v != 0.0; }));
}

double SparseMatrix::at(std::size_t i, std::size_t j) const {
  const auto cols = row_cols(i);
  const auto it = std::lower_bound(cols.begin(), cols.end(), j);
  if (it == cols.end() || *it != j) return 0.0;
  return values_[row_offsets_[i] + static_cast<std::size_t>(it - cols.begin())];
}

SparseMatrix SparseMatrix::transpose() const {
  std::vector<std::size_t> offsets(ncols_ + 1, 0);
  for (std::size_t c : col_indices_) ++offsets[c + 1];
  std::partial_sum(offsets.begin(), offsets.end(), offsets.begin());
  std::vector<std::size_t> next(offsets.begin(), offsets.end() - 1);
  std::vector<std::size_t> cols(nnz());
  std::vector<double> vals(nnz());
  // Rows are visited in order, so each transposed row comes out sorted.
  for (std::size_t i = 0; i < nrows_; ++i) {
    for (std::size_t p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p) {
      const std::size_t q = next[col_indices_[p]]++;
      cols[q] = i;
      vals[q] = values_[p];
    }
  }
  return SparseMatrix(ncols_, nrows_, std::move(offsets), std::move(cols),
                      std::move(vals));
}

std::vector<Triplet> SparseMatrix::to_triplets() const {
  std::vector<Triplet> out;
  out.reserve(nnz());
  for (std::size_t i = 0; i < nrows_; ++i)
    for (std::size_t p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p)
      out.push_back({i, col_indices_[p], values_[p]});
  return out;
}

std::vector<double> SparseMatrix::to_dense() const {
  std::vector<double> d(nrows_ * ncols_, 0.0);
  for (std::size_t i = 0; i < nrows_; ++i)
    for (std::size_t p = row_offsets_[i]; p < row_offsets_[i + 1]; ++p)
      d[i * ncols_ + col_indices_[p]] = values_[p];
  return d;
}

double SparseMatrix::frobenius_norm() const { return norm2(values_); }

void spmv(const SparseMatrix& m, std::span<const double> x, std::span<double> y) {
  if (x.size() != m.ncols() || y.size() != m.nrows())
    throw DimensionError("spmv: " + std::to_string(m.nrows()) + "x" +
                         std::to_string(m.ncols()) + " matrix applied to vector of length " +
                         std::to_string(x.size()));
  const auto offsets = m.row_offsets();
  const auto cols = m.col_indices();
  const auto vals = m.values();
  for (std::size_t i = 0; i < m.nrows(); ++i) {
    double s = 0.0;
    for (std::size_t p = offsets[i]; p < offsets[i + 1]; ++p) s += vals[p] * x[cols[p]];
    y[i] = s;
  }
}

Vector spmv(const SparseMatrix& m, std::span<const double> x) {
  Vector y(m.nrows());
  spmv(m, x, y);
  return y;
}

void spmv_transpose(const SparseMatrix& m, std::span<const double> x,
                    std::span<double> y) {
  if (x.size() != m.nrows() || y.size() != m.ncols())
    throw DimensionError("spmv_transpose: transpose of " + std::to_string(m.nrows()) +
                         "x" + std::to_string(m.ncols()) +
                         " matrix applied to vector of length " + std::to_string(x.size()));
  std::fill(y.begin(), y.end(), 0.0);
  const auto offsets = m.row_offsets();
  const auto cols = m.col_indices();
  const auto vals = m.values();
  for (std::size_t i = 0; i < m.nrows(); ++i) {
    const double xi = x[i];
    for (std::size_t p = offsets[i]; p < offsets[i + 1]; ++p) y[cols[p]] += vals[p] * xi;
  }
}

Vector spmv_transpose(const SparseMatrix& m, std::span<const double> x) {
  Vector y(m.ncols());
  spmv_transpose(m, x, y);
  return y;
}

}  // namespace gpmr
