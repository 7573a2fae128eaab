#include "gpmr/sparse_lu.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gpmr {

LUFactors sparse_lu(const SparseMatrix& m) {
  const std::size_t n = m.nrows();
  if (m.ncols() != n)
    throw DimensionError("sparse_lu: matrix is " + std::to_string(m.nrows()) + "x" +
                         std::to_string(m.ncols()) + ", expected square");

  constexpr std::size_t kUnpivoted = std::numeric_limits<std::size_t>::max();
  const SparseMatrix cols = m.transpose();  // row j of `cols` is column j of m

  // L columns are kept with original row indices until the permutation is
  // complete; U columns are indexed by pivot step.
  std::vector<std::vector<std::size_t>> l_rows(n);
  std::vector<std::vector<double>> l_vals(n);
  std::vector<Triplet> u_entries;
  std::vector<std::size_t> perm(n, kUnpivoted);
  std::vector<std::size_t> step_of_row(n, kUnpivoted);

  std::vector<double> work(n, 0.0);
  std::vector<char> touched(n, 0);
  std::vector<std::size_t> pattern;

  for (std::size_t j = 0; j < n; ++j) {
    pattern.clear();
    double col_max = 0.0;
    const auto rows = cols.row_cols(j);
    const auto vals = cols.row_values(j);
    for (std::size_t p = 0; p < rows.size(); ++p) {
      work[rows[p]] = vals[p];
      col_max = std::max(col_max, std::abs(vals[p]));
      if (!touched[rows[p]]) {
        touched[rows[p]] = 1;
        pattern.push_back(rows[p]);
      }
    }

    // Eliminate with every earlier pivot whose entry in this column is
    // nonzero. Steps are visited in order, which is a valid topological order
    // for the left-looking triangular solve.
    for (std::size_t k = 0; k < j; ++k) {
      const double ukj = work[perm[k]];
      if (ukj == 0.0) continue;
      const auto& lr = l_rows[k];
      const auto& lv = l_vals[k];
      for (std::size_t p = 0; p < lr.size(); ++p) {
        work[lr[p]] -= lv[p] * ukj;
        if (!touched[lr[p]]) {
          touched[lr[p]] = 1;
          pattern.push_back(lr[p]);
        }
      }
    }

    std::size_t pivot_row = kUnpivoted;
    double pivot_abs = -1.0;
    for (std::size_t r : pattern) {
      if (step_of_row[r] != kUnpivoted) continue;
      const double a = std::abs(work[r]);
      if (a > pivot_abs || (a == pivot_abs && r < pivot_row)) {
        pivot_abs = a;
        pivot_row = r;
      }
    }
    if (pivot_row == kUnpivoted || pivot_abs == 0.0 ||
        pivot_abs <= kPivotDropTolerance * col_max) {
      throw SingularMatrixError(j, "sparse_lu: no acceptable pivot in column " +
                                       std::to_string(j));
    }

    perm[j] = pivot_row;
    step_of_row[pivot_row] = j;
    const double pivot = work[pivot_row];
    for (std::size_t r : pattern) {
      const double v = work[r];
      const std::size_t s = step_of_row[r];
      if (s != kUnpivoted && s <= j) {
        if (v != 0.0 || s == j) u_entries.push_back({s, j, v});
      } else if (v != 0.0) {
        l_rows[j].push_back(r);
        l_vals[j].push_back(v / pivot);
      }
    }
    for (std::size_t r : pattern) {
      work[r] = 0.0;
      touched[r] = 0;
    }
  }

  std::vector<Triplet> l_entries;
  for (std::size_t k = 0; k < n; ++k) {
    l_entries.push_back({k, k, 1.0});
    for (std::size_t p = 0; p < l_rows[k].size(); ++p)
      l_entries.push_back({step_of_row[l_rows[k][p]], k, l_vals[k][p]});
  }

  return LUFactors{std::move(perm), SparseMatrix::from_triplets(n, n, l_entries),
                   SparseMatrix::from_triplets(n, n, u_entries)};
}

void lu_solve(const LUFactors& f, std::span<const double> rhs, std::span<double> x) {
  const std::size_t n = f.order();
  if (rhs.size() != n || x.size() != n)
    throw DimensionError("lu_solve: factors of order " + std::to_string(n) +
                         " applied to vector of length " + std::to_string(rhs.size()));

  std::vector<double> w(n);
  for (std::size_t k = 0; k < n; ++k) w[k] = rhs[f.perm_rows[k]];

  // L has a stored unit diagonal as the last entry of each row.
  for (std::size_t i = 0; i < n; ++i) {
    const auto cols = f.L.row_cols(i);
    const auto vals = f.L.row_values(i);
    double s = w[i];
    for (std::size_t p = 0; p < cols.size(); ++p)
      if (cols[p] < i) s -= vals[p] * w[cols[p]];
    w[i] = s;
  }
  for (std::size_t ii = n; ii-- > 0;) {
    const auto cols = f.U.row_cols(ii);
    const auto vals = f.U.row_values(ii);
    double s = w[ii];
    double diag = 0.0;
    for (std::size_t p = 0; p < cols.size(); ++p) {
      if (cols[p] > ii)
        s -= vals[p] * w[cols[p]];
      else if (cols[p] == ii)
        diag = vals[p];
    }
    w[ii] = s / diag;
  }
  std::copy(w.begin(), w.end(), x.begin());
}

Vector lu_solve(const LUFactors& f, std::span<const double> rhs) {
  Vector x(f.order());
  lu_solve(f, rhs, x);
  return x;
}

}  // namespace gpmr
