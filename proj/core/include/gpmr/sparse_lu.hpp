#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "gpmr/sparse_matrix.hpp"

namespace gpmr {

class SingularMatrixError : public std::runtime_error {
 public:
  SingularMatrixError(std::size_t column, const std::string& what)
      : std::runtime_error(what), column_(column) {}

  /// Column at which no acceptable pivot was found.
  std::size_t column() const { return column_; }

 private:
  std::size_t column_;
};

/// P M = L U with unit lower triangular L (unit diagonal stored) and upper
/// triangular U. `perm_rows[k]` is the row of M moved to position k.
struct LUFactors {
  std::vector<std::size_t> perm_rows;
  SparseMatrix L;
  SparseMatrix U;

  std::size_t order() const { return perm_rows.size(); }
};

/// Relative pivot threshold: a column is singular when its largest candidate
/// pivot is at or below this multiple of the column's largest input entry.
inline constexpr double kPivotDropTolerance = 1e-13;

/// Left-looking LU with partial pivoting, no fill-reducing ordering.
LUFactors sparse_lu(const SparseMatrix& m);

/// Solves M x = rhs using the factors.
Vector lu_solve(const LUFactors& f, std::span<const double> rhs);
void lu_solve(const LUFactors& f, std::span<const double> rhs, std::span<double> x);

}  // namespace gpmr
