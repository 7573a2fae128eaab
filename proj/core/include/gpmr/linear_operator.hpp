#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>

#include "gpmr/sparse_matrix.hpp"

namespace gpmr {

/// Matrix-free linear map R^ncols -> R^nrows.
///
/// The apply callable writes into a caller-owned output span of length
/// nrows. Copies share the underlying callable state, which must be
/// read-only so that concurrent applications are safe.
class LinearOperator {
 public:
  using Apply = std::function<void(std::span<const double>, std::span<double>)>;

  LinearOperator() = default;
  LinearOperator(std::size_t nrows, std::size_t ncols, Apply apply,
                 Apply apply_transpose = {});

  static LinearOperator from_matrix(SparseMatrix m);
  static LinearOperator from_matrix(std::shared_ptr<const SparseMatrix> m);
  static LinearOperator identity(std::size_t n, double scale = 1.0);

  std::size_t nrows() const { return nrows_; }
  std::size_t ncols() const { return ncols_; }
  bool has_transpose() const { return static_cast<bool>(apply_transpose_); }

  void apply(std::span<const double> x, std::span<double> y) const;
  Vector apply(std::span<const double> x) const;
  void apply_transpose(std::span<const double> x, std::span<double> y) const;
  Vector apply_transpose(std::span<const double> x) const;

  /// (this o rhs)(x) = this(rhs(x))
  LinearOperator compose(const LinearOperator& rhs) const;

 private:
  std::size_t nrows_ = 0;
  std::size_t ncols_ = 0;
  Apply apply_;
  Apply apply_transpose_;
};

/// K = [lambda I, A; B, mu I] applied to the stacked vector (x, y).
void apply_partitioned(double lambda, double mu, const LinearOperator& a,
                       const LinearOperator& b, std::span<const double> xy,
                       std::span<double> out);

/// The same K packaged as a single operator of order m + n.
LinearOperator partitioned_operator(double lambda, double mu, LinearOperator a,
                                    LinearOperator b);

}  // namespace gpmr
