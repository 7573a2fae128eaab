#include "gpmr/linear_operator.hpp"

#include <stdexcept>
#include <string>
#include <vector>

namespace gpmr {

LinearOperator::LinearOperator(std::size_t nrows, std::size_t ncols, Apply apply,
                               Apply apply_transpose)
    : nrows_(nrows),
      ncols_(ncols),
      apply_(std::move(apply)),
      apply_transpose_(std::move(apply_transpose)) {
  if (!apply_) throw std::invalid_argument("LinearOperator: empty apply callable");
}

LinearOperator LinearOperator::from_matrix(SparseMatrix m) {
  return from_matrix(std::make_shared<const SparseMatrix>(std::move(m)));
}

LinearOperator LinearOperator::from_matrix(std::shared_ptr<const SparseMatrix> m) {
  const auto rows = m->nrows();
  const auto cols = m->ncols();
  return LinearOperator(
      rows, cols,
      [m](std::span<const double> x, std::span<double> y) { spmv(*m, x, y); },
      [m](std::span<const double> x, std::span<double> y) { spmv_transpose(*m, x, y); });
}

LinearOperator LinearOperator::identity(std::size_t n, double scale) {
  auto op = [scale](std::span<const double> x, std::span<double> y) {
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = scale * x[i];
  };
  return LinearOperator(n, n, op, op);
}

void LinearOperator::apply(std::span<const double> x, std::span<double> y) const {
  if (x.size() != ncols_ || y.size() != nrows_)
    throw DimensionError("LinearOperator: " + std::to_string(nrows_) + "x" +
                         std::to_string(ncols_) + " applied to vector of length " +
                         std::to_string(x.size()));
  apply_(x, y);
}

Vector LinearOperator::apply(std::span<const double> x) const {
  Vector y(nrows_);
  apply(x, y);
  return y;
}

void LinearOperator::apply_transpose(std::span<const double> x, std::span<double> y) const {
  if (!apply_transpose_)
    throw std::logic_error("LinearOperator: transpose product not available");
  if (x.size() != nrows_ || y.size() != ncols_)
    throw DimensionError("LinearOperator: transpose of " + std::to_string(nrows_) + "x" +
                         std::to_string(ncols_) + " applied to vector of length " +
                         std::to_string(x.size()));
  apply_transpose_(x, y);
}

Vector LinearOperator::apply_transpose(std::span<const double> x) const {
  Vector y(ncols_);
  apply_transpose(x, y);
  return y;
}

LinearOperator LinearOperator::compose(const LinearOperator& rhs) const {
  if (ncols_ != rhs.nrows_)
    throw DimensionError("LinearOperator::compose: inner dimensions " +
                         std::to_string(ncols_) + " and " + std::to_string(rhs.nrows_));
  const LinearOperator outer = *this;
  const LinearOperator inner = rhs;
  Apply t;
  if (outer.has_transpose() && inner.has_transpose()) {
    t = [outer, inner](std::span<const double> x, std::span<double> y) {
      Vector tmp(outer.ncols_);
      outer.apply_transpose_(x, tmp);
      inner.apply_transpose_(tmp, y);
    };
  }
  return LinearOperator(
      nrows_, rhs.ncols_,
      [outer, inner](std::span<const double> x, std::span<double> y) {
        Vector tmp(inner.nrows_);
        inner.apply_(x, tmp);
        outer.apply_(tmp, y);
      },
      std::move(t));
}

void apply_partitioned(double lambda, double mu, const LinearOperator& a,
                       const LinearOperator& b, std::span<const double> xy,
                       std::span<double> out) {
  const std::size_t m = a.nrows();
  const std::size_t n = a.ncols();
  if (b.nrows() != n || b.ncols() != m || xy.size() != m + n || out.size() != m + n)
    throw DimensionError("apply_partitioned: inconsistent block dimensions");
  const auto x = xy.first(m);
  const auto y = xy.subspan(m);
  auto top = out.first(m);
  auto bottom = out.subspan(m);
  a.apply(y, top);
  b.apply(x, bottom);
  for (std::size_t i = 0; i < m; ++i) top[i] += lambda * x[i];
  for (std::size_t i = 0; i < n; ++i) bottom[i] += mu * y[i];
}

LinearOperator partitioned_operator(double lambda, double mu, LinearOperator a,
                                    LinearOperator b) {
  const std::size_t order = a.nrows() + a.ncols();
  return LinearOperator(order, order,
                        [lambda, mu, a = std::move(a), b = std::move(b)](
                            std::span<const double> x, std::span<double> y) {
                          apply_partitioned(lambda, mu, a, b, x, y);
                        });
}

}  // namespace gpmr
