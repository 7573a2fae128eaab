#include "gpmr/gmres.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gpmr/givens.hpp"
#include "gpmr/hessenberg.hpp"

namespace gpmr {

ArnoldiProcess::ArnoldiProcess(LinearOperator k_op, std::span<const double> d,
                               std::size_t capacity)
    : k_op_(std::move(k_op)), dim_(k_op_.nrows()), beta0_(norm2(d)) {
  if (k_op_.ncols() != dim_ || d.size() != dim_)
    throw DimensionError("ArnoldiProcess: K must be square and match d");
  if (beta0_ == 0.0) throw InitializationError("ArnoldiProcess: right-hand side is zero");
  basis_.reserve((capacity + 1) * dim_);
  h_cols_.reserve(capacity);
  basis_.assign(d.begin(), d.end());
  scale(1.0 / beta0_, basis_);
}

std::span<const double> ArnoldiProcess::v(std::size_t i) const {
  if (i == 0 || i > basis_size()) throw std::out_of_range("ArnoldiProcess::v");
  return std::span<const double>(basis_).subspan((i - 1) * dim_, dim_);
}

double ArnoldiProcess::h(std::size_t i, std::size_t j) const {
  const auto& col = h_cols_.at(j - 1);
  return i >= 1 && i <= col.size() ? col[i - 1] : 0.0;
}

bool ArnoldiProcess::step(bool reorthogonalize) {
  if (invariant_) return false;
  const std::size_t k = k_ + 1;
  Vector w = k_op_.apply(v(k));
  const double w_norm0 = norm2(w);
  std::vector<double> hcol(k + 1, 0.0);
  for (int pass = 0; pass < (reorthogonalize ? 2 : 1); ++pass) {
    for (std::size_t i = 1; i <= k; ++i) {
      const double c = dot(v(i), w);
      axpy(-c, v(i), w);
      hcol[i - 1] += c;
    }
  }
  double sub = norm2(w);
  if (k >= dim_ || sub <= kBreakdownTolerance * w_norm0) {
    sub = 0.0;
    invariant_ = true;
  } else {
    scale(1.0 / sub, w);
    basis_.insert(basis_.end(), w.begin(), w.end());
  }
  hcol[k] = sub;
  h_cols_.push_back(std::move(hcol));
  k_ = k;
  return true;
}

namespace {

Vector gmres_iterate(const ArnoldiProcess& arnoldi, const PackedUpperTriangular& r,
                     std::span<const double> g, std::size_t k) {
  Vector z(g.begin(), g.begin() + static_cast<std::ptrdiff_t>(k));
  backward_substitution(r, k, z);
  Vector x(arnoldi.order(), 0.0);
  for (std::size_t i = 1; i <= k; ++i) axpy(z[i - 1], arnoldi.v(i), x);
  return x;
}

}  // namespace

SolveReport gmres_solve(const LinearOperator& k_op, std::span<const double> d,
                        const SolverOptions& opt) {
  validate_tolerances(opt);
  const std::size_t dim = k_op.nrows();
  const std::size_t k_max = opt.max_iterations > 0 ? opt.max_iterations : dim;
  ArnoldiProcess arnoldi(k_op, d, k_max);

  std::vector<Reflection> rotations;
  rotations.reserve(k_max);
  PackedUpperTriangular r;
  r.reserve(k_max);
  std::vector<double> g(k_max + 1, 0.0);
  g[0] = arnoldi.beta0();

  const double eps = stopping_threshold(opt, arnoldi.beta0());
  double residual = arnoldi.beta0();

  SolveReport rep;
  rep.residual_history.push_back(residual);
  if (opt.diagnostics) {
    rep.true_residual_history.push_back(residual);
    rep.iterate_history.emplace_back(dim, 0.0);
  }

  std::vector<double> col;
  std::size_t k = 0;
  while (residual > eps && k < k_max) {
    if (!arnoldi.step(opt.reorthogonalize)) break;
    ++k;
    const auto hcol = arnoldi.h_column(k);
    col.assign(hcol.begin(), hcol.end());
    for (std::size_t i = 1; i < k; ++i) apply_reflection(rotations[i - 1], col[i - 1], col[i]);
    double diag;
    rotations.push_back(make_reflection(col[k - 1], col[k], diag));
    col[k - 1] = diag;
    r.append_column(std::span<const double>(col).first(k));
    apply_reflection(rotations.back(), g[k - 1], g[k]);
    residual = std::abs(g[k]);
    rep.residual_history.push_back(residual);

    if (opt.diagnostics) {
      Vector x = gmres_iterate(arnoldi, r, g, k);
      Vector kx = k_op.apply(x);
      for (std::size_t i = 0; i < dim; ++i) kx[i] = d[i] - kx[i];
      rep.true_residual_history.push_back(norm2(kx));
      rep.iterate_history.push_back(std::move(x));
    }
    if (arnoldi.invariant()) break;
  }

  rep.iterations = k;
  rep.matvec_count = k;
  if (residual <= eps)
    rep.status = SolveStatus::converged;
  else if (arnoldi.invariant())
    rep.status = SolveStatus::exhausted;
  else
    rep.status = SolveStatus::max_iterations;
  rep.x = k > 0 ? gmres_iterate(arnoldi, r, g, k) : Vector(dim, 0.0);
  return rep;
}

SolveReport gmres_solve(const PartitionedSystem& sys, const SolverOptions& opt) {
  const Vector d = sys.stacked_rhs();
  SolveReport rep = gmres_solve(sys.as_operator(), d, opt);
  rep.y.assign(rep.x.begin() + static_cast<std::ptrdiff_t>(sys.m()), rep.x.end());
  rep.x.resize(sys.m());
  return rep;
}

}  // namespace gpmr
