#include "gpmr/hessenberg.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace gpmr {
namespace {

std::span<const double> column(const std::vector<double>& basis, std::size_t dim,
                               std::size_t i) {
  return std::span<const double>(basis).subspan(i * dim, dim);
}

// One modified Gram-Schmidt sweep of w against columns [0, count) of basis;
// coefficients are accumulated into coef.
void mgs_pass(const std::vector<double>& basis, std::size_t dim, std::size_t count,
              std::span<double> w, std::span<double> coef) {
  for (std::size_t i = 0; i < count; ++i) {
    const auto col = column(basis, dim, i);
    const double c = dot(col, w);
    axpy(-c, col, w);
    coef[i] += c;
  }
}

}  // namespace

HessenbergProcess::HessenbergProcess(LinearOperator a, LinearOperator b,
                                     std::span<const double> rhs_b,
                                     std::span<const double> rhs_c, std::size_t capacity)
    : a_(std::move(a)),
      b_(std::move(b)),
      m_(a_.nrows()),
      n_(a_.ncols()),
      capacity_(capacity) {
  if (b_.nrows() != n_ || b_.ncols() != m_)
    throw DimensionError("HessenbergProcess: A must be m x n and B n x m");
  if (rhs_b.size() != m_ || rhs_c.size() != n_)
    throw DimensionError("HessenbergProcess: b must have length m and c length n");

  beta_ = norm2(rhs_b);
  gamma_ = norm2(rhs_c);
  if (beta_ == 0.0) throw InitializationError("HessenbergProcess: b is zero");
  if (gamma_ == 0.0) throw InitializationError("HessenbergProcess: c is zero");

  v_.reserve((capacity_ + 1) * m_);
  u_.reserve((capacity_ + 1) * n_);
  h_cols_.reserve(capacity_);
  f_cols_.reserve(capacity_);
  flags_.reserve(capacity_);
  q_.resize(m_);
  p_.resize(n_);

  v_.assign(rhs_b.begin(), rhs_b.end());
  scale(1.0 / beta_, v_);
  u_.assign(rhs_c.begin(), rhs_c.end());
  scale(1.0 / gamma_, u_);
}

std::span<const double> HessenbergProcess::v(std::size_t i) const {
  if (i == 0 || i > v_count()) throw std::out_of_range("HessenbergProcess::v");
  return column(v_, m_, i - 1);
}

std::span<const double> HessenbergProcess::u(std::size_t i) const {
  if (i == 0 || i > u_count()) throw std::out_of_range("HessenbergProcess::u");
  return column(u_, n_, i - 1);
}

double HessenbergProcess::h(std::size_t i, std::size_t j) const {
  const auto& col = h_cols_.at(j - 1);
  return i >= 1 && i <= col.size() ? col[i - 1] : 0.0;
}

double HessenbergProcess::f(std::size_t i, std::size_t j) const {
  const auto& col = f_cols_.at(j - 1);
  return i >= 1 && i <= col.size() ? col[i - 1] : 0.0;
}

bool HessenbergProcess::replacement_vector(const std::vector<double>& basis,
                                           std::size_t dim, std::size_t count,
                                           std::vector<double>& w) const {
  std::vector<double> scratch(count);
  for (std::size_t e = 0; e < dim; ++e) {
    std::fill(w.begin(), w.end(), 0.0);
    w[e] = 1.0;
    mgs_pass(basis, dim, count, w, scratch);
    mgs_pass(basis, dim, count, w, scratch);
    const double nw = norm2(w);
    if (nw > 0.5) {
      scale(1.0 / nw, w);
      return true;
    }
  }
  return false;
}

bool HessenbergProcess::step(bool reorthogonalize) {
  if (exhausted_) return false;
  const std::size_t k = k_ + 1;

  // q = A u_k, p = B v_k
  a_.apply(u(k), q_);
  b_.apply(v(k), p_);
  matvecs_ += 1;
  const double q_norm0 = norm2(q_);
  const double p_norm0 = norm2(p_);

  std::vector<double> hcol(k + 1, 0.0);
  std::vector<double> fcol(k + 1, 0.0);
  mgs_pass(v_, m_, k, q_, hcol);
  mgs_pass(u_, n_, k, p_, fcol);
  if (reorthogonalize) {
    mgs_pass(v_, m_, k, q_, hcol);
    mgs_pass(u_, n_, k, p_, fcol);
  }

  BreakdownFlags flags;
  bool v_full = false;
  bool u_full = false;

  double h_sub = norm2(q_);
  if (k >= m_) {
    // V_k already spans R^m; the remainder is rounding noise.
    h_sub = 0.0;
    flags.v_side = true;
    v_full = true;
  } else if (h_sub <= kBreakdownTolerance * q_norm0 || h_sub == 0.0) {
    h_sub = 0.0;
    flags.v_side = true;
    v_full = !replacement_vector(v_, m_, k, q_);
  } else {
    scale(1.0 / h_sub, q_);
  }

  double f_sub = norm2(p_);
  if (k >= n_) {
    f_sub = 0.0;
    flags.u_side = true;
    u_full = true;
  } else if (f_sub <= kBreakdownTolerance * p_norm0 || f_sub == 0.0) {
    f_sub = 0.0;
    flags.u_side = true;
    u_full = !replacement_vector(u_, n_, k, p_);
  } else {
    scale(1.0 / f_sub, p_);
  }

  hcol[k] = h_sub;
  fcol[k] = f_sub;
  h_cols_.push_back(std::move(hcol));
  f_cols_.push_back(std::move(fcol));
  flags_.push_back(flags);
  k_ = k;

  if (!v_full) v_.insert(v_.end(), q_.begin(), q_.end());
  if (!u_full) u_.insert(u_.end(), p_.begin(), p_.end());
  exhausted_ = v_full || u_full;
  return true;
}

std::optional<HessenbergProcess::ClosingColumn> HessenbergProcess::closing_column() {
  if (!exhausted_) return std::nullopt;
  const std::size_t k = k_;
  if (v_count() == k + 1 && u_count() == k && k == n_) {
    ClosingColumn out{true, std::vector<double>(k, 0.0)};
    b_.apply(v(k + 1), p_);
    ++matvecs_;
    mgs_pass(u_, n_, k, p_, out.coefficients);
    mgs_pass(u_, n_, k, p_, out.coefficients);
    return out;
  }
  if (u_count() == k + 1 && v_count() == k && k == m_) {
    ClosingColumn out{false, std::vector<double>(k, 0.0)};
    a_.apply(u(k + 1), q_);
    ++matvecs_;
    mgs_pass(v_, m_, k, q_, out.coefficients);
    mgs_pass(v_, m_, k, q_, out.coefficients);
    return out;
  }
  return std::nullopt;
}

}  // namespace gpmr
