#include "gpmr/gpmr.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace gpmr {

GpmrWorkspace::GpmrWorkspace(const PartitionedSystem& sys, std::size_t k_max,
                             bool reorthogonalize)
    : lambda_(sys.lambda()),
      mu_(sys.mu()),
      m_(sys.m()),
      n_(sys.n()),
      k_max_(k_max),
      reorth_(reorthogonalize),
      process_(sys.A(), sys.B(), sys.b(), sys.c(), k_max) {
  if (k_max_ == 0) throw std::invalid_argument("GpmrWorkspace: k_max must be positive");
  bank_.reserve(k_max_);
  r_.reserve(2 * k_max_ + 1);
  tbar_.assign(2 * k_max_ + 2, 0.0);
  tbar_[0] = process_.beta();
  tbar_[1] = process_.gamma();
  residual_ = std::hypot(tbar_[0], tbar_[1]);
  col_odd_.resize(2 * k_max_ + 2);
  col_even_.resize(2 * k_max_ + 2);
}

bool GpmrWorkspace::iterate() {
  if (solved_) throw std::logic_error("GpmrWorkspace: iterate after in-place solve");
  if (k_ == k_max_ || !process_.step(reorth_)) return false;
  const std::size_t k = ++k_;
  const auto hcol = process_.h_column(k);  // h_{1..k+1,k}
  const auto fcol = process_.f_column(k);  // f_{1..k+1,k}

  // Rows 1..2k+2 of columns 2k-1 (odd) and 2k (even) of S_{k+1,k}, 0-based.
  auto& odd = col_odd_;
  auto& even = col_even_;
  std::fill_n(odd.begin(), 2 * k + 2, 0.0);
  std::fill_n(even.begin(), 2 * k + 2, 0.0);
  even[0] = hcol[0];
  odd[1] = fcol[0];
  if (k == 1) {
    odd[0] = lambda_;
    even[1] = mu_;
  }

  // Apply Q_{1,4}, ..., Q_{2k-5,2k-2} of the previous iterations.
  for (std::size_t i = 1; i + 1 <= k; ++i) {
    const bool last = i == k - 1;
    const double rho = last ? lambda_ : 0.0;
    const double delta = last ? mu_ : 0.0;
    std::array<double, 4> a{odd[2 * i - 2], odd[2 * i - 1], rho, fcol[i]};
    ref(bank_, i, a);
    std::copy(a.begin(), a.end(), odd.begin() + static_cast<std::ptrdiff_t>(2 * i - 2));
    std::array<double, 4> b{even[2 * i - 2], even[2 * i - 1], hcol[i], delta};
    ref(bank_, i, b);
    std::copy(b.begin(), b.end(), even.begin() + static_cast<std::ptrdiff_t>(2 * i - 2));
  }

  const auto tri = givens(bank_, k, odd[2 * k - 2], even[2 * k - 2], odd[2 * k - 1],
                          even[2 * k - 1], hcol[k], fcol[k]);
  odd[2 * k - 2] = tri.r11;
  even[2 * k - 2] = tri.r12;
  even[2 * k - 1] = tri.r22;
  r_.append_column(std::span<const double>(odd).first(2 * k - 1));
  r_.append_column(std::span<const double>(even).first(2 * k));

  std::array<double, 4> t{tbar_[2 * k - 2], tbar_[2 * k - 1], 0.0, 0.0};
  ref(bank_, k, t);
  std::copy(t.begin(), t.end(), tbar_.begin() + static_cast<std::ptrdiff_t>(2 * k - 2));
  residual_ = std::hypot(tbar_[2 * k], tbar_[2 * k + 1]);
  return true;
}

bool GpmrWorkspace::close() {
  if (solved_) throw std::logic_error("GpmrWorkspace: close after in-place solve");
  if (closed_ || k_ == 0) return false;
  auto extra = process_.closing_column();
  if (!extra) return false;
  const std::size_t k = k_;

  // Column of S for the dangling vector, rows ordered as W_{k+1}.
  std::vector<double> col(2 * k + 2, 0.0);
  for (std::size_t i = 1; i <= k; ++i)
    col[extra->v_side ? 2 * i - 1 : 2 * i - 2] = extra->coefficients[i - 1];
  col[extra->v_side ? 2 * k : 2 * k + 1] = extra->v_side ? lambda_ : mu_;

  for (std::size_t i = 1; i <= k; ++i) {
    std::array<double, 4> a{col[2 * i - 2], col[2 * i - 1], col[2 * i], col[2 * i + 1]};
    ref(bank_, i, a);
    std::copy(a.begin(), a.end(), col.begin() + static_cast<std::ptrdiff_t>(2 * i - 2));
  }
  double diag = 0.0;
  const Reflection g = make_reflection(col[2 * k], col[2 * k + 1], diag);
  col[2 * k] = diag;
  r_.append_column(std::span<const double>(col).first(2 * k + 1));
  apply_reflection(g, tbar_[2 * k], tbar_[2 * k + 1]);
  residual_ = std::abs(tbar_[2 * k + 1]);
  closing_v_side_ = extra->v_side;
  closed_ = true;
  return true;
}

Vector GpmrWorkspace::solve_subproblem() const {
  const std::size_t p = subproblem_size();
  Vector z(tbar_.begin(), tbar_.begin() + static_cast<std::ptrdiff_t>(p));
  backward_substitution(r_, p, z);
  return z;
}

std::span<const double> GpmrWorkspace::solve_subproblem_in_place() {
  const std::size_t p = subproblem_size();
  backward_substitution(r_, p, tbar_);
  solved_ = true;
  return std::span<const double>(tbar_).first(p);
}

void GpmrWorkspace::assemble_iterate(std::span<const double> z, std::span<double> x,
                                     std::span<double> y) const {
  if (z.size() != subproblem_size() || x.size() != m_ || y.size() != n_)
    throw DimensionError("GpmrWorkspace::assemble_iterate: dimension mismatch");
  std::fill(x.begin(), x.end(), 0.0);
  std::fill(y.begin(), y.end(), 0.0);
  for (std::size_t i = 1; i <= k_; ++i) {
    axpy(z[2 * i - 2], process_.v(i), x);
    axpy(z[2 * i - 1], process_.u(i), y);
  }
  if (closed_) {
    if (closing_v_side_)
      axpy(z[2 * k_], process_.v(k_ + 1), x);
    else
      axpy(z[2 * k_], process_.u(k_ + 1), y);
  }
}

MemoryFootprint GpmrWorkspace::memory() const {
  MemoryFootprint mem;
  mem.solution = m_ + n_;
  mem.work = m_ + n_;
  mem.basis = std::min(process_.v_count(), k_) * m_ + std::min(process_.u_count(), k_) * n_;
  mem.t = 2 * k_;
  mem.z = 2 * k_;
  mem.givens = bank_.coefficient_count();
  mem.r = r_.stored();
  return mem;
}

SolveReport gpmr_solve(const PartitionedSystem& sys, const SolverOptions& opt) {
  validate_tolerances(opt);
  const std::size_t full = std::min(sys.m(), sys.n());
  // Iteration budget. By default the process runs to exhaustion, plus the
  // closing step when m != n.
  const std::size_t budget = opt.max_iterations > 0 ? opt.max_iterations : full + 1;
  GpmrWorkspace ws(sys, std::min(budget, full), opt.reorthogonalize);

  const double rhs_norm = sys.rhs_norm();
  const double eps = stopping_threshold(opt, rhs_norm);

  SolveReport rep;
  rep.x.assign(sys.m(), 0.0);
  rep.y.assign(sys.n(), 0.0);
  rep.residual_history.push_back(ws.residual_norm());
  if (opt.diagnostics) {
    rep.true_residual_history.push_back(rhs_norm);
    rep.iterate_history.emplace_back(sys.m() + sys.n(), 0.0);
  }

  auto record = [&] {
    rep.residual_history.push_back(ws.residual_norm());
    if (!opt.diagnostics) return;
    const Vector z = ws.solve_subproblem();
    Vector xy(sys.m() + sys.n());
    ws.assemble_iterate(z, std::span<double>(xy).first(sys.m()),
                        std::span<double>(xy).subspan(sys.m()));
    const auto r = sys.residual(std::span<const double>(xy).first(sys.m()),
                                std::span<const double>(xy).subspan(sys.m()));
    rep.true_residual_history.push_back(norm2(r));
    rep.iterate_history.push_back(std::move(xy));
  };

  while (ws.residual_norm() > eps && ws.iterations() < budget) {
    if (!ws.iterate()) break;
    record();
    if (ws.exhausted()) break;
  }
  if (ws.exhausted() && ws.residual_norm() > eps && ws.iterations() < budget && ws.close())
    record();

  rep.iterations = ws.iterations() + (ws.closed() ? 1 : 0);
  rep.matvec_count = ws.process().matvec_count();
  if (ws.residual_norm() <= eps)
    rep.status = SolveStatus::converged;
  else if (ws.exhausted())
    rep.status = SolveStatus::exhausted;
  else
    rep.status = SolveStatus::max_iterations;

  if (rep.iterations > 0) {
    const auto z = ws.solve_subproblem_in_place();
    ws.assemble_iterate(z, rep.x, rep.y);
  }
  return rep;
}

}  // namespace gpmr
