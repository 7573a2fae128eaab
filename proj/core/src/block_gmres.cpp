#include "gpmr/block_gmres.hpp"

#include <algorithm>
#include <cmath>

#include "gpmr/block_arnoldi.hpp"
#include "gpmr/givens.hpp"

namespace gpmr {
namespace {

struct PlacedReflection {
  std::size_t row;  // acts on rows (row, row + 1), 0-based
  Reflection g;
};

// `flat[c]` is the basis column (2(i-1) + j for w(i, j)) carried by
// least-squares unknown c.
Vector basis_combination(const BlockArnoldi& arnoldi, const std::vector<std::size_t>& flat,
                         std::span<const double> z) {
  Vector x(arnoldi.order(), 0.0);
  for (std::size_t c = 0; c < z.size(); ++c) axpy(z[c], arnoldi.w(flat[c] / 2 + 1, flat[c] % 2), x);
  return x;
}

Vector solve_column(const BlockArnoldi& arnoldi, const std::vector<std::size_t>& flat,
                    const PackedUpperTriangular& r, const std::vector<double>& g) {
  const std::size_t p = r.order();
  Vector z(g.begin(), g.begin() + static_cast<std::ptrdiff_t>(p));
  backward_substitution(r, p, z);
  return basis_combination(arnoldi, flat, z);
}

double true_residual(const LinearOperator& k_op, std::span<const double> d,
                     std::span<const double> x) {
  Vector kx = k_op.apply(x);
  for (std::size_t i = 0; i < kx.size(); ++i) kx[i] = d[i] - kx[i];
  return norm2(kx);
}

}  // namespace

BlockGmresReport block_gmres_solve(const LinearOperator& k_op, std::span<const double> d1,
                                   std::span<const double> d2, const SolverOptions& opt) {
  validate_tolerances(opt);
  const std::size_t dim = k_op.nrows();
  const std::size_t k_max = opt.max_iterations > 0 ? opt.max_iterations : (dim + 1) / 2;
  BlockArnoldi arnoldi(k_op, d1, d2, k_max);

  Vector d_sum(d1.begin(), d1.end());
  axpy(1.0, d2, d_sum);
  const double eps = stopping_threshold(opt, norm2(d_sum));
  const double eps1 = stopping_threshold(opt, norm2(d1));
  const double eps2 = stopping_threshold(opt, norm2(d2));

  // Basis columns zeroed by a rank deficiency are dropped from the
  // least-squares problem: `rows` lists the active basis columns of
  // w_1..w_{k+1}, `cols` those of w_1..w_k. Both use the flat index
  // 2(i-1) + j of w(i, j).
  std::vector<std::size_t> rows;
  std::vector<std::size_t> cols;
  auto add_rows = [&](std::size_t i) {
    for (std::size_t j = 0; j < 2; ++j)
      if (arnoldi.active(i, j)) rows.push_back(2 * (i - 1) + j);
  };
  add_rows(1);

  // W^T D = [Gamma; 0], restricted to the active rows.
  std::vector<double> g1(2 * k_max + 2, 0.0);
  std::vector<double> g2(2 * k_max + 2, 0.0);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    g1[r] = rows[r] == 0 ? arnoldi.gamma()[0] : 0.0;
    g2[r] = rows[r] == 0 ? arnoldi.gamma()[1] : arnoldi.gamma()[3];
  }

  std::vector<PlacedReflection> rotations;
  PackedUpperTriangular r;
  r.reserve(2 * k_max);

  auto tail = [&](const std::vector<double>& g) {
    double s = 0.0;
    for (std::size_t i = cols.size(); i < rows.size(); ++i) s = std::hypot(s, g[i]);
    return s;
  };
  auto tail_sum = [&] {
    double s = 0.0;
    for (std::size_t i = cols.size(); i < rows.size(); ++i) s = std::hypot(s, g1[i] + g2[i]);
    return s;
  };

  BlockGmresReport rep;
  rep.first.residual_history.push_back(tail(g1));
  rep.second.residual_history.push_back(tail(g2));
  rep.summed_residual_history.push_back(tail_sum());
  if (opt.diagnostics) {
    rep.first.true_residual_history.push_back(norm2(d1));
    rep.second.true_residual_history.push_back(norm2(d2));
    rep.first.iterate_history.emplace_back(dim, 0.0);
    rep.second.iterate_history.emplace_back(dim, 0.0);
  }

  std::vector<double> col(2 * k_max + 2);
  std::size_t k = 0;
  bool stuck = false;
  while (rep.summed_residual_history.back() > eps && k < k_max) {
    if (!arnoldi.step(opt.reorthogonalize)) {
      stuck = true;
      break;
    }
    ++k;
    add_rows(k + 1);
    for (std::size_t a = 0; a < 2; ++a) {
      if (!arnoldi.active(k, a)) continue;
      const std::size_t j = cols.size();  // 0-based column of the reduced S
      cols.push_back(2 * (k - 1) + a);
      if (col.size() < rows.size()) col.resize(rows.size());
      std::fill(col.begin(), col.end(), 0.0);
      for (std::size_t row = 0; row < rows.size(); ++row) {
        const Block2 blk = arnoldi.s(rows[row] / 2 + 1, k);
        col[row] = blk[2 * (rows[row] % 2) + a];
      }
      for (const auto& pr : rotations) apply_reflection(pr.g, col[pr.row], col[pr.row + 1]);
      // Annihilate the subdiagonal from the bottom up.
      for (std::size_t row = rows.size() - 1; row > j; --row) {
        if (col[row] == 0.0) continue;
        double nr;
        const Reflection g = make_reflection(col[row - 1], col[row], nr);
        col[row - 1] = nr;
        col[row] = 0.0;
        rotations.push_back({row - 1, g});
        apply_reflection(g, g1[row - 1], g1[row]);
        apply_reflection(g, g2[row - 1], g2[row]);
      }
      r.append_column(std::span<const double>(col).first(j + 1));
    }

    rep.first.residual_history.push_back(tail(g1));
    rep.second.residual_history.push_back(tail(g2));
    rep.summed_residual_history.push_back(tail_sum());

    if (opt.diagnostics) {
      Vector x1 = solve_column(arnoldi, cols, r, g1);
      Vector x2 = solve_column(arnoldi, cols, r, g2);
      rep.first.true_residual_history.push_back(true_residual(k_op, d1, x1));
      rep.second.true_residual_history.push_back(true_residual(k_op, d2, x2));
      rep.first.iterate_history.push_back(std::move(x1));
      rep.second.iterate_history.push_back(std::move(x2));
    }
  }

  rep.iterations = k;
  rep.matvec_count = 2 * k;
  rep.status = rep.summed_residual_history.back() <= eps
                   ? SolveStatus::converged
                   : (stuck ? SolveStatus::exhausted : SolveStatus::max_iterations);

  for (auto* col_rep : {&rep.first, &rep.second}) {
    col_rep->iterations = k;
    col_rep->matvec_count = 2 * k;
  }
  rep.first.status = rep.first.residual_history.back() <= eps1 ? SolveStatus::converged
                                                               : rep.status;
  rep.second.status = rep.second.residual_history.back() <= eps2 ? SolveStatus::converged
                                                                 : rep.status;
  rep.first.x = k > 0 ? solve_column(arnoldi, cols, r, g1) : Vector(dim, 0.0);
  rep.second.x = k > 0 ? solve_column(arnoldi, cols, r, g2) : Vector(dim, 0.0);
  return rep;
}

BlockGmresReport block_gmres_solve(const PartitionedSystem& sys, const SolverOptions& opt) {
  const std::size_t m = sys.m();
  Vector d1(m + sys.n(), 0.0);
  Vector d2(m + sys.n(), 0.0);
  std::copy(sys.b().begin(), sys.b().end(), d1.begin());
  std::copy(sys.c().begin(), sys.c().end(), d2.begin() + static_cast<std::ptrdiff_t>(m));
  SolverOptions o = opt;
  // One extra step when m != n picks up the last vector of the longer side.
  if (o.max_iterations == 0)
    o.max_iterations = std::min(sys.m(), sys.n()) + (sys.m() != sys.n() ? 1 : 0);
  BlockGmresReport rep = block_gmres_solve(sys.as_operator(), d1, d2, o);
  for (auto* col : {&rep.first, &rep.second}) {
    col->y.assign(col->x.begin() + static_cast<std::ptrdiff_t>(m), col->x.end());
    col->x.resize(m);
  }
  return rep;
}

}  // namespace gpmr
