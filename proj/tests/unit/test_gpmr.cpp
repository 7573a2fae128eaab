#include <cmath>

#include "doctest.h"
#include "gpmr/block_gmres.hpp"
#include "gpmr/givens.hpp"
#include "gpmr/gmres.hpp"
#include "gpmr/gpmr.hpp"
#include "test_support.hpp"

using namespace gpmr;
using namespace gpmr::testing;

namespace {

// 4x4 matrix of the reflection acting on rows (p, q).
Eigen::Matrix4d embed(const Reflection& g, int p, int q) {
  Eigen::Matrix4d e = Eigen::Matrix4d::Identity();
  e(p, p) = g.c;
  e(p, q) = g.s;
  e(q, p) = g.s;
  e(q, q) = -g.c;
  return e;
}

// Q^T for one step: the four reflections applied in order.
Eigen::Matrix4d step_qt(const std::array<Reflection, 4>& g) {
  return embed(g[3], 1, 2) * embed(g[2], 1, 3) * embed(g[1], 0, 1) * embed(g[0], 0, 3);
}

GivensBank bank_with(double c, double s) {
  GivensBank bank;
  Reflection g{c, s};
  bank.set(1, {g, g, g, g});
  return bank;
}

// Dense S_{k+1,k} with columns ordered (v_1, u_1, ..., v_k, u_k) and rows
// ordered likewise up to k+1.
Eigen::MatrixXd assemble_s(const HessenbergProcess& p, double lambda, double mu,
                           std::size_t k) {
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(2 * k + 2),
                                            static_cast<Eigen::Index>(2 * k));
  for (std::size_t j = 1; j <= k; ++j) {
    const auto cj = static_cast<Eigen::Index>(2 * j - 2);
    s(cj, cj) = lambda;
    s(cj + 1, cj + 1) = mu;
    for (std::size_t i = 1; i <= j + 1; ++i) {
      const auto ri = static_cast<Eigen::Index>(2 * i - 2);
      s(ri, cj + 1) = p.h(i, j);
      s(ri + 1, cj) = p.f(i, j);
    }
  }
  return s;
}

PartitionedSystem ones_system(Rng& rng, std::size_t m, std::size_t n) {
  const SparseMatrix a = random_dense_as_sparse(rng, m, n);
  const SparseMatrix b = random_dense_as_sparse(rng, n, m);
  Vector rb = spmv(a, Vector(n, 1.0));
  for (double& v : rb) v += 1.0;
  Vector rc = spmv(b, Vector(m, 1.0));
  for (double& v : rc) v += 1.0;
  return PartitionedSystem(1.0, 1.0, LinearOperator::from_matrix(a),
                           LinearOperator::from_matrix(b), rb, rc);
}

}  // namespace

TEST_SUITE("gpmr") {

TEST_CASE("ref on the zero vector") {
  Rng rng(41);
  GivensBank bank;
  std::array<Reflection, 4> g;
  for (auto& r : g) {
    double nr;
    r = make_reflection(random_vector(rng, 1)[0], random_vector(rng, 1)[0], nr);
  }
  bank.set(1, g);
  std::array<double, 4> a{0, 0, 0, 0};
  ref(bank, 1, a);
  CHECK(a == std::array<double, 4>{0, 0, 0, 0});
}

TEST_CASE("ref hand traces") {
  std::array<double, 4> a{1.5, -2.0, 3.25, 7.0};
  ref(bank_with(1.0, 0.0), 1, a);
  CHECK(a == std::array<double, 4>{1.5, 2.0, -3.25, 7.0});
  std::array<double, 4> b{1.5, -2.0, 3.25, 7.0};
  ref(bank_with(0.0, 1.0), 1, b);
  CHECK(b == std::array<double, 4>{-2.0, 3.25, 1.5, 7.0});
}

TEST_CASE("ref matches the explicit product of reflections") {
  Rng rng(42);
  for (int trial = 0; trial < 50; ++trial) {
    std::array<Reflection, 4> g;
    for (auto& r : g) {
      const Vector ab = random_vector(rng, 2);
      double nr;
      r = make_reflection(ab[0], ab[1], nr);
    }
    GivensBank bank;
    bank.set(1, g);
    const Vector x = random_vector(rng, 4);
    std::array<double, 4> a{x[0], x[1], x[2], x[3]};
    ref(bank, 1, a);
    const Eigen::Vector4d expect = step_qt(g) * Eigen::Vector4d(x[0], x[1], x[2], x[3]);
    for (int i = 0; i < 4; ++i) CHECK(std::abs(a[static_cast<std::size_t>(i)] - expect(i)) <= 1e-15);
  }
}

TEST_CASE("reflection zero-norm convention") {
  double r = -1.0;
  const Reflection g = make_reflection(0.0, 0.0, r);
  CHECK(g.c == 1.0);
  CHECK(g.s == 0.0);
  CHECK(r == 0.0);
}

TEST_CASE("givens on an already triangular block") {
  GivensBank bank;
  const GivensTriangle t = givens(bank, 1, 1, 0, 0, 1, 0, 0);
  CHECK(t.r11 == 1.0);
  CHECK(t.r12 == 0.0);
  CHECK(t.r22 == 1.0);
  const auto& g = bank.at(1);
  CHECK(g[0].c == 1.0);
  CHECK(g[1].c == 1.0);
  // The third reflection maps (-1, 0) to (1, 0), so its cosine is -1.
  CHECK(g[2].c == -1.0);
  CHECK(g[3].c == 1.0);
  for (const auto& r : g) CHECK(r.s == 0.0);
}

TEST_CASE("givens hand evaluation") {
  GivensBank bank;
  const GivensTriangle t = givens(bank, 1, 3, 1, 0, 2, 0, 4);
  const auto& g = bank.at(1);
  CHECK(g[0].c == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(g[0].s == doctest::Approx(0.8).epsilon(1e-15));
  CHECK(g[1].c == 1.0);
  CHECK(g[1].s == 0.0);
  CHECK(g[2].c == doctest::Approx(-2.0 / std::sqrt(4.64)).epsilon(1e-15));
  CHECK(g[2].c == doctest::Approx(-0.928477).epsilon(1e-6));
  CHECK(g[2].s == doctest::Approx(0.371391).epsilon(1e-6));
  CHECK(g[3].c == 1.0);
  CHECK(g[3].s == 0.0);
  CHECK(t.r11 == doctest::Approx(5.0).epsilon(1e-15));
  CHECK(t.r12 == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(t.r22 == doctest::Approx(std::sqrt(4.64)).epsilon(1e-15));
  CHECK(t.r22 == doctest::Approx(2.154066).epsilon(1e-6));
}

TEST_CASE("givens reconstruction on random columns") {
  Rng rng(43);
  for (int trial = 0; trial < 200; ++trial) {
    const Vector v = random_vector(rng, 6);
    const double h = std::abs(v[4]), f = std::abs(v[5]);
    GivensBank bank;
    const GivensTriangle t = givens(bank, 1, v[0], v[1], v[2], v[3], h, f);
    CHECK(t.r11 >= 0.0);
    CHECK(t.r22 >= 0.0);
    Eigen::Matrix<double, 4, 2> in;
    in << v[0], v[1], v[2], v[3], 0.0, h, f, 0.0;
    Eigen::Matrix<double, 4, 2> out;
    out << t.r11, t.r12, 0.0, t.r22, 0.0, 0.0, 0.0, 0.0;
    const Eigen::Matrix4d qt = step_qt(bank.at(1));
    CHECK((qt.transpose() * out - in).cwiseAbs().maxCoeff() <= 1e-14);
    CHECK((qt * in - out).cwiseAbs().maxCoeff() <= 1e-14);
  }
}

TEST_CASE("backward substitution") {
  PackedUpperTriangular r;
  r.append_column(Vector{1});
  r.append_column(Vector{0, 1});
  Vector t{5, 7};
  backward_substitution(r, 2, t);
  CHECK(t == Vector{5, 7});

  PackedUpperTriangular r2;
  r2.append_column(Vector{2});
  r2.append_column(Vector{1, 4});
  Vector t2{4, 8};
  backward_substitution(r2, 2, t2);
  CHECK(t2 == Vector{1, 2});

  PackedUpperTriangular sing;
  sing.append_column(Vector{1});
  sing.append_column(Vector{3, 0});
  Vector t3{1, 1};
  try {
    backward_substitution(sing, 2, t3);
    FAIL("expected singular subproblem");
  } catch (const SingularSubproblemError& e) {
    CHECK(e.index() == 2);
  }
}

TEST_CASE("backward substitution on a random well-conditioned triangle") {
  Rng rng(44);
  PackedUpperTriangular r;
  Eigen::MatrixXd dense = Eigen::MatrixXd::Zero(20, 20);
  for (std::size_t j = 0; j < 20; ++j) {
    Vector col = random_vector(rng, j + 1);
    col[j] = 2.0 + std::abs(col[j]);
    for (std::size_t i = 0; i <= j; ++i)
      dense(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = col[i];
    r.append_column(col);
  }
  CHECK(r.stored() == 20 * 21 / 2);
  const Vector t = random_vector(rng, 20);
  Vector z = t;
  backward_substitution(r, 20, z);
  CHECK((dense * to_eigen(z) - to_eigen(t)).norm() <= 1e-12 * norm2(t));
}

TEST_CASE("one-by-one blocks are solved in one iteration") {
  const auto one = LinearOperator::from_matrix(SparseMatrix::identity(1));
  const PartitionedSystem sys(2.0, 2.0, one, one, Vector{3}, Vector{3});
  const SolveReport rep = gpmr_solve(sys);
  CHECK(rep.converged());
  CHECK(rep.iterations == 1);
  CHECK(rep.x[0] == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(rep.y[0] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("random 10 x 8 system against a dense direct solve") {
  Rng rng(45);
  for (int trial = 0; trial < 5; ++trial) {
    const PartitionedSystem sys = ones_system(rng, 10, 8);
    SolverOptions opt;
    opt.max_iterations = 18;
    const SolveReport rep = gpmr_solve(sys, opt);
    CHECK(rep.converged());
    CHECK(rep.iterations <= 18);
    const Eigen::VectorXd direct =
        dense_partitioned(sys).partialPivLu().solve(to_eigen(sys.stacked_rhs()));
    for (std::size_t i = 0; i < 10; ++i)
      CHECK(std::abs(rep.x[i] - direct(static_cast<Eigen::Index>(i))) <= 1e-8);
    for (std::size_t i = 0; i < 8; ++i)
      CHECK(std::abs(rep.y[i] - direct(static_cast<Eigen::Index>(10 + i))) <= 1e-8);
    // The default budget reaches the same answer.
    const SolveReport def = gpmr_solve(sys);
    CHECK(def.converged());
    CHECK(def.iterations == rep.iterations);
  }
}

TEST_CASE("unequal blocks close the invariant subspace on either side") {
  Rng rng(46);
  for (auto [m, n] : {std::pair<std::size_t, std::size_t>{12, 5}, {5, 12}, {7, 7}}) {
    const PartitionedSystem sys = ones_system(rng, m, n);
    SolverOptions opt;
    opt.diagnostics = true;
    const SolveReport rep = gpmr_solve(sys, opt);
    CHECK(rep.converged());
    CHECK(rep.iterations == std::min(m, n) + (m != n ? 1 : 0));
    for (double v : rep.x) CHECK(std::abs(v - 1.0) <= 1e-8);
    for (double v : rep.y) CHECK(std::abs(v - 1.0) <= 1e-8);
    CHECK(rep.true_residual_history.back() <= 1e-10 * sys.rhs_norm());
  }
}

TEST_CASE("true residual meets the stopping rule with slack") {
  Rng rng(47);
  for (int trial = 0; trial < 5; ++trial) {
    auto rp = random_preconditioned_problem(rng, 60, 50, 0.05);
    const auto& sys = rp.problem.system;
    const SolverOptions opt;
    const SolveReport rep = gpmr_solve(sys, opt);
    REQUIRE(rep.converged());
    const double tol = stopping_threshold(opt, sys.rhs_norm());
    CHECK(rep.residual_history.back() <= tol);
    CHECK(norm2(sys.residual(rep.x, rep.y)) <= 10.0 * tol);
    CHECK(rep.residual_history.size() == rep.iterations + 1);
    CHECK(rep.residual_history.front() == doctest::Approx(sys.rhs_norm()).epsilon(1e-14));
  }
}

TEST_CASE("residual recurrence tracks the true residual and never increases") {
  Rng rng(48);
  for (int trial = 0; trial < 5; ++trial) {
    auto rp = random_preconditioned_problem(rng, 70, 55, 0.05);
    const auto& sys = rp.problem.system;
    SolverOptions opt;
    opt.diagnostics = true;
    const SolveReport rep = gpmr_solve(sys, opt);
    REQUIRE(rep.true_residual_history.size() == rep.residual_history.size());
    for (std::size_t k = 0; k < rep.residual_history.size(); ++k) {
      CHECK(std::abs(rep.residual_history[k] - rep.true_residual_history[k]) <=
            1e-8 * sys.rhs_norm());
      if (k > 0) CHECK(rep.residual_history[k] <= rep.residual_history[k - 1]);
    }
  }
}

TEST_CASE("Q_k [R_k; 0] reproduces S_{k+1,k} and Q_k^T (beta e1 + gamma e2) = tbar") {
  Rng rng(49);
  for (double lambda : {1.0, 0.0, -2.5}) {
    const double mu = lambda == 0.0 ? 0.7 : 1.0;
    const PartitionedSystem sys = random_dense_system(rng, 25, 20, lambda, mu);
    GpmrWorkspace ws(sys, 15, true);
    for (std::size_t k = 1; k <= 15; ++k) {
      REQUIRE(ws.iterate());
      const Eigen::MatrixXd s = assemble_s(ws.process(), lambda, mu, k);
      // Apply Q^T blockwise with ref.
      Eigen::MatrixXd qts = s;
      Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(2 * k + 2));
      rhs(0) = ws.process().beta();
      rhs(1) = ws.process().gamma();
      auto apply_qt = [&](auto&& vec) {
        for (std::size_t i = 1; i <= k; ++i) {
          const auto o = static_cast<Eigen::Index>(2 * i - 2);
          std::array<double, 4> a{vec(o), vec(o + 1), vec(o + 2), vec(o + 3)};
          ref(ws.givens_bank(), i, a);
          for (int t = 0; t < 4; ++t) vec(o + t) = a[static_cast<std::size_t>(t)];
        }
      };
      for (Eigen::Index c = 0; c < qts.cols(); ++c) apply_qt(qts.col(c));
      apply_qt(rhs);
      Eigen::MatrixXd rdense = Eigen::MatrixXd::Zero(qts.rows(), qts.cols());
      for (std::size_t j = 1; j <= 2 * k; ++j)
        for (std::size_t i = 1; i <= j; ++i)
          rdense(static_cast<Eigen::Index>(i - 1), static_cast<Eigen::Index>(j - 1)) =
              ws.r_factor()(i, j);
      CHECK((qts - rdense).norm() <= 1e-12 * s.norm());
      for (std::size_t i = 1; i <= 2 * k; ++i) CHECK(ws.r_factor()(i, i) >= 0.0);
      const auto tbar = ws.tbar();
      for (std::size_t i = 0; i < 2 * k + 2; ++i)
        CHECK(std::abs(tbar[i] - rhs(static_cast<Eigen::Index>(i))) <= 1e-12 * sys.rhs_norm());
      CHECK(ws.residual_norm() == std::hypot(tbar[2 * k], tbar[2 * k + 1]));
    }
  }
}

TEST_CASE("first iteration seeds lambda and mu") {
  Rng rng(50);
  const PartitionedSystem sys = random_dense_system(rng, 6, 5, 3.0, -4.0);
  GpmrWorkspace ws(sys, 3, false);
  REQUIRE(ws.iterate());
  // Undo Q_1 on the first two columns of R: they must hold (lambda, f11, 0, f21)
  // and (h11, mu, h21, 0).
  const auto& p = ws.process();
  std::array<double, 4> odd{ws.r_factor()(1, 1), 0.0, 0.0, 0.0};
  std::array<double, 4> even{ws.r_factor()(1, 2), ws.r_factor()(2, 2), 0.0, 0.0};
  const Eigen::Matrix4d q = step_qt(ws.givens_bank().at(1)).transpose();
  const Eigen::Vector4d so = q * Eigen::Vector4d(odd[0], odd[1], odd[2], odd[3]);
  const Eigen::Vector4d se = q * Eigen::Vector4d(even[0], even[1], even[2], even[3]);
  CHECK(so(0) == doctest::Approx(3.0).epsilon(1e-13));
  CHECK(so(1) == doctest::Approx(p.f(1, 1)).epsilon(1e-13));
  CHECK(std::abs(so(2)) <= 1e-13);
  CHECK(so(3) == doctest::Approx(p.f(2, 1)).epsilon(1e-13));
  CHECK(se(0) == doctest::Approx(p.h(1, 1)).epsilon(1e-13));
  CHECK(se(1) == doctest::Approx(-4.0).epsilon(1e-13));
  CHECK(se(2) == doctest::Approx(p.h(2, 1)).epsilon(1e-13));
  CHECK(std::abs(se(3)) <= 1e-13);
}

TEST_CASE("GPMR residual never exceeds GMRES residual") {
  Rng rng(51);
  for (int trial = 0; trial < 5; ++trial) {
    auto rp = random_preconditioned_problem(rng, 50, 45, 0.06);
    const auto& sys = rp.problem.system;
    SolverOptions opt;
    opt.reorthogonalize = true;
    const SolveReport g = gpmr_solve(sys, opt);
    const SolveReport a = gmres_solve(sys, opt);
    const std::size_t shared = std::min(g.residual_history.size(), a.residual_history.size());
    for (std::size_t k = 0; k < shared; ++k)
      CHECK(g.residual_history[k] <= a.residual_history[k] + 1e-10 * sys.rhs_norm());
    CHECK(g.iterations <= a.iterations);
  }
}

TEST_CASE("summed Block-GMRES iterates equal GPMR iterates") {
  Rng rng(52);
  for (int trial = 0; trial < 5; ++trial) {
    auto rp = random_preconditioned_problem(rng, 30, 26, 0.1);
    const auto& sys = rp.problem.system;
    SolverOptions opt;
    opt.diagnostics = true;
    opt.reorthogonalize = true;
    opt.max_iterations = 10;
    opt.atol = 0.0;
    opt.rtol = 1e-300;
    const SolveReport g = gpmr_solve(sys, opt);
    const BlockGmresReport b = block_gmres_solve(sys, opt);
    REQUIRE(g.iterate_history.size() == 11);
    REQUIRE(b.first.iterate_history.size() == 11);
    for (std::size_t k = 1; k <= 10; ++k) {
      Vector sum = b.first.iterate_history[k];
      axpy(1.0, b.second.iterate_history[k], sum);
      CHECK(max_abs_diff(sum, g.iterate_history[k]) <= 1e-6 * norm2(g.iterate_history[k]));
      CHECK(b.summed_residual_history[k] ==
            doctest::Approx(g.residual_history[k]).epsilon(1e-8));
    }
  }
}

TEST_CASE("memory footprint follows the storage contract") {
  Rng rng(53);
  const std::size_t m = 40, n = 30;
  const PartitionedSystem sys = random_dense_system(rng, m, n);
  GpmrWorkspace ws(sys, 20, false);
  for (std::size_t k = 1; k <= 20; ++k) {
    REQUIRE(ws.iterate());
    const MemoryFootprint mem = ws.memory();
    CHECK(mem.basis == k * (m + n));
    CHECK(mem.t == 2 * k);
    CHECK(mem.z == 2 * k);
    CHECK(mem.givens == 8 * k);
    CHECK(mem.r == k * (2 * k + 1));
    CHECK(mem.solution == m + n);
    CHECK(mem.work == m + n);
  }
  // z is computed over the t storage.
  const auto tb = ws.tbar();
  const double* t_ptr = tb.data();
  const auto z = ws.solve_subproblem_in_place();
  CHECK(z.data() == t_ptr);
  CHECK(z.size() == 40);
  CHECK_THROWS_AS(ws.iterate(), std::logic_error);
}

TEST_CASE("status reporting") {
  Rng rng(54);
  auto rp = random_preconditioned_problem(rng, 40, 40, 0.1);
  SolverOptions opt;
  opt.max_iterations = 2;
  const SolveReport capped = gpmr_solve(rp.problem.system, opt);
  CHECK(capped.status == SolveStatus::max_iterations);
  CHECK(capped.iterations == 2);
  CHECK(capped.matvec_count == 2);

  // K = [0 I; I 0] with b = c: both sides break down at step 1 and the
  // solution x = y = b already lies in the first block.
  const auto id = LinearOperator::identity(3);
  const PartitionedSystem swap(0.0, 0.0, id, id, Vector{1, 2, 3}, Vector{1, 2, 3});
  const SolveReport s = gpmr_solve(swap);
  CHECK(s.converged());
  CHECK(s.iterations == 1);
  CHECK(max_abs_diff(s.x, Vector{1, 2, 3}) <= 1e-14);
  CHECK(max_abs_diff(s.y, Vector{1, 2, 3}) <= 1e-14);

  SolverOptions bad;
  bad.atol = 0.0;
  bad.rtol = 0.0;
  CHECK_THROWS_AS(gpmr_solve(swap, bad), std::invalid_argument);
  bad.atol = -1.0;
  bad.rtol = 1.0;
  CHECK_THROWS_AS(gpmr_solve(swap, bad), std::invalid_argument);
}

TEST_CASE("breakdown with a replacement vector keeps the recurrence valid") {
  // A = B = I on R^4 with b = e1 + e2 and c = e3: the reduction breaks down
  // on both sides at step 2 and continues with canonical replacements.
  const auto id = LinearOperator::identity(4);
  const PartitionedSystem sys(2.0, 3.0, id, id, Vector{1, 1, 0, 0}, Vector{0, 0, 1, 0});
  SolverOptions opt;
  opt.diagnostics = true;
  GpmrWorkspace ws(sys, 4, false);
  REQUIRE(ws.iterate());
  REQUIRE(ws.iterate());
  CHECK(ws.process().breakdown(2).v_side);
  CHECK(ws.process().breakdown(2).u_side);
  const SolveReport rep = gpmr_solve(sys, opt);
  CHECK(rep.converged());
  for (std::size_t k = 0; k < rep.residual_history.size(); ++k)
    CHECK(std::abs(rep.residual_history[k] - rep.true_residual_history[k]) <= 1e-12);
  CHECK(norm2(sys.residual(rep.x, rep.y)) <= 1e-10);
}

}  // TEST_SUITE
