#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

#include "gpmr/linear_operator.hpp"
#include "gpmr/partition.hpp"
#include "gpmr/sparse_lu.hpp"
#include "gpmr/sparse_matrix.hpp"

namespace gpmr {

/// The four blocks of C(perm, perm) = [M A; B N].
struct MatrixBlocks {
  SparseMatrix M;  // m x m
  SparseMatrix A;  // m x n
  SparseMatrix B;  // n x m
  SparseMatrix N;  // n x n

  std::size_t m() const { return M.nrows(); }
  std::size_t n() const { return N.nrows(); }
};

MatrixBlocks extract_blocks(const SparseMatrix& c, const BlockSplit& split);

/// Inverse of extract_blocks: the source matrix in its original ordering.
SparseMatrix assemble_blocks(const MatrixBlocks& blocks, const BlockSplit& split);

/// [lambda I, A; B, mu I] [x; y] = [b; c] with A: R^n -> R^m, B: R^m -> R^n.
class PartitionedSystem {
 public:
  /// Throws std::invalid_argument on inconsistent dimensions, on a zero
  /// right-hand side block, or when A or B maps the ones vector to zero.
  PartitionedSystem(double lambda, double mu, LinearOperator a, LinearOperator b,
                    Vector rhs_b, Vector rhs_c);

  double lambda() const { return lambda_; }
  double mu() const { return mu_; }
  const LinearOperator& A() const { return a_; }
  const LinearOperator& B() const { return b_; }
  std::span<const double> b() const { return rhs_b_; }
  std::span<const double> c() const { return rhs_c_; }
  std::size_t m() const { return a_.nrows(); }
  std::size_t n() const { return a_.ncols(); }

  /// ||(b, c)||
  double rhs_norm() const;

  /// out = K (x, y)
  void apply(std::span<const double> x, std::span<const double> y,
             std::span<double> out) const;
  /// (b, c) - K (x, y)
  Vector residual(std::span<const double> x, std::span<const double> y) const;

  /// K as a single operator of order m + n.
  LinearOperator as_operator() const;
  Vector stacked_rhs() const;

 private:
  double lambda_;
  double mu_;
  LinearOperator a_;
  LinearOperator b_;
  Vector rhs_b_;
  Vector rhs_c_;
};

class PreconditionerError : public std::runtime_error {
 public:
  PreconditionerError(std::string block, std::size_t column)
      : std::runtime_error("diagonal block " + block + " is singular (column " +
                           std::to_string(column) + ")"),
        block_(std::move(block)),
        column_(column) {}

  const std::string& block() const { return block_; }
  std::size_t column() const { return column_; }

 private:
  std::string block_;
  std::size_t column_;
};

/// Right block-Jacobi preconditioner P_r = blkdiag(M, N), held as LU factors.
class BlockJacobiPreconditioner {
 public:
  /// Factors both blocks eagerly; throws PreconditionerError naming the
  /// singular block.
  BlockJacobiPreconditioner(const SparseMatrix& m_block, const SparseMatrix& n_block);

  std::size_t m() const { return m_factors_->order(); }
  std::size_t n() const { return n_factors_->order(); }
  const LUFactors& m_factors() const { return *m_factors_; }
  const LUFactors& n_factors() const { return *n_factors_; }

  Vector solve_m(std::span<const double> x) const;
  Vector solve_n(std::span<const double> y) const;

  LinearOperator m_inverse() const;
  LinearOperator n_inverse() const;

 private:
  std::shared_ptr<const LUFactors> m_factors_;
  std::shared_ptr<const LUFactors> n_factors_;
};

struct PreconditionedProblem {
  PartitionedSystem system;
  BlockJacobiPreconditioner preconditioner;
};

/// K = [M A; B N] P_r^{-1} = [I, A N^{-1}; B M^{-1}, I] with P_l = I, so the
/// right-hand side is unchanged and residual norms of both systems coincide.
PreconditionedProblem build_preconditioned_system(const MatrixBlocks& blocks,
                                                  Vector b_star, Vector c_star);

/// (x_star, y_star) = P_r^{-1} (x, y) = (M \ x, N \ y)
std::pair<Vector, Vector> recover_solution(const BlockJacobiPreconditioner& prec,
                                           std::span<const double> x,
                                           std::span<const double> y);

}  // namespace gpmr
