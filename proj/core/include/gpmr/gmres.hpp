#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gpmr/block_system.hpp"
#include "gpmr/linear_operator.hpp"
#include "gpmr/solve_report.hpp"

namespace gpmr {

/// Arnoldi process with modified Gram-Schmidt: K V_k = V_{k+1} H_{k+1,k}.
class ArnoldiProcess {
 public:
  ArnoldiProcess(LinearOperator k_op, std::span<const double> d, std::size_t capacity);

  /// Returns false once an invariant subspace has been found.
  bool step(bool reorthogonalize);

  std::size_t steps() const { return k_; }
  std::size_t order() const { return dim_; }
  double beta0() const { return beta0_; }
  bool invariant() const { return invariant_; }
  std::size_t basis_size() const { return basis_.size() / dim_; }
  std::span<const double> v(std::size_t i) const;  // 1-based
  /// Column j of H_{j+1,j}: entries h(1..j+1, j).
  std::span<const double> h_column(std::size_t j) const { return h_cols_.at(j - 1); }
  double h(std::size_t i, std::size_t j) const;

 private:
  LinearOperator k_op_;
  std::size_t dim_;
  double beta0_;
  std::size_t k_ = 0;
  bool invariant_ = false;
  std::vector<double> basis_;
  std::vector<std::vector<double>> h_cols_;
};

/// Full (unrestarted) GMRES on K x = d. The default iteration limit is the
/// order of K.
SolveReport gmres_solve(const LinearOperator& k_op, std::span<const double> d,
                        const SolverOptions& opt = {});

/// GMRES on the stacked system; the report splits the solution into (x, y).
SolveReport gmres_solve(const PartitionedSystem& sys, const SolverOptions& opt = {});

}  // namespace gpmr
