#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gpmr/block_system.hpp"
#include "gpmr/linear_operator.hpp"
#include "gpmr/solve_report.hpp"

namespace gpmr {

struct BlockGmresReport {
  SolveReport first;   // right-hand side D(:, 1)
  SolveReport second;  // right-hand side D(:, 2)
  /// Residual norm of the summed iterate, ||D(:,1) + D(:,2) - K (X1 + X2)||,
  /// per iteration. This is the quantity the stopping rule is applied to.
  std::vector<double> summed_residual_history;
  SolveStatus status = SolveStatus::max_iterations;
  std::size_t iterations = 0;
  std::size_t matvec_count = 0;  // two products with K per iteration
};

/// Block-GMRES with block size 2: minimizes ||D - K X||_F over the block
/// Krylov subspace of (K, D). Stops when the summed residual satisfies
/// ||r|| <= atol + rtol * ||d1 + d2||. Each column's status uses the same rule
/// with its own right-hand side norm. Basis columns lost to a rank deficiency
/// are dropped from the least-squares problem. The default iteration limit is
/// ceil(dim / 2).
BlockGmresReport block_gmres_solve(const LinearOperator& k_op, std::span<const double> d1,
                                   std::span<const double> d2,
                                   const SolverOptions& opt = {});

/// Block-GMRES on the partitioned system with D = [b 0; 0 c]; each column's
/// solution is split into (x, y). The default limit is min(m, n), plus one
/// when m != n.
BlockGmresReport block_gmres_solve(const PartitionedSystem& sys,
                                   const SolverOptions& opt = {});

}  // namespace gpmr
