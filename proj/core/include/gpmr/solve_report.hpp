#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "gpmr/vector_ops.hpp"

namespace gpmr {

enum class SolveStatus {
  converged,
  max_iterations,
  exhausted,  // the Krylov process ran out of new directions
};

std::string_view to_string(SolveStatus s);

struct SolverOptions {
  double atol = 1e-12;
  double rtol = 1e-10;
  /// 0 selects the method's natural limit (min(m, n) for GPMR).
  std::size_t max_iterations = 0;
  bool reorthogonalize = false;
  /// Materialize the iterate and its true residual at every iteration.
  /// Costs a back substitution and a product per step; testing only.
  bool diagnostics = false;
};

/// Stops once ||r_k|| <= atol + rtol * ||rhs||.
double stopping_threshold(const SolverOptions& opt, double rhs_norm);

/// Throws std::invalid_argument for negative tolerances or both zero.
void validate_tolerances(const SolverOptions& opt);

struct SolveReport {
  Vector x;  // first block (or the whole solution for unpartitioned solves)
  Vector y;  // second block; empty for unpartitioned solves
  SolveStatus status = SolveStatus::max_iterations;
  /// ||r_0||, ..., ||r_k|| as produced by the method's recurrence.
  std::vector<double> residual_history;
  std::size_t iterations = 0;
  /// Products with K, i.e. one A and one B application each.
  std::size_t matvec_count = 0;

  // Filled only with SolverOptions::diagnostics.
  std::vector<double> true_residual_history;
  std::vector<Vector> iterate_history;  // stacked (x_k, y_k), k = 0..iterations

  bool converged() const { return status == SolveStatus::converged; }
};

}  // namespace gpmr
