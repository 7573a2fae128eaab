#include "gpmr/solve_report.hpp"

#include <stdexcept>

namespace gpmr {

std::string_view to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::converged:
      return "converged";
    case SolveStatus::max_iterations:
      return "max_iterations";
    case SolveStatus::exhausted:
      return "exhausted";
  }
  return "unknown";
}

double stopping_threshold(const SolverOptions& opt, double rhs_norm) {
  return opt.atol + opt.rtol * rhs_norm;
}

void validate_tolerances(const SolverOptions& opt) {
  if (opt.atol < 0.0 || opt.rtol < 0.0)
    throw std::invalid_argument("tolerances must be nonnegative");
  if (opt.atol == 0.0 && opt.rtol == 0.0)
    throw std::invalid_argument("atol and rtol must not both be zero");
}

}  // namespace gpmr
