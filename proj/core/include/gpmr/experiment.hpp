#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "gpmr/block_system.hpp"
#include "gpmr/solve_report.hpp"

namespace gpmr::experiment {

enum class Method { gpmr, gmres, block_gmres };
enum class Preconditioning { block_jacobi, none };

std::string to_string(Method m);
/// Accepts "gpmr", "gmres", "block-gmres".
Method parse_method(const std::string& name);

/// Process exit codes of the harness.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 1;     // unreadable or malformed input files
inline constexpr int kExitSingularBlock = 2;  // a diagonal block cannot be factored
inline constexpr int kExitNotConverged = 3;   // some selected method did not converge
inline constexpr int kExitUsage = 64;         // bad command line

class ExperimentError : public std::runtime_error {
 public:
  ExperimentError(int exit_code, const std::string& what)
      : std::runtime_error(what), exit_code_(exit_code) {}
  int exit_code() const { return exit_code_; }

 private:
  int exit_code_;
};

struct ExperimentConfig {
  std::filesystem::path matrix_path;
  /// Empty selects the built-in bisection; otherwise a permutation file.
  std::optional<std::filesystem::path> partition_path;
  Preconditioning preconditioning = Preconditioning::block_jacobi;
  /// Diagonal shifts; only used with Preconditioning::none, where the
  /// diagonal blocks of the matrix are replaced by lambda I and mu I.
  double lambda = 1.0;
  double mu = 1.0;
  std::vector<Method> methods{Method::gpmr, Method::gmres};
  double atol = 1e-12;
  double rtol = 1e-10;
  std::size_t max_iterations = 0;  // 0: each solver's default
  std::optional<std::filesystem::path> history_out;
  /// Right-hand side override: m+n values, original ordering, one per line.
  std::optional<std::filesystem::path> rhs_path;
  std::optional<std::filesystem::path> save_partition;
  bool reorthogonalize = false;
  /// Run the selected methods concurrently (each with its own workspace).
  bool parallel = false;

  /// Throws ExperimentError(kExitUsage) when inconsistent.
  void validate() const;
};

/// (b_star, c_star) = [M A; B N] * ones
std::pair<Vector, Vector> generate_rhs(const MatrixBlocks& blocks);

struct MethodResult {
  Method method;
  SolveStatus status;
  std::size_t iterations = 0;
  std::size_t matvec_count = 0;
  double residual_estimate = 0.0;  // last entry of the recurrence history
  /// ||(b_star, c_star) - C (x_star, y_star)|| on the unpreconditioned system.
  double true_residual = 0.0;
  /// ||(x_star, y_star) - ones||_inf; meaningful for the generated RHS.
  double ones_error = 0.0;
  double wall_seconds = 0.0;
  std::vector<double> residual_history;
  Vector x_star;  // original (unpermuted) ordering, full length m+n
};

struct ExperimentReport {
  std::string matrix_name;
  std::size_t order = 0;
  std::size_t nnz = 0;
  std::size_t m = 0;
  std::size_t n = 0;
  double rhs_norm = 0.0;
  std::vector<MethodResult> results;

  bool all_converged() const;
  int exit_code() const { return all_converged() ? kExitOk : kExitNotConverged; }
};

/// Loads, partitions, preconditions and solves. Throws ExperimentError with
/// kExitInputError or kExitSingularBlock for the corresponding failures.
ExperimentReport run_experiment(const ExperimentConfig& cfg);

/// Fixed-width summary table, one row per method.
void print_summary(std::ostream& out, const ExperimentReport& report);

using NamedHistory = std::pair<std::string, std::vector<double>>;

/// CSV with header `iteration,method,residual_norm`, 17 significant digits,
/// rows grouped by method in the given order.
void write_history_csv(std::ostream& out, const std::vector<NamedHistory>& histories);
void write_history_csv(const std::filesystem::path& path,
                       const std::vector<NamedHistory>& histories);
std::vector<NamedHistory> read_history_csv(std::istream& in);

}  // namespace gpmr::experiment
