#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "gpmr/block_system.hpp"
#include "gpmr/givens.hpp"
#include "gpmr/hessenberg.hpp"
#include "gpmr/solve_report.hpp"

namespace gpmr {

/// Storage in use after k iterations, counted in reals.
struct MemoryFootprint {
  std::size_t solution = 0;  // (x_k, y_k): m + n
  std::size_t work = 0;      // (q, p): m + n
  std::size_t basis = 0;     // (V_k, U_k): k(m + n)
  std::size_t t = 0;         // t_k: 2k
  std::size_t z = 0;         // z_k: 2k, in the same storage as t_k
  std::size_t givens = 0;    // Q_k: 8k
  std::size_t r = 0;         // R_k: k(2k + 1)
};

/// State of a GPMR solve: the Hessenberg process, the QR factors of
/// S_{k+1,k} and the transformed right-hand side.
///
/// R_k is 2k x 2k upper triangular; each iteration appends two columns. The
/// vector tbar holds (tau_1, ..., tau_2k, taubar_{2k+1}, taubar_{2k+2}).
class GpmrWorkspace {
 public:
  GpmrWorkspace(const PartitionedSystem& sys, std::size_t k_max, bool reorthogonalize);

  /// Runs iteration k+1. Returns false when the process was already
  /// exhausted or the iteration budget is used up.
  bool iterate();

  /// After exhaustion with bases of unequal length, adds the one remaining
  /// basis vector as a final column of the subproblem. The enlarged subspace
  /// is invariant under K, so the new residual is zero up to rounding.
  /// Returns false when there is nothing to add.
  bool close();
  bool closed() const { return closed_; }

  std::size_t iterations() const { return k_; }
  std::size_t capacity() const { return k_max_; }
  double residual_norm() const { return residual_; }
  bool exhausted() const { return process_.exhausted(); }

  const HessenbergProcess& process() const { return process_; }
  const GivensBank& givens_bank() const { return bank_; }
  const PackedUpperTriangular& r_factor() const { return r_; }
  std::span<const double> tbar() const {
    return std::span<const double>(tbar_).first(2 * k_ + 2);
  }
  /// Number of unknowns in the subproblem: 2k, plus one once closed.
  std::size_t subproblem_size() const { return 2 * k_ + (closed_ ? 1 : 0); }

  /// Solves R_k z = t_k into a fresh vector, leaving the workspace intact.
  Vector solve_subproblem() const;
  /// Solves R_k z = t_k in place over the t_k storage. After this call the
  /// workspace must not iterate further.
  std::span<const double> solve_subproblem_in_place();

  /// x_k = sum zeta_{2i-1} v_i, y_k = sum zeta_{2i} u_i, plus the closing
  /// vector weighted by the last entry of z when closed.
  void assemble_iterate(std::span<const double> z, std::span<double> x,
                        std::span<double> y) const;

  MemoryFootprint memory() const;

 private:
  double lambda_;
  double mu_;
  std::size_t m_;
  std::size_t n_;
  std::size_t k_max_;
  bool reorth_;
  HessenbergProcess process_;
  GivensBank bank_;
  PackedUpperTriangular r_;
  std::vector<double> tbar_;
  std::size_t k_ = 0;
  double residual_ = 0.0;
  bool solved_ = false;
  bool closed_ = false;
  bool closing_v_side_ = false;
  // Column buffers for the two new columns of S_{k+1,k}.
  std::vector<double> col_odd_;
  std::vector<double> col_even_;
};

/// Minimum-residual solve of [lambda I, A; B, mu I] (x, y) = (b, c) over the
/// block Krylov subspace generated from (b, 0) and (0, c).
///
/// The iterate is formed only at termination unless diagnostics are on.
/// By default the process runs until it is exhausted at min(m, n) steps; when
/// m != n one closing step follows, which completes a K-invariant subspace.
SolveReport gpmr_solve(const PartitionedSystem& sys, const SolverOptions& opt = {});

}  // namespace gpmr
