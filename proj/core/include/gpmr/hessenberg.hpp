#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "gpmr/linear_operator.hpp"

namespace gpmr {

class InitializationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A remainder is treated as zero when its norm is at or below this multiple
/// of the norm of the product before orthogonalization.
inline constexpr double kBreakdownTolerance = 1e-14;

struct BreakdownFlags {
  bool v_side = false;  // h_{k+1,k} = 0
  bool u_side = false;  // f_{k+1,k} = 0
};

/// Orthogonal Hessenberg reduction of the pair (A, B).
///
/// Builds orthonormal V_{k+1} (m-vectors) and U_{k+1} (n-vectors) from
/// v_1 = b / beta, u_1 = c / gamma, such that
///
///   A U_k = V_{k+1} H_{k+1,k},    B V_k = U_{k+1} F_{k+1,k},
///
/// with H and F upper Hessenberg and nonnegative subdiagonals. One step costs
/// one product with A and one with B.
///
/// Indices in the accessors are 1-based to match the usual notation:
/// v(1) is the normalized b, h(i, j) is row i of column j.
class HessenbergProcess {
 public:
  /// `capacity` is the largest number of steps storage is reserved for.
  /// Throws InitializationError if b or c is zero.
  HessenbergProcess(LinearOperator a, LinearOperator b, std::span<const double> rhs_b,
                    std::span<const double> rhs_c, std::size_t capacity);

  /// Performs step k+1. Returns false, leaving the state unchanged, once the
  /// process is exhausted.
  ///
  /// With `reorthogonalize`, a second modified Gram-Schmidt pass is made and
  /// its coefficients are folded into the Hessenberg columns.
  bool step(bool reorthogonalize);

  std::size_t m() const { return m_; }
  std::size_t n() const { return n_; }
  std::size_t steps() const { return k_; }
  std::size_t capacity() const { return capacity_; }
  double beta() const { return beta_; }
  double gamma() const { return gamma_; }

  /// True when the last step could not extend one of the bases because it is
  /// already complete (k = m or k = n). The last Hessenberg columns are still
  /// valid; the offending subdiagonal is zero.
  bool exhausted() const { return exhausted_; }

  std::span<const double> v(std::size_t i) const;
  std::span<const double> u(std::size_t i) const;
  /// Number of stored basis vectors on each side: steps() + 1, or steps()
  /// on a side whose basis was already complete at exhaustion.
  std::size_t v_count() const { return v_.size() / m_; }
  std::size_t u_count() const { return u_.size() / n_; }

  double h(std::size_t i, std::size_t j) const;
  double f(std::size_t i, std::size_t j) const;
  /// Column j of H_{j+1,j}: entries h(1..j+1, j).
  std::span<const double> h_column(std::size_t j) const { return h_cols_.at(j - 1); }
  std::span<const double> f_column(std::size_t j) const { return f_cols_.at(j - 1); }
  BreakdownFlags breakdown(std::size_t j) const { return flags_.at(j - 1); }

  std::size_t matvec_count() const { return matvecs_; }

  /// Once exhausted with bases of unequal length, the longer side holds one
  /// vector without a partner: v_{k+1} when U_k spans R^n, or u_{k+1} when
  /// V_k spans R^m. Its image lies in the complete basis of the other side,
  ///   B v_{k+1} = U_k g   or   A u_{k+1} = V_k g,
  /// and `coefficients` holds g. The product is counted as one matvec.
  struct ClosingColumn {
    bool v_side;  // true: the dangling vector is v_{k+1}
    std::vector<double> coefficients;
  };
  /// Returns nullopt when the process is not exhausted or nothing dangles.
  std::optional<ClosingColumn> closing_column();

 private:
  // Orthogonalizes `w` against the first `count` columns of `basis` (two
  // passes) and returns whether a usable unit remainder was found.
  bool replacement_vector(const std::vector<double>& basis, std::size_t dim,
                          std::size_t count, std::vector<double>& w) const;

  LinearOperator a_;
  LinearOperator b_;
  std::size_t m_;
  std::size_t n_;
  std::size_t capacity_;
  std::size_t k_ = 0;
  double beta_ = 0.0;
  double gamma_ = 0.0;
  bool exhausted_ = false;
  std::size_t matvecs_ = 0;

  std::vector<double> v_;  // column-major m x (k+1)
  std::vector<double> u_;  // column-major n x (k+1)
  std::vector<std::vector<double>> h_cols_;
  std::vector<std::vector<double>> f_cols_;
  std::vector<BreakdownFlags> flags_;
  std::vector<double> q_;
  std::vector<double> p_;
};

}  // namespace gpmr
