#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace gpmr {

/// Givens reflection [c s; s -c]. Symmetric and orthogonal, so it is its own
/// inverse.
struct Reflection {
  double c = 1.0;
  double s = 0.0;
};

/// Reflection mapping (a, b) to (r, 0) with r = ||(a, b)|| >= 0. When a and
/// b are both zero, returns (c, s) = (1, 0) and r = 0.
Reflection make_reflection(double a, double b, double& r);

inline void apply_reflection(const Reflection& g, double& x, double& y) {
  const double t = g.c * x + g.s * y;
  y = g.s * x - g.c * y;
  x = t;
}

/// The four reflections making up each 4x4 orthogonal block of Q_k^T,
/// acting on rows (2i-1, 2i, 2i+1, 2i+2) of step i:
///   1st on (1, 4), 2nd on (1, 2), 3rd on (2, 4), 4th on (2, 3).
class GivensBank {
 public:
  void reserve(std::size_t steps) { steps_.reserve(steps); }
  std::size_t steps() const { return steps_.size(); }
  /// Number of stored cosines and sines: 8 per step.
  std::size_t coefficient_count() const { return 8 * steps_.size(); }

  /// Reflections of step i (1-based).
  const std::array<Reflection, 4>& at(std::size_t i) const { return steps_.at(i - 1); }
  std::array<Reflection, 4>& at(std::size_t i) { return steps_.at(i - 1); }

  /// Stores the reflections of step i; steps must be set in order.
  void set(std::size_t i, const std::array<Reflection, 4>& g);

 private:
  std::vector<std::array<Reflection, 4>> steps_;
};

/// Applies the 4x4 block of step i to (a1, a2, a3, a4) in place.
void ref(const GivensBank& bank, std::size_t i, std::array<double, 4>& a);

struct GivensTriangle {
  double r11;  // r_{2k-1,2k-1}
  double r12;  // r_{2k-1,2k}
  double r22;  // r_{2k,2k}
};

/// Computes and stores the reflections of step k that reduce the trailing
/// 2x2 block (r11, r12; r21, r22) together with h = h_{k+1,k} in row 2k+1 of
/// column 2k and f = f_{k+1,k} in row 2k+2 of column 2k-1. Annihilates, in
/// order, f, r21, the fill-in created in row 2k+2 of column 2k, and h.
GivensTriangle givens(GivensBank& bank, std::size_t k, double r11, double r12, double r21,
                      double r22, double h, double f);

class SingularSubproblemError : public std::runtime_error {
 public:
  explicit SingularSubproblemError(std::size_t index)
      : std::runtime_error("zero diagonal entry in triangular factor at index " +
                           std::to_string(index)),
        index_(index) {}

  /// 1-based row of the zero diagonal entry.
  std::size_t index() const { return index_; }

 private:
  std::size_t index_;
};

/// Upper triangular matrix packed column by column: column j (1-based) holds
/// rows 1..j, so an order-p matrix stores p(p+1)/2 values.
class PackedUpperTriangular {
 public:
  void reserve(std::size_t order) { data_.reserve(order * (order + 1) / 2); }

  std::size_t order() const { return order_; }
  std::size_t stored() const { return data_.size(); }

  /// Appends the next column; `column` must have order()+1 entries.
  void append_column(std::span<const double> column);

  double operator()(std::size_t i, std::size_t j) const {
    return i <= j ? data_[j * (j - 1) / 2 + i - 1] : 0.0;
  }

 private:
  std::vector<double> data_;
  std::size_t order_ = 0;
};

/// Solves R(1:p, 1:p) z = t in place over the first p entries of `t`.
/// Throws SingularSubproblemError on a zero diagonal entry.
void backward_substitution(const PackedUpperTriangular& r, std::size_t p,
                           std::span<double> t);

}  // namespace gpmr
