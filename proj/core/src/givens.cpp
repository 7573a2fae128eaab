#include "gpmr/givens.hpp"

#include <cmath>

namespace gpmr {

Reflection make_reflection(double a, double b, double& r) {
  r = std::hypot(a, b);
  if (r == 0.0) return {1.0, 0.0};
  return {a / r, b / r};
}

void GivensBank::set(std::size_t i, const std::array<Reflection, 4>& g) {
  if (i == steps_.size() + 1) {
    steps_.push_back(g);
  } else if (i >= 1 && i <= steps_.size()) {
    steps_[i - 1] = g;
  } else {
    throw std::out_of_range("GivensBank::set: steps must be stored in order");
  }
}

void ref(const GivensBank& bank, std::size_t i, std::array<double, 4>& a) {
  const auto& g = bank.at(i);
  apply_reflection(g[0], a[0], a[3]);
  apply_reflection(g[1], a[0], a[1]);
  apply_reflection(g[2], a[1], a[3]);
  apply_reflection(g[3], a[1], a[2]);
}

GivensTriangle givens(GivensBank& bank, std::size_t k, double r11, double r12, double r21,
                      double r22, double h, double f) {
  std::array<Reflection, 4> g;

  // annihilate f_{k+1,k}
  double r11_bb;
  g[0] = make_reflection(r11, f, r11_bb);
  const double r12_bb = g[0].c * r12;
  const double fill = g[0].s * r12;  // row 2k+2 of column 2k

  // annihilate r_{2k,2k-1}
  GivensTriangle out{};
  g[1] = make_reflection(r11_bb, r21, out.r11);
  out.r12 = g[1].c * r12_bb + g[1].s * r22;
  const double r22_bb = g[1].s * r12_bb - g[1].c * r22;

  // annihilate the fill-in
  double r22_ring;
  g[2] = make_reflection(r22_bb, fill, r22_ring);

  // annihilate h_{k+1,k}
  g[3] = make_reflection(r22_ring, h, out.r22);

  bank.set(k, g);
  return out;
}

void PackedUpperTriangular::append_column(std::span<const double> column) {
  if (column.size() != order_ + 1)
    throw std::invalid_argument("PackedUpperTriangular: column " +
                                std::to_string(order_ + 1) + " needs " +
                                std::to_string(order_ + 1) + " entries");
  data_.insert(data_.end(), column.begin(), column.end());
  ++order_;
}

void backward_substitution(const PackedUpperTriangular& r, std::size_t p,
                           std::span<double> t) {
  if (p > r.order() || t.size() < p)
    throw std::invalid_argument("backward_substitution: dimension mismatch");
  for (std::size_t i = p; i >= 1; --i) {
    const double d = r(i, i);
    if (d == 0.0) throw SingularSubproblemError(i);
    double s = t[i - 1];
    for (std::size_t j = i + 1; j <= p; ++j) s -= r(i, j) * t[j - 1];
    t[i - 1] = s / d;
  }
}

}  // namespace gpmr
