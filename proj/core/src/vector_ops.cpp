#include "gpmr/vector_ops.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>

namespace gpmr {

double dot(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  double s = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
  return s;
}

double norm2(std::span<const double> x) {
  // Scaled accumulation so huge or tiny entries do not overflow/underflow.
  double scale_ = 0.0;
  double ssq = 1.0;
  for (double v : x) {
    if (v == 0.0) continue;
    const double a = std::abs(v);
    if (scale_ < a) {
      ssq = 1.0 + ssq * (scale_ / a) * (scale_ / a);
      scale_ = a;
    } else {
      ssq += (a / scale_) * (a / scale_);
    }
  }
  return scale_ * std::sqrt(ssq);
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  assert(x.size() == y.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

void scale(double alpha, std::span<double> x) {
  for (double& v : x) v *= alpha;
}

double stacked_norm(std::span<const double> x, std::span<const double> y) {
  return std::hypot(norm2(x), norm2(y));
}

double max_abs_diff(std::span<const double> x, std::span<const double> y) {
  assert(x.size() == y.size());
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) m = std::max(m, std::abs(x[i] - y[i]));
  return m;
}

}  // namespace gpmr
