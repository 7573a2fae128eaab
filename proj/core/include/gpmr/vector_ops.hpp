#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace gpmr {

using Vector = std::vector<double>;

double dot(std::span<const double> x, std::span<const double> y);
double norm2(std::span<const double> x);

// y += alpha * x
void axpy(double alpha, std::span<const double> x, std::span<double> y);
void scale(double alpha, std::span<double> x);

// Euclidean norm of the concatenation (x, y).
double stacked_norm(std::span<const double> x, std::span<const double> y);

double max_abs_diff(std::span<const double> x, std::span<const double> y);

}  // namespace gpmr
