#include "gpmr/block_arnoldi.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "gpmr/hessenberg.hpp"

namespace gpmr {
namespace {

// Orthonormalizes (first, second) in that order by two-pass Gram-Schmidt.
// Returns the 2x2 upper triangular factor [r11 r12; 0 r22]. A column whose
// remainder is negligible relative to `scale_i` (its norm before any
// orthogonalization) is set to zero.
Block2 two_column_qr(std::span<double> first, std::span<double> second, double scale1,
                     double scale2, std::size_t& deficient) {
  Block2 r{};
  const double n1 = norm2(first);
  if (n1 == 0.0 || n1 <= kBreakdownTolerance * scale1) {
    std::fill(first.begin(), first.end(), 0.0);
    ++deficient;
  } else {
    r[0] = n1;
    scale(1.0 / n1, first);
  }
  for (int pass = 0; pass < 2; ++pass) {
    const double c = dot(first, second);
    axpy(-c, first, second);
    r[1] += c;
  }
  const double n2 = norm2(second);
  if (n2 == 0.0 || n2 <= kBreakdownTolerance * scale2) {
    std::fill(second.begin(), second.end(), 0.0);
    ++deficient;
  } else {
    r[3] = n2;
    scale(1.0 / n2, second);
  }
  return r;
}

}  // namespace

BlockArnoldi::BlockArnoldi(LinearOperator k_op, std::span<const double> d1,
                           std::span<const double> d2, std::size_t capacity)
    : k_op_(std::move(k_op)), dim_(k_op_.nrows()) {
  if (k_op_.ncols() != dim_ || d1.size() != dim_ || d2.size() != dim_)
    throw DimensionError("BlockArnoldi: K must be square and match D");
  if (norm2(d1) == 0.0 || norm2(d2) == 0.0)
    throw InitializationError("BlockArnoldi: both columns of D must be nonzero");
  basis_.reserve(2 * (capacity + 1) * dim_);
  s_.reserve(capacity);
  basis_.assign(d1.begin(), d1.end());
  basis_.insert(basis_.end(), d2.begin(), d2.end());
  std::span<double> all(basis_);
  gamma_ = two_column_qr(all.first(dim_), all.subspan(dim_), norm2(d1), norm2(d2), deficient_);
}

std::span<const double> BlockArnoldi::w(std::size_t i, std::size_t j) const {
  if (i == 0 || i > block_count() || j > 1) throw std::out_of_range("BlockArnoldi::w");
  return std::span<const double>(basis_).subspan(((i - 1) * 2 + j) * dim_, dim_);
}

bool BlockArnoldi::active(std::size_t i, std::size_t j) const {
  const auto col = w(i, j);
  return std::any_of(col.begin(), col.end(), [](double x) { return x != 0.0; });
}

Block2 BlockArnoldi::s(std::size_t i, std::size_t j) const {
  const auto& col = s_.at(j - 1);
  return i >= 1 && i <= col.size() ? col[i - 1] : Block2{};
}

bool BlockArnoldi::step(bool reorthogonalize) {
  const std::size_t k = k_ + 1;
  if (k > block_count() || (!active(k, 0) && !active(k, 1))) return false;

  std::vector<double> z1 = k_op_.apply(w(k, 0));
  std::vector<double> z2 = k_op_.apply(w(k, 1));
  const double z1_norm0 = norm2(z1);
  const double z2_norm0 = norm2(z2);

  std::vector<Block2> col(k + 1, Block2{});
  for (int pass = 0; pass < (reorthogonalize ? 2 : 1); ++pass) {
    for (std::size_t i = 1; i <= k; ++i) {
      Block2& psi = col[i - 1];
      for (std::size_t a = 0; a < 2; ++a) {
        const auto wa = w(i, a);
        const double c1 = dot(wa, z1);
        axpy(-c1, wa, z1);
        const double c2 = dot(wa, z2);
        axpy(-c2, wa, z2);
        psi[2 * a] += c1;
        psi[2 * a + 1] += c2;
      }
    }
  }

  // w_{k+1} = [q(z2), q(z1)], S_{k+1,k} = w_{k+1}^T [z1 z2].
  const Block2 r = two_column_qr(z2, z1, z2_norm0, z1_norm0, deficient_);
  col[k] = Block2{r[1], r[0], r[3], 0.0};
  s_.push_back(std::move(col));
  basis_.insert(basis_.end(), z2.begin(), z2.end());
  basis_.insert(basis_.end(), z1.begin(), z1.end());
  k_ = k;
  return true;
}

}  // namespace gpmr
