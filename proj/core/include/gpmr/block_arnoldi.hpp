#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "gpmr/linear_operator.hpp"

namespace gpmr {

/// Row-major 2x2 block.
using Block2 = std::array<double, 4>;

/// Block-Arnoldi with block size 2: K W_k = W_{k+1} S_{k+1,k}.
///
/// Generic dense implementation that does not assume any sparsity of the
/// basis. Each w_k = [w_k1 w_k2] has orthonormal columns; w_1 Gamma = D
/// with Gamma upper triangular. A new remainder pair [z1 z2] is orthonormalized
/// second column first, so that w_{k+1} = [q(z2), q(z1 - proj)] and the
/// subdiagonal block is S_{k+1,k} = w_{k+1}^T [z1 z2].
class BlockArnoldi {
 public:
  BlockArnoldi(LinearOperator k_op, std::span<const double> d1,
               std::span<const double> d2, std::size_t capacity);

  /// Returns false when the basis cannot be extended: both columns of the
  /// last block are zero.
  bool step(bool reorthogonalize);

  std::size_t steps() const { return k_; }
  std::size_t order() const { return dim_; }
  const Block2& gamma() const { return gamma_; }

  /// Column j (0 or 1) of w_i, 1-based i.
  std::span<const double> w(std::size_t i, std::size_t j) const;
  /// False for a column zeroed after a rank deficiency.
  bool active(std::size_t i, std::size_t j) const;
  std::size_t block_count() const { return basis_.size() / (2 * dim_); }

  /// Block (i, j) of S_{k+1,k}, 1-based; zero outside the stored pattern.
  Block2 s(std::size_t i, std::size_t j) const;

  /// Columns whose remainder vanished and were replaced by zero.
  std::size_t rank_deficiencies() const { return deficient_; }

 private:
  LinearOperator k_op_;
  std::size_t dim_;
  Block2 gamma_{};
  std::size_t k_ = 0;
  std::size_t deficient_ = 0;
  std::vector<double> basis_;            // 2*(k+1) columns of length dim
  std::vector<std::vector<Block2>> s_;  // s_[j-1][i-1] = S(i, j), i = 1..j+1
};

}  // namespace gpmr
