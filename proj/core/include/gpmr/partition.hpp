#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <vector>

#include "gpmr/sparse_matrix.hpp"

namespace gpmr {

class PartitionError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Symmetric 2-way split of an order m+n matrix. New position i holds the
/// original row/column perm[i]; positions [0, m) form the first block.
struct BlockSplit {
  std::vector<std::size_t> perm;
  std::size_t m = 0;
  std::size_t n = 0;

  static BlockSplit identity(std::size_t m, std::size_t n);

  /// Throws PartitionError unless perm is a bijection of 0..m+n-1 with
  /// m, n >= 1.
  void validate() const;
};

/// Two-way vertex split of the symmetrized adjacency graph of `c`.
///
/// Each connected component is ordered by breadth-first level sets rooted at
/// a pseudo-peripheral vertex (George-Liu search); components are
/// concatenated and the ordering is cut at ceil(N/2), so the cut falls inside
/// one level set and |m - n| <= 1.
BlockSplit bisect_graph(const SparseMatrix& c);

/// Permutation file: first line `m n`, then m+n lines with one 0-based index.
BlockSplit read_permutation(std::istream& in);
BlockSplit read_permutation(const std::filesystem::path& path);
void write_permutation(std::ostream& out, const BlockSplit& split);
void write_permutation(const std::filesystem::path& path, const BlockSplit& split);

}  // namespace gpmr
