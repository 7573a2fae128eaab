#pragma once

#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <string_view>

#include "gpmr/sparse_matrix.hpp"

namespace gpmr {

class MatrixMarketError : public std::runtime_error {
 public:
  enum class Kind {
    malformed_header,   // banner, object/format line or size line unreadable
    unsupported_kind,   // complex/hermitian/array and similar
    index_out_of_range, // coordinate outside the declared shape
    malformed_entry,    // entry line unparsable or wrong entry count
    io,                 // file could not be opened or written
  };

  MatrixMarketError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

/// Parses coordinate-format Matrix Market text.
///
/// Supported fields are `real`, `integer` and `pattern` (pattern entries get
/// the value 1.0); symmetry is `general` or `symmetric`, the latter expanded
/// to full storage. Duplicate coordinates are summed.
SparseMatrix parse_matrix_market(std::string_view text);
SparseMatrix read_matrix_market(std::istream& in);
SparseMatrix read_matrix_market(const std::filesystem::path& path);

/// Writes `coordinate real general`, 1-based, 17 significant digits.
void write_matrix_market(std::ostream& out, const SparseMatrix& m);
void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& m);

}  // namespace gpmr
