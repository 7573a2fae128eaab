#include "gpmr/matrix_market.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <optional>
#include <sstream>
#include <vector>

namespace gpmr {
namespace {

using Kind = MatrixMarketError::Kind;

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    const std::size_t start = i;
    while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
    if (i > start) out.push_back(line.substr(start, i - start));
  }
  return out;
}

template <class T>
std::optional<T> parse_number(std::string_view tok) {
  T value{};
  const char* first = tok.data();
  const char* last = tok.data() + tok.size();
  if (!tok.empty() && tok.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) return std::nullopt;
  return value;
}

class LineReader {
 public:
  explicit LineReader(std::string_view text) : text_(text) {}

  std::optional<std::string_view> next() {
    if (pos_ >= text_.size()) return std::nullopt;
    const std::size_t end = text_.find('\n', pos_);
    std::string_view line = text_.substr(pos_, end == std::string_view::npos
                                                   ? std::string_view::npos
                                                   : end - pos_);
    pos_ = end == std::string_view::npos ? text_.size() : end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no_;
    return line;
  }

  std::size_t line_no() const { return line_no_; }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_no_ = 0;
};

bool blank(std::string_view line) {
  return std::all_of(line.begin(), line.end(),
                     [](unsigned char c) { return std::isspace(c); });
}

}  // namespace

SparseMatrix parse_matrix_market(std::string_view text) {
  LineReader reader(text);
  const auto banner = reader.next();
  if (!banner) throw MatrixMarketError(Kind::malformed_header, "empty Matrix Market input");

  const auto head = split_ws(*banner);
  if (head.size() != 5 || lower(head[0]) != "%%matrixmarket")
    throw MatrixMarketError(Kind::malformed_header,
                            "expected '%%MatrixMarket matrix <format> <field> <symmetry>'");
  if (lower(head[1]) != "matrix")
    throw MatrixMarketError(Kind::unsupported_kind,
                            "unsupported object '" + std::string(head[1]) + "'");
  if (lower(head[2]) != "coordinate")
    throw MatrixMarketError(Kind::unsupported_kind,
                            "unsupported format '" + std::string(head[2]) + "'");

  const std::string field = lower(head[3]);
  const bool pattern = field == "pattern";
  if (field != "real" && field != "integer" && !pattern)
    throw MatrixMarketError(Kind::unsupported_kind,
                            "unsupported field '" + std::string(head[3]) + "'");
  const std::string symmetry = lower(head[4]);
  const bool symmetric = symmetry == "symmetric";
  if (symmetry != "general" && !symmetric)
    throw MatrixMarketError(Kind::unsupported_kind,
                            "unsupported symmetry '" + std::string(head[4]) + "'");

  std::optional<std::string_view> line;
  while ((line = reader.next()) && (blank(*line) || line->front() == '%')) {
  }
  if (!line) throw MatrixMarketError(Kind::malformed_header, "missing size line");

  const auto size_tok = split_ws(*line);
  std::optional<std::size_t> nrows, ncols, nentries;
  if (size_tok.size() == 3) {
    nrows = parse_number<std::size_t>(size_tok[0]);
    ncols = parse_number<std::size_t>(size_tok[1]);
    nentries = parse_number<std::size_t>(size_tok[2]);
  }
  if (!nrows || !ncols || !nentries)
    throw MatrixMarketError(Kind::malformed_header,
                            "size line must read '<rows> <cols> <entries>'");
  if (symmetric && *nrows != *ncols)
    throw MatrixMarketError(Kind::malformed_header, "symmetric matrix must be square");

  std::vector<Triplet> entries;
  entries.reserve(symmetric ? 2 * *nentries : *nentries);
  std::size_t seen = 0;
  const std::size_t expected_tokens = pattern ? 2 : 3;
  while ((line = reader.next())) {
    if (blank(*line) || line->front() == '%') continue;
    const auto tok = split_ws(*line);
    if (seen == *nentries)
      throw MatrixMarketError(Kind::malformed_entry,
                              "more entries than declared (line " +
                                  std::to_string(reader.line_no()) + ")");
    if (tok.size() != expected_tokens)
      throw MatrixMarketError(Kind::malformed_entry,
                              "wrong number of fields on line " +
                                  std::to_string(reader.line_no()));
    const auto i = parse_number<long long>(tok[0]);
    const auto j = parse_number<long long>(tok[1]);
    std::optional<double> v = 1.0;
    if (!pattern) v = parse_number<double>(tok[2]);
    if (!i || !j || !v)
      throw MatrixMarketError(Kind::malformed_entry,
                              "unparsable entry on line " + std::to_string(reader.line_no()));
    if (*i < 1 || *j < 1 || static_cast<std::size_t>(*i) > *nrows ||
        static_cast<std::size_t>(*j) > *ncols)
      throw MatrixMarketError(Kind::index_out_of_range,
                              "entry (" + std::to_string(*i) + ", " + std::to_string(*j) +
                                  ") outside " + std::to_string(*nrows) + "x" +
                                  std::to_string(*ncols) + " on line " +
                                  std::to_string(reader.line_no()));
    const auto r = static_cast<std::size_t>(*i - 1);
    const auto c = static_cast<std::size_t>(*j - 1);
    entries.push_back({r, c, *v});
    if (symmetric && r != c) entries.push_back({c, r, *v});
    ++seen;
  }
  if (seen != *nentries)
    throw MatrixMarketError(Kind::malformed_entry,
                            "expected " + std::to_string(*nentries) + " entries, found " +
                                std::to_string(seen));
  return SparseMatrix::from_triplets(*nrows, *ncols, entries);
}

SparseMatrix read_matrix_market(std::istream& in) {
  const std::string text{std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
  return parse_matrix_market(text);
}

SparseMatrix read_matrix_market(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MatrixMarketError(Kind::io, "cannot open '" + path.string() + "'");
  return read_matrix_market(in);
}

void write_matrix_market(std::ostream& out, const SparseMatrix& m) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << m.nrows() << ' ' << m.ncols() << ' ' << m.nnz() << '\n';
  char buf[64];
  for (std::size_t i = 0; i < m.nrows(); ++i) {
    const auto cols = m.row_cols(i);
    const auto vals = m.row_values(i);
    for (std::size_t p = 0; p < cols.size(); ++p) {
      std::snprintf(buf, sizeof buf, "%.17g", vals[p]);
      out << i + 1 << ' ' << cols[p] + 1 << ' ' << buf << '\n';
    }
  }
}

void write_matrix_market(const std::filesystem::path& path, const SparseMatrix& m) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw MatrixMarketError(Kind::io, "cannot write '" + path.string() + "'");
  write_matrix_market(out, m);
  if (!out) throw MatrixMarketError(Kind::io, "write failed for '" + path.string() + "'");
}

}  // namespace gpmr
