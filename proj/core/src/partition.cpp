#include "gpmr/partition.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>
#include <string>

namespace gpmr {
namespace {

using Graph = std::vector<std::vector<std::size_t>>;

Graph symmetrized_graph(const SparseMatrix& c) {
  const std::size_t n = c.nrows();
  Graph adj(n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j : c.row_cols(i)) {
      if (i == j) continue;
      adj[i].push_back(j);
      adj[j].push_back(i);
    }
  }
  for (auto& nbrs : adj) {
    std::sort(nbrs.begin(), nbrs.end());
    nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
  }
  return adj;
}

struct LevelStructure {
  std::vector<std::size_t> order;        // BFS visiting order
  std::vector<std::size_t> level_start;  // offsets into order, one per level + end
};

// Neighbors are visited by increasing degree, ties by index.
LevelStructure bfs_levels(const Graph& adj, std::size_t root, std::vector<int>& mark,
                          int stamp) {
  LevelStructure ls;
  ls.order.push_back(root);
  ls.level_start = {0, 1};
  mark[root] = stamp;
  std::vector<std::size_t> nbrs;
  while (true) {
    const std::size_t begin = ls.level_start[ls.level_start.size() - 2];
    const std::size_t end = ls.level_start.back();
    for (std::size_t p = begin; p < end; ++p) {
      nbrs.clear();
      for (std::size_t w : adj[ls.order[p]])
        if (mark[w] != stamp) nbrs.push_back(w);
      std::sort(nbrs.begin(), nbrs.end(), [&](std::size_t a, std::size_t b) {
        return adj[a].size() != adj[b].size() ? adj[a].size() < adj[b].size() : a < b;
      });
      for (std::size_t w : nbrs) {
        if (mark[w] == stamp) continue;
        mark[w] = stamp;
        ls.order.push_back(w);
      }
    }
    if (ls.order.size() == end) break;
    ls.level_start.push_back(ls.order.size());
  }
  return ls;
}

}  // namespace

BlockSplit BlockSplit::identity(std::size_t m, std::size_t n) {
  BlockSplit s;
  s.m = m;
  s.n = n;
  s.perm.resize(m + n);
  std::iota(s.perm.begin(), s.perm.end(), std::size_t{0});
  return s;
}

void BlockSplit::validate() const {
  if (m == 0 || n == 0) throw PartitionError("block split needs m >= 1 and n >= 1");
  if (perm.size() != m + n)
    throw PartitionError("permutation has " + std::to_string(perm.size()) +
                         " entries, expected m + n = " + std::to_string(m + n));
  std::vector<char> seen(perm.size(), 0);
  for (std::size_t p : perm) {
    if (p >= perm.size() || seen[p])
      throw PartitionError("permutation is not a bijection (index " + std::to_string(p) +
                           ")");
    seen[p] = 1;
  }
}

BlockSplit bisect_graph(const SparseMatrix& c) {
  const std::size_t order = c.nrows();
  if (c.ncols() != order) throw DimensionError("bisect_graph: matrix must be square");
  if (order < 2) throw PartitionError("bisect_graph: order must be at least 2");

  const Graph adj = symmetrized_graph(c);
  std::vector<int> component(order, 0);
  std::vector<int> mark(order, 0);
  int stamp = 0;

  std::vector<std::size_t> ordering;
  ordering.reserve(order);
  for (std::size_t seed = 0; seed < order; ++seed) {
    if (component[seed]) continue;

    // George-Liu pseudo-peripheral search.
    std::size_t root = seed;
    LevelStructure ls = bfs_levels(adj, root, mark, ++stamp);
    while (true) {
      const std::size_t last = ls.level_start[ls.level_start.size() - 2];
      std::size_t candidate = ls.order[last];
      for (std::size_t p = last; p < ls.order.size(); ++p) {
        const std::size_t v = ls.order[p];
        if (adj[v].size() < adj[candidate].size() ||
            (adj[v].size() == adj[candidate].size() && v < candidate))
          candidate = v;
      }
      LevelStructure trial = bfs_levels(adj, candidate, mark, ++stamp);
      if (trial.level_start.size() <= ls.level_start.size()) break;
      root = candidate;
      ls = std::move(trial);
    }
    for (std::size_t v : ls.order) {
      component[v] = 1;
      ordering.push_back(v);
    }
  }

  BlockSplit split;
  split.m = (order + 1) / 2;
  split.n = order - split.m;
  split.perm = std::move(ordering);
  return split;
}

BlockSplit read_permutation(std::istream& in) {
  BlockSplit s;
  std::string line;
  if (!std::getline(in, line)) throw PartitionError("permutation file is empty");
  {
    std::istringstream head(line);
    long long m = -1, n = -1;
    if (!(head >> m >> n) || m < 1 || n < 1)
      throw PartitionError("permutation header must read 'm n' with m, n >= 1");
    s.m = static_cast<std::size_t>(m);
    s.n = static_cast<std::size_t>(n);
  }
  s.perm.reserve(s.m + s.n);
  while (std::getline(in, line)) {
    std::istringstream row(line);
    long long idx;
    if (!(row >> idx)) {
      if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
      throw PartitionError("unparsable permutation entry '" + line + "'");
    }
    if (idx < 0) throw PartitionError("negative permutation index");
    s.perm.push_back(static_cast<std::size_t>(idx));
  }
  s.validate();
  return s;
}

BlockSplit read_permutation(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PartitionError("cannot open permutation file '" + path.string() + "'");
  return read_permutation(in);
}

void write_permutation(std::ostream& out, const BlockSplit& split) {
  out << split.m << ' ' << split.n << '\n';
  for (std::size_t p : split.perm) out << p << '\n';
}

void write_permutation(const std::filesystem::path& path, const BlockSplit& split) {
  std::ofstream out(path);
  if (!out) throw PartitionError("cannot write permutation file '" + path.string() + "'");
  write_permutation(out, split);
}

}  // namespace gpmr
