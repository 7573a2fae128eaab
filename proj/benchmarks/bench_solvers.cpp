#include <benchmark/benchmark.h>

#include <random>

#include "gpmr/block_system.hpp"
#include "gpmr/experiment.hpp"
#include "gpmr/gmres.hpp"
#include "gpmr/gpmr.hpp"
#include "gpmr/partition.hpp"
#include "gpmr/sparse_lu.hpp"
#include "gpmr/sparse_matrix.hpp"

using namespace gpmr;

namespace {

// Unsymmetric 2D convection-diffusion stencil on a side x side grid.
SparseMatrix convection_diffusion(std::size_t side) {
  std::mt19937_64 rng(side);
  std::uniform_real_distribution<double> wind(-0.8, 0.8);
  std::vector<Triplet> t;
  auto id = [side](std::size_t i, std::size_t j) { return j * side + i; };
  for (std::size_t j = 0; j < side; ++j)
    for (std::size_t i = 0; i < side; ++i) {
      const std::size_t c = id(i, j);
      t.push_back({c, c, 4.0});
      const double w = wind(rng);
      if (i > 0) t.push_back({c, id(i - 1, j), -1.0 - w});
      if (i + 1 < side) t.push_back({c, id(i + 1, j), -1.0 + w});
      if (j > 0) t.push_back({c, id(i, j - 1), -1.0 - w});
      if (j + 1 < side) t.push_back({c, id(i, j + 1), -1.0 + w});
    }
  return SparseMatrix::from_triplets(side * side, side * side, t);
}

PreconditionedProblem problem(std::size_t side) {
  const SparseMatrix c = convection_diffusion(side);
  const MatrixBlocks blocks = extract_blocks(c, bisect_graph(c));
  auto [b, cc] = experiment::generate_rhs(blocks);
  return build_preconditioned_system(blocks, std::move(b), std::move(cc));
}

void BM_Spmv(benchmark::State& state) {
  const SparseMatrix a = convection_diffusion(static_cast<std::size_t>(state.range(0)));
  const Vector x(a.ncols(), 1.0);
  Vector y(a.nrows());
  for (auto _ : state) {
    spmv(a, x, y);
    benchmark::DoNotOptimize(y.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(a.nnz()));
}
BENCHMARK(BM_Spmv)->Arg(32)->Arg(128);

void BM_SparseLu(benchmark::State& state) {
  const SparseMatrix a = convection_diffusion(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(sparse_lu(a));
}
BENCHMARK(BM_SparseLu)->Arg(16)->Arg(32);

void BM_Gpmr(benchmark::State& state) {
  const auto p = problem(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gpmr_solve(p.system));
}
BENCHMARK(BM_Gpmr)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

void BM_Gmres(benchmark::State& state) {
  const auto p = problem(static_cast<std::size_t>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(gmres_solve(p.system));
}
BENCHMARK(BM_Gmres)->Arg(16)->Arg(32)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
