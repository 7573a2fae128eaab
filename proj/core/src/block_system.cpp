#include "gpmr/block_system.hpp"

#include <vector>

namespace gpmr {

MatrixBlocks extract_blocks(const SparseMatrix& c, const BlockSplit& split) {
  split.validate();
  const std::size_t order = split.m + split.n;
  if (c.nrows() != order || c.ncols() != order)
    throw DimensionError("extract_blocks: matrix of order " + std::to_string(c.nrows()) +
                         " does not match split of order " + std::to_string(order));

  std::vector<std::size_t> position(order);
  for (std::size_t i = 0; i < order; ++i) position[split.perm[i]] = i;

  std::vector<Triplet> mm, aa, bb, nn;
  for (std::size_t orig_row = 0; orig_row < order; ++orig_row) {
    const std::size_t i = position[orig_row];
    const auto cols = c.row_cols(orig_row);
    const auto vals = c.row_values(orig_row);
    for (std::size_t p = 0; p < cols.size(); ++p) {
      const std::size_t j = position[cols[p]];
      if (i < split.m) {
        if (j < split.m)
          mm.push_back({i, j, vals[p]});
        else
          aa.push_back({i, j - split.m, vals[p]});
      } else {
        if (j < split.m)
          bb.push_back({i - split.m, j, vals[p]});
        else
          nn.push_back({i - split.m, j - split.m, vals[p]});
      }
    }
  }
  return MatrixBlocks{SparseMatrix::from_triplets(split.m, split.m, mm),
                      SparseMatrix::from_triplets(split.m, split.n, aa),
                      SparseMatrix::from_triplets(split.n, split.m, bb),
                      SparseMatrix::from_triplets(split.n, split.n, nn)};
}

SparseMatrix assemble_blocks(const MatrixBlocks& blocks, const BlockSplit& split) {
  split.validate();
  const std::size_t m = split.m;
  std::vector<Triplet> all;
  auto add = [&](const SparseMatrix& blk, std::size_t row0, std::size_t col0) {
    for (const auto& t : blk.to_triplets())
      all.push_back({split.perm[row0 + t.row], split.perm[col0 + t.col], t.value});
  };
  add(blocks.M, 0, 0);
  add(blocks.A, 0, m);
  add(blocks.B, m, 0);
  add(blocks.N, m, m);
  return SparseMatrix::from_triplets(m + split.n, m + split.n, all);
}

PartitionedSystem::PartitionedSystem(double lambda, double mu, LinearOperator a,
                                     LinearOperator b, Vector rhs_b, Vector rhs_c)
    : lambda_(lambda),
      mu_(mu),
      a_(std::move(a)),
      b_(std::move(b)),
      rhs_b_(std::move(rhs_b)),
      rhs_c_(std::move(rhs_c)) {
  const std::size_t m = a_.nrows();
  const std::size_t n = a_.ncols();
  if (m == 0 || n == 0 || b_.nrows() != n || b_.ncols() != m)
    throw std::invalid_argument("PartitionedSystem: A must be m x n and B n x m");
  if (rhs_b_.size() != m || rhs_c_.size() != n)
    throw std::invalid_argument("PartitionedSystem: right-hand side blocks must have "
                                "lengths m and n");
  if (norm2(rhs_b_) == 0.0 || norm2(rhs_c_) == 0.0)
    throw std::invalid_argument("PartitionedSystem: b and c must both be nonzero");
  if (norm2(a_.apply(Vector(n, 1.0))) == 0.0)
    throw std::invalid_argument("PartitionedSystem: A is a zero operator");
  if (norm2(b_.apply(Vector(m, 1.0))) == 0.0)
    throw std::invalid_argument("PartitionedSystem: B is a zero operator");
}

double PartitionedSystem::rhs_norm() const { return stacked_norm(rhs_b_, rhs_c_); }

void PartitionedSystem::apply(std::span<const double> x, std::span<const double> y,
                              std::span<double> out) const {
  if (x.size() != m() || y.size() != n() || out.size() != m() + n())
    throw DimensionError("PartitionedSystem::apply: dimension mismatch");
  auto top = out.first(m());
  auto bottom = out.subspan(m());
  a_.apply(y, top);
  b_.apply(x, bottom);
  for (std::size_t i = 0; i < m(); ++i) top[i] += lambda_ * x[i];
  for (std::size_t i = 0; i < n(); ++i) bottom[i] += mu_ * y[i];
}

Vector PartitionedSystem::residual(std::span<const double> x,
                                   std::span<const double> y) const {
  Vector r(m() + n());
  apply(x, y, r);
  for (std::size_t i = 0; i < m(); ++i) r[i] = rhs_b_[i] - r[i];
  for (std::size_t i = 0; i < n(); ++i) r[m() + i] = rhs_c_[i] - r[m() + i];
  return r;
}

LinearOperator PartitionedSystem::as_operator() const {
  return partitioned_operator(lambda_, mu_, a_, b_);
}

Vector PartitionedSystem::stacked_rhs() const {
  Vector d(rhs_b_);
  d.insert(d.end(), rhs_c_.begin(), rhs_c_.end());
  return d;
}

namespace {

std::shared_ptr<const LUFactors> factor_block(const SparseMatrix& blk, const char* name) {
  try {
    return std::make_shared<const LUFactors>(sparse_lu(blk));
  } catch (const SingularMatrixError& e) {
    throw PreconditionerError(name, e.column());
  }
}

LinearOperator inverse_operator(std::shared_ptr<const LUFactors> f) {
  const std::size_t order = f->order();
  return LinearOperator(order, order,
                        [f = std::move(f)](std::span<const double> x, std::span<double> y) {
                          lu_solve(*f, x, y);
                        });
}

}  // namespace

BlockJacobiPreconditioner::BlockJacobiPreconditioner(const SparseMatrix& m_block,
                                                     const SparseMatrix& n_block)
    : m_factors_(factor_block(m_block, "M")), n_factors_(factor_block(n_block, "N")) {}

Vector BlockJacobiPreconditioner::solve_m(std::span<const double> x) const {
  return lu_solve(*m_factors_, x);
}

Vector BlockJacobiPreconditioner::solve_n(std::span<const double> y) const {
  return lu_solve(*n_factors_, y);
}

LinearOperator BlockJacobiPreconditioner::m_inverse() const {
  return inverse_operator(m_factors_);
}

LinearOperator BlockJacobiPreconditioner::n_inverse() const {
  return inverse_operator(n_factors_);
}

PreconditionedProblem build_preconditioned_system(const MatrixBlocks& blocks,
                                                  Vector b_star, Vector c_star) {
  const std::size_t m = blocks.m();
  const std::size_t n = blocks.n();
  if (blocks.A.nrows() != m || blocks.A.ncols() != n || blocks.B.nrows() != n ||
      blocks.B.ncols() != m || blocks.M.ncols() != m || blocks.N.ncols() != n)
    throw DimensionError("build_preconditioned_system: inconsistent block shapes");

  BlockJacobiPreconditioner prec(blocks.M, blocks.N);
  auto a_op = LinearOperator::from_matrix(blocks.A).compose(prec.n_inverse());
  auto b_op = LinearOperator::from_matrix(blocks.B).compose(prec.m_inverse());
  PartitionedSystem sys(1.0, 1.0, std::move(a_op), std::move(b_op), std::move(b_star),
                        std::move(c_star));
  return PreconditionedProblem{std::move(sys), std::move(prec)};
}

std::pair<Vector, Vector> recover_solution(const BlockJacobiPreconditioner& prec,
                                           std::span<const double> x,
                                           std::span<const double> y) {
  return {prec.solve_m(x), prec.solve_n(y)};
}

}  // namespace gpmr
