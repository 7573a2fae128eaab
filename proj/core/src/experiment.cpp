#include "gpmr/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <iomanip>
#include <ostream>
#include <sstream>

#include "gpmr/block_gmres.hpp"
#include "gpmr/gmres.hpp"
#include "gpmr/gpmr.hpp"
#include "gpmr/matrix_market.hpp"
#include "gpmr/partition.hpp"

namespace gpmr::experiment {

std::string to_string(Method m) {
  switch (m) {
    case Method::gpmr:
      return "gpmr";
    case Method::gmres:
      return "gmres";
    case Method::block_gmres:
      return "block-gmres";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  if (name == "gpmr") return Method::gpmr;
  if (name == "gmres") return Method::gmres;
  if (name == "block-gmres") return Method::block_gmres;
  throw ExperimentError(kExitUsage, "unknown method '" + name + "'");
}

void ExperimentConfig::validate() const {
  if (methods.empty()) throw ExperimentError(kExitUsage, "no method selected");
  if (atol < 0.0 || rtol < 0.0)
    throw ExperimentError(kExitUsage, "tolerances must be nonnegative");
  if (atol == 0.0 && rtol == 0.0)
    throw ExperimentError(kExitUsage, "atol and rtol must not both be zero");
  if (preconditioning == Preconditioning::block_jacobi && (lambda != 1.0 || mu != 1.0))
    throw ExperimentError(kExitUsage,
                          "block-Jacobi preconditioning fixes lambda = mu = 1; "
                          "use --precond none to choose the shifts");
}

std::pair<Vector, Vector> generate_rhs(const MatrixBlocks& blocks) {
  const Vector ones_m(blocks.m(), 1.0);
  const Vector ones_n(blocks.n(), 1.0);
  Vector b = spmv(blocks.M, ones_m);
  axpy(1.0, spmv(blocks.A, ones_n), b);
  Vector c = spmv(blocks.B, ones_m);
  axpy(1.0, spmv(blocks.N, ones_n), c);
  return {std::move(b), std::move(c)};
}

bool ExperimentReport::all_converged() const {
  return std::all_of(results.begin(), results.end(), [](const MethodResult& r) {
    return r.status == SolveStatus::converged;
  });
}

namespace {

Vector read_vector_file(const std::filesystem::path& path, std::size_t expected) {
  std::ifstream in(path);
  if (!in) throw ExperimentError(kExitInputError, "cannot open '" + path.string() + "'");
  Vector v;
  std::string tok;
  while (in >> tok) {
    try {
      v.push_back(std::stod(tok));
    } catch (const std::exception&) {
      throw ExperimentError(kExitInputError, "bad value '" + tok + "' in " + path.string());
    }
  }
  if (v.size() != expected)
    throw ExperimentError(kExitInputError, path.string() + ": expected " +
                                               std::to_string(expected) + " values, found " +
                                               std::to_string(v.size()));
  return v;
}

struct Prepared {
  MatrixBlocks blocks;
  BlockSplit split;
  std::optional<PartitionedSystem> system;
  std::optional<BlockJacobiPreconditioner> prec;
  Vector b_star;
  Vector c_star;
};

MethodResult run_method(Method method, const Prepared& p, const ExperimentConfig& cfg) {
  SolverOptions opt;
  opt.atol = cfg.atol;
  opt.rtol = cfg.rtol;
  opt.max_iterations = cfg.max_iterations;
  opt.reorthogonalize = cfg.reorthogonalize;

  const PartitionedSystem& sys = *p.system;
  MethodResult res;
  res.method = method;
  Vector x, y;
  const auto t0 = std::chrono::steady_clock::now();
  switch (method) {
    case Method::gpmr: {
      SolveReport r = gpmr_solve(sys, opt);
      res.status = r.status;
      res.iterations = r.iterations;
      res.matvec_count = r.matvec_count;
      res.residual_history = std::move(r.residual_history);
      x = std::move(r.x);
      y = std::move(r.y);
      break;
    }
    case Method::gmres: {
      SolveReport r = gmres_solve(sys, opt);
      res.status = r.status;
      res.iterations = r.iterations;
      res.matvec_count = r.matvec_count;
      res.residual_history = std::move(r.residual_history);
      x = std::move(r.x);
      y = std::move(r.y);
      break;
    }
    case Method::block_gmres: {
      BlockGmresReport r = block_gmres_solve(sys, opt);
      res.status = r.status;
      res.iterations = r.iterations;
      res.matvec_count = r.matvec_count;
      res.residual_history = std::move(r.summed_residual_history);
      x = std::move(r.first.x);
      y = std::move(r.first.y);
      axpy(1.0, r.second.x, x);
      axpy(1.0, r.second.y, y);
      break;
    }
  }
  const auto t1 = std::chrono::steady_clock::now();
  res.wall_seconds = std::chrono::duration<double>(t1 - t0).count();
  res.residual_estimate = res.residual_history.back();

  Vector xs, ys;
  if (p.prec) {
    auto rec = recover_solution(*p.prec, x, y);
    xs = std::move(rec.first);
    ys = std::move(rec.second);
  } else {
    xs = std::move(x);
    ys = std::move(y);
  }

  // Residual of the unpreconditioned partitioned system.
  const MatrixBlocks& bl = p.blocks;
  Vector rb = p.b_star;
  Vector rc = p.c_star;
  if (p.prec) {
    axpy(-1.0, spmv(bl.M, xs), rb);
    axpy(-1.0, spmv(bl.N, ys), rc);
  } else {
    axpy(-cfg.lambda, xs, rb);
    axpy(-cfg.mu, ys, rc);
  }
  axpy(-1.0, spmv(bl.A, ys), rb);
  axpy(-1.0, spmv(bl.B, xs), rc);
  res.true_residual = stacked_norm(rb, rc);

  res.x_star.assign(bl.m() + bl.n(), 0.0);
  double err = 0.0;
  for (std::size_t i = 0; i < bl.m(); ++i) {
    res.x_star[p.split.perm[i]] = xs[i];
    err = std::max(err, std::abs(xs[i] - 1.0));
  }
  for (std::size_t i = 0; i < bl.n(); ++i) {
    res.x_star[p.split.perm[bl.m() + i]] = ys[i];
    err = std::max(err, std::abs(ys[i] - 1.0));
  }
  res.ones_error = err;
  return res;
}

}  // namespace

ExperimentReport run_experiment(const ExperimentConfig& cfg) {
  cfg.validate();

  SparseMatrix c;
  try {
    c = read_matrix_market(cfg.matrix_path);
  } catch (const MatrixMarketError& e) {
    throw ExperimentError(kExitInputError, cfg.matrix_path.string() + ": " + e.what());
  }
  if (c.nrows() != c.ncols())
    throw ExperimentError(kExitInputError, "matrix must be square");

  Prepared p;
  try {
    p.split = cfg.partition_path ? read_permutation(*cfg.partition_path) : bisect_graph(c);
    if (p.split.m + p.split.n != c.nrows())
      throw PartitionError("permutation order " + std::to_string(p.split.m + p.split.n) +
                           " does not match matrix order " + std::to_string(c.nrows()));
    if (cfg.save_partition) write_permutation(*cfg.save_partition, p.split);
  } catch (const PartitionError& e) {
    throw ExperimentError(kExitInputError, e.what());
  }
  p.blocks = extract_blocks(c, p.split);

  if (cfg.rhs_path) {
    const Vector full = read_vector_file(*cfg.rhs_path, c.nrows());
    p.b_star.resize(p.split.m);
    p.c_star.resize(p.split.n);
    for (std::size_t i = 0; i < p.split.m; ++i) p.b_star[i] = full[p.split.perm[i]];
    for (std::size_t i = 0; i < p.split.n; ++i)
      p.c_star[i] = full[p.split.perm[p.split.m + i]];
  } else if (cfg.preconditioning == Preconditioning::block_jacobi) {
    std::tie(p.b_star, p.c_star) = generate_rhs(p.blocks);
  } else {
    MatrixBlocks shifted{SparseMatrix::identity(p.split.m, cfg.lambda), p.blocks.A,
                         p.blocks.B, SparseMatrix::identity(p.split.n, cfg.mu)};
    std::tie(p.b_star, p.c_star) = generate_rhs(shifted);
  }

  try {
    if (cfg.preconditioning == Preconditioning::block_jacobi) {
      auto prob = build_preconditioned_system(p.blocks, p.b_star, p.c_star);
      p.system.emplace(std::move(prob.system));
      p.prec.emplace(std::move(prob.preconditioner));
    } else {
      p.system.emplace(cfg.lambda, cfg.mu, LinearOperator::from_matrix(p.blocks.A),
                       LinearOperator::from_matrix(p.blocks.B), p.b_star, p.c_star);
    }
  } catch (const PreconditionerError& e) {
    throw ExperimentError(kExitSingularBlock, e.what());
  } catch (const std::invalid_argument& e) {
    throw ExperimentError(kExitInputError, e.what());
  }

  ExperimentReport rep;
  rep.matrix_name = cfg.matrix_path.stem().string();
  rep.order = c.nrows();
  rep.nnz = c.nnz();
  rep.m = p.split.m;
  rep.n = p.split.n;
  rep.rhs_norm = stacked_norm(p.b_star, p.c_star);

  if (cfg.parallel && cfg.methods.size() > 1) {
    std::vector<std::future<MethodResult>> futures;
    for (Method m : cfg.methods)
      futures.push_back(std::async(std::launch::async, run_method, m, std::cref(p),
                                   std::cref(cfg)));
    for (auto& f : futures) rep.results.push_back(f.get());
  } else {
    for (Method m : cfg.methods) rep.results.push_back(run_method(m, p, cfg));
  }

  if (cfg.history_out) {
    std::vector<NamedHistory> hist;
    for (const auto& r : rep.results) hist.emplace_back(to_string(r.method), r.residual_history);
    write_history_csv(*cfg.history_out, hist);
  }
  return rep;
}

void print_summary(std::ostream& out, const ExperimentReport& report) {
  out << report.matrix_name << ": order " << report.order << ", nnz " << report.nnz
      << ", split " << report.m << " + " << report.n << ", ||(b,c)|| = "
      << std::setprecision(6) << std::scientific << report.rhs_norm << '\n';
  out << std::left << std::setw(13) << "method" << std::setw(16) << "status"
      << std::right << std::setw(7) << "iters" << std::setw(9) << "matvecs"
      << std::setw(14) << "est. resid" << std::setw(14) << "true resid"
      << std::setw(14) << "|x-1|_inf" << std::setw(11) << "time [s]" << '\n';
  for (const auto& r : report.results) {
    out << std::left << std::setw(13) << to_string(r.method) << std::setw(16)
        << gpmr::to_string(r.status) << std::right << std::setw(7) << r.iterations
        << std::setw(9) << r.matvec_count << std::setprecision(3) << std::scientific
        << std::setw(14) << r.residual_estimate << std::setw(14) << r.true_residual
        << std::setw(14) << r.ones_error << std::fixed << std::setw(11) << r.wall_seconds
        << '\n';
  }
  const MethodResult* gp = nullptr;
  const MethodResult* gm = nullptr;
  for (const auto& r : report.results) {
    if (r.method == Method::gpmr) gp = &r;
    if (r.method == Method::gmres) gm = &r;
  }
  if (gp && gm && gm->iterations > 0) {
    const double gain = 100.0 * (1.0 - static_cast<double>(gp->iterations) /
                                           static_cast<double>(gm->iterations));
    out << "iteration gain of gpmr over gmres: " << std::fixed << std::setprecision(0)
        << gain << "%\n";
  }
  out.unsetf(std::ios::floatfield);
}

void write_history_csv(std::ostream& out, const std::vector<NamedHistory>& histories) {
  out << "iteration,method,residual_norm\n";
  char buf[64];
  for (const auto& [name, hist] : histories) {
    for (std::size_t k = 0; k < hist.size(); ++k) {
      std::snprintf(buf, sizeof buf, "%.17g", hist[k]);
      out << k << ',' << name << ',' << buf << '\n';
    }
  }
}

void write_history_csv(const std::filesystem::path& path,
                       const std::vector<NamedHistory>& histories) {
  if (histories.empty()) throw std::invalid_argument("write_history_csv: no histories");
  std::ofstream out(path);
  if (!out) throw ExperimentError(kExitInputError, "cannot write '" + path.string() + "'");
  write_history_csv(out, histories);
  if (!out) throw ExperimentError(kExitInputError, "write failed for '" + path.string() + "'");
}

std::vector<NamedHistory> read_history_csv(std::istream& in) {
  std::vector<NamedHistory> out;
  std::string line;
  if (!std::getline(in, line) || line != "iteration,method,residual_norm")
    throw std::runtime_error("history CSV: missing header");
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos || c2 == std::string::npos)
      throw std::runtime_error("history CSV: malformed row '" + line + "'");
    const std::string name = line.substr(c1 + 1, c2 - c1 - 1);
    const double value = std::strtod(line.c_str() + c2 + 1, nullptr);
    if (out.empty() || out.back().first != name) out.emplace_back(name, std::vector<double>{});
    out.back().second.push_back(value);
  }
  return out;
}

}  // namespace gpmr::experiment
