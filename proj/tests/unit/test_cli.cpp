#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <sys/wait.h>
#include <unistd.h>

#include "doctest.h"
#include "gpmr/experiment.hpp"
#include "gpmr/matrix_market.hpp"
#include "test_support.hpp"

using namespace gpmr;
using namespace gpmr::experiment;
using namespace gpmr::testing;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir() {
  const fs::path dir = fs::temp_directory_path() / ("gpmr_cli_tests_" + std::to_string(::getpid()));
  fs::create_directories(dir);
  return dir;
}

fs::path write_matrix(const std::string& name, const SparseMatrix& m) {
  const fs::path p = scratch_dir() / name;
  write_matrix_market(p, m);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

#ifdef GPMR_CLI_PATH
int run_cli(const std::string& args) {
  const std::string cmd = std::string(GPMR_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}
#endif

// Random unsymmetric matrix with strong diagonal blocks under any split.
SparseMatrix random_system_matrix(Rng& rng, std::size_t order) {
  return random_diag_dominant(rng, order, 0.15);
}

}  // namespace

TEST_SUITE("cli") {

TEST_CASE("generate_rhs small cases") {
  const MatrixBlocks id{SparseMatrix::identity(3), SparseMatrix::zeros(3, 2),
                        SparseMatrix::zeros(2, 3), SparseMatrix::identity(2)};
  auto [b, c] = generate_rhs(id);
  CHECK(b == Vector{1, 1, 1});
  CHECK(c == Vector{1, 1});
  const MatrixBlocks s{SparseMatrix::identity(1, 2.0), SparseMatrix::identity(1),
                       SparseMatrix::identity(1), SparseMatrix::identity(1, 2.0)};
  auto [b2, c2] = generate_rhs(s);
  CHECK(b2 == Vector{3});
  CHECK(c2 == Vector{3});
}

TEST_CASE("method names") {
  CHECK(parse_method("gpmr") == Method::gpmr);
  CHECK(parse_method("gmres") == Method::gmres);
  CHECK(parse_method("block-gmres") == Method::block_gmres);
  CHECK(to_string(Method::block_gmres) == "block-gmres");
  CHECK_THROWS_AS(parse_method("cg"), ExperimentError);
}

TEST_CASE("config validation") {
  ExperimentConfig cfg;
  cfg.methods.clear();
  CHECK_THROWS_AS(cfg.validate(), ExperimentError);
  cfg.methods = {Method::gpmr};
  cfg.atol = cfg.rtol = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ExperimentError);
  cfg.atol = 1e-12;
  cfg.lambda = 0.0;
  CHECK_THROWS_AS(cfg.validate(), ExperimentError);
  cfg.preconditioning = Preconditioning::none;
  CHECK_NOTHROW(cfg.validate());
}

TEST_CASE("random 10 + 8 run recovers the ones solution") {
  Rng rng(71);
  const SparseMatrix c = random_system_matrix(rng, 18);
  ExperimentConfig cfg;
  cfg.matrix_path = write_matrix("r18.mtx", c);
  cfg.methods = {Method::gpmr, Method::gmres, Method::block_gmres};
  const fs::path perm = scratch_dir() / "r18.perm";
  {
    std::ofstream out(perm);
    out << "10 8\n";
    for (int i = 17; i >= 0; --i) out << i << "\n";
  }
  cfg.partition_path = perm;
  const ExperimentReport rep = run_experiment(cfg);
  CHECK(rep.m == 10);
  CHECK(rep.n == 8);
  CHECK(rep.exit_code() == kExitOk);
  for (const auto& r : rep.results) {
    CHECK(r.status == SolveStatus::converged);
    CHECK(r.ones_error <= 1e-6);
    CHECK(r.x_star.size() == 18);
    CHECK(r.true_residual <= 1e-6 * rep.rhs_norm);
  }
}

TEST_CASE("two-dimensional toy system") {
  ExperimentConfig cfg;
  cfg.matrix_path =
      write_matrix("toy.mtx", SparseMatrix::from_dense(2, 2, std::vector<double>{2, 1, 1, 2}));
  const ExperimentReport rep = run_experiment(cfg);
  REQUIRE(rep.results.size() == 2);
  for (const auto& r : rep.results) {
    CHECK(r.status == SolveStatus::converged);
    CHECK(r.iterations == 1);
  }
  CHECK(max_abs_diff(rep.results[0].x_star, rep.results[1].x_star) <= 1e-15);
  CHECK(max_abs_diff(rep.results[0].x_star, Vector{1, 1}) <= 1e-15);
}

TEST_CASE("unpreconditioned run with shifts") {
  Rng rng(72);
  const SparseMatrix c = random_system_matrix(rng, 20);
  ExperimentConfig cfg;
  cfg.matrix_path = write_matrix("shift.mtx", c);
  cfg.preconditioning = Preconditioning::none;
  cfg.lambda = 8.0;
  cfg.mu = -6.0;
  cfg.methods = {Method::gpmr, Method::gmres};
  const ExperimentReport rep = run_experiment(cfg);
  for (const auto& r : rep.results) {
    CHECK(r.status == SolveStatus::converged);
    CHECK(r.ones_error <= 1e-6);
  }
}

TEST_CASE("history CSV line counts") {
  std::ostringstream one;
  write_history_csv(one, {{"gpmr", {1.0, 0.5}}});
  const std::string s1 = one.str();
  CHECK(std::count(s1.begin(), s1.end(), '\n') == 3);
  CHECK(s1.rfind("iteration,method,residual_norm\n", 0) == 0);

  std::ostringstream two;
  write_history_csv(two, {{"gpmr", {1.0, 0.5, 0.25}}, {"gmres", {1.0, 0.75}}});
  const std::string s2 = two.str();
  CHECK(std::count(s2.begin(), s2.end(), '\n') == 6);
}

TEST_CASE("history CSV parses back bit-equal") {
  Rng rng(73);
  std::vector<NamedHistory> h{{"gpmr", random_vector(rng, 9)}, {"block-gmres", random_vector(rng, 4)}};
  h[0].second.push_back(1.0 / 3.0);
  h[1].second.push_back(5e-310);
  std::stringstream io;
  write_history_csv(io, h);
  const auto back = read_history_csv(io);
  REQUIRE(back.size() == 2);
  CHECK(back[0].first == "gpmr");
  CHECK(back[1].first == "block-gmres");
  CHECK(back[0].second == h[0].second);
  CHECK(back[1].second == h[1].second);
}

TEST_CASE("history file from a run has iterations + 1 rows per method") {
  Rng rng(74);
  ExperimentConfig cfg;
  cfg.matrix_path = write_matrix("hist.mtx", random_system_matrix(rng, 30));
  cfg.history_out = scratch_dir() / "hist.csv";
  const ExperimentReport rep = run_experiment(cfg);
  std::ifstream in(*cfg.history_out);
  const auto back = read_history_csv(in);
  REQUIRE(back.size() == rep.results.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].first == to_string(rep.results[i].method));
    CHECK(back[i].second.size() == rep.results[i].iterations + 1);
    CHECK(back[i].second.front() == doctest::Approx(rep.rhs_norm).epsilon(1e-14));
  }
}

#ifdef GPMR_CLI_PATH
TEST_CASE("CLI output is deterministic") {
  Rng rng(75);
  const fs::path mtx = write_matrix("det.mtx", random_system_matrix(rng, 60));
  const fs::path h1 = scratch_dir() / "det1.csv", h2 = scratch_dir() / "det2.csv";
  const std::string common = "--matrix " + mtx.string() + " --method gpmr,gmres,block-gmres";
  REQUIRE(run_cli(common + " --history " + h1.string()) == 0);
  REQUIRE(run_cli(common + " --history " + h2.string()) == 0);
  CHECK(slurp(h1) == slurp(h2));
  CHECK_FALSE(slurp(h1).empty());
}

TEST_CASE("CLI exit codes") {
  Rng rng(76);
  const fs::path good = write_matrix("good.mtx", random_system_matrix(rng, 40));
  CHECK(run_cli("--matrix " + good.string()) == kExitOk);
  CHECK(run_cli("--matrix " + (scratch_dir() / "missing.mtx").string()) == kExitInputError);
  {
    std::ofstream bad(scratch_dir() / "bad.mtx");
    bad << "not a matrix market file\n";
  }
  CHECK(run_cli("--matrix " + (scratch_dir() / "bad.mtx").string()) == kExitInputError);

  // Zero diagonal blocks under the identity split.
  const fs::path swap = write_matrix(
      "swap.mtx", SparseMatrix::from_dense(4, 4, std::vector<double>{0, 0, 1, 0, 0, 0, 0, 1,
                                                                     1, 0, 0, 0, 0, 1, 0, 0}));
  {
    std::ofstream perm(scratch_dir() / "swap.perm");
    perm << "2 2\n0\n1\n2\n3\n";
  }
  CHECK(run_cli("--matrix " + swap.string() + " --partition " +
                (scratch_dir() / "swap.perm").string()) == kExitSingularBlock);
  CHECK(run_cli("--matrix " + swap.string() + " --partition " +
                (scratch_dir() / "missing.perm").string()) == kExitInputError);

  CHECK(run_cli("--matrix " + good.string() + " --maxiter 1") == kExitNotConverged);
  CHECK(run_cli("--matrix " + good.string() + " --method nope") == kExitUsage);
  CHECK(run_cli("--bogus-flag") == kExitUsage);
  CHECK(run_cli("") == kExitUsage);
  CHECK(run_cli("--matrix " + good.string() + " --lambda 2") == kExitUsage);
  CHECK(run_cli("--matrix " + good.string() + " --precond none --lambda 2 --mu 0") == kExitOk);
}

TEST_CASE("CLI writes a JSON report and the solution") {
  Rng rng(77);
  const fs::path mtx = write_matrix("json.mtx", random_system_matrix(rng, 25));
  const fs::path report = scratch_dir() / "report.json";
  const fs::path sol = scratch_dir() / "sol.txt";
  const fs::path perm = scratch_dir() / "saved.perm";
  REQUIRE(run_cli("--matrix " + mtx.string() + " --report " + report.string() + " --solution " +
                  sol.string() + " --save-partition " + perm.string()) == 0);
  const std::string json = slurp(report);
  CHECK(json.find("\"gpmr\"") != std::string::npos);
  CHECK(json.find("\"iterations\"") != std::string::npos);
  std::istringstream values(slurp(sol));
  double v;
  std::size_t count = 0;
  while (values >> v) {
    CHECK(std::abs(v - 1.0) <= 1e-6);
    ++count;
  }
  CHECK(count == 25);
  // The saved partition reproduces the run.
  CHECK(run_cli("--matrix " + mtx.string() + " --partition " + perm.string()) == 0);
}
#endif

}  // TEST_SUITE
