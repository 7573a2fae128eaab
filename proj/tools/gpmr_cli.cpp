// Experiment harness: load a Matrix Market file, split it into a 2x2 block
// system, precondition, run the selected Krylov methods and report.

#include <exception>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "gpmr/experiment.hpp"

namespace ex = gpmr::experiment;

namespace {

std::vector<ex::Method> parse_method_list(const std::string& list) {
  std::vector<ex::Method> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(ex::parse_method(item));
  }
  return out;
}

nlohmann::json to_json(const ex::ExperimentReport& rep) {
  nlohmann::json j;
  j["matrix"] = rep.matrix_name;
  j["order"] = rep.order;
  j["nnz"] = rep.nnz;
  j["m"] = rep.m;
  j["n"] = rep.n;
  j["rhs_norm"] = rep.rhs_norm;
  j["methods"] = nlohmann::json::array();
  for (const auto& r : rep.results) {
    j["methods"].push_back({
        {"method", ex::to_string(r.method)},
        {"status", std::string(gpmr::to_string(r.status))},
        {"iterations", r.iterations},
        {"matvec_count", r.matvec_count},
        {"residual_estimate", r.residual_estimate},
        {"true_residual", r.true_residual},
        {"ones_error_inf", r.ones_error},
        {"wall_seconds", r.wall_seconds},
    });
  }
  j["all_converged"] = rep.all_converged();
  return j;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Solve a 2x2 block partitioned system with GPMR, GMRES and Block-GMRES"};

  ex::ExperimentConfig cfg;
  std::string matrix;
  std::string partition = "auto";
  std::string methods = "gpmr,gmres";
  std::string precond = "block-jacobi";
  std::string history, rhs, report_path, save_partition, solution_path;

  app.add_option("--matrix", matrix, "Matrix Market file (square, coordinate format)")
      ->required();
  app.add_option("--partition", partition,
                 "'auto' for built-in bisection, or a permutation file ('m n' then one "
                 "0-based index per line)")
      ->capture_default_str();
  app.add_option("--precond", precond, "block-jacobi | none")
      ->check(CLI::IsMember({"block-jacobi", "none"}))
      ->capture_default_str();
  app.add_option("--lambda", cfg.lambda, "shift of the first diagonal block (precond none)")
      ->capture_default_str();
  app.add_option("--mu", cfg.mu, "shift of the second diagonal block (precond none)")
      ->capture_default_str();
  app.add_option("--method", methods, "comma-separated subset of gpmr,gmres,block-gmres")
      ->capture_default_str();
  app.add_option("--atol", cfg.atol, "absolute tolerance")->capture_default_str();
  app.add_option("--rtol", cfg.rtol, "relative tolerance")->capture_default_str();
  app.add_option("--maxiter", cfg.max_iterations, "iteration limit (0: each solver's default)")
      ->capture_default_str();
  app.add_option("--history", history, "write residual histories as CSV");
  app.add_option("--rhs", rhs, "right-hand side file (m+n values, original ordering)");
  app.add_option("--report", report_path, "write a JSON report");
  app.add_option("--save-partition", save_partition, "write the permutation that was used");
  app.add_option("--solution", solution_path,
                 "write the first method's solution, one value per line");
  app.add_flag("--reorth", cfg.reorthogonalize, "reorthogonalize the Krylov bases");
  app.add_flag("--parallel", cfg.parallel, "run the selected methods concurrently");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : ex::kExitUsage;
  }

  try {
    cfg.matrix_path = matrix;
    if (partition != "auto") cfg.partition_path = partition;
    cfg.preconditioning =
        precond == "none" ? ex::Preconditioning::none : ex::Preconditioning::block_jacobi;
    cfg.methods = parse_method_list(methods);
    if (!history.empty()) cfg.history_out = history;
    if (!rhs.empty()) cfg.rhs_path = rhs;
    if (!save_partition.empty()) cfg.save_partition = save_partition;

    const ex::ExperimentReport rep = ex::run_experiment(cfg);
    ex::print_summary(std::cout, rep);

    if (!report_path.empty()) {
      std::ofstream out(report_path);
      if (!out) throw ex::ExperimentError(ex::kExitInputError, "cannot write " + report_path);
      out << to_json(rep).dump(2) << '\n';
    }
    if (!solution_path.empty()) {
      std::ofstream out(solution_path);
      if (!out)
        throw ex::ExperimentError(ex::kExitInputError, "cannot write " + solution_path);
      out.precision(17);
      for (double v : rep.results.front().x_star) out << v << '\n';
    }
    return rep.exit_code();
  } catch (const ex::ExperimentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return ex::kExitInputError;
  }
}
