#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "cli.hpp"

namespace {

template <class T>
void put(spadmm::Json& j, const char* key, const std::optional<T>& v) {
  if (v) j[key] = *v;
}

struct CommonFlags {
  std::optional<std::string> config, benchmark, problem, algo, out, block_solver, init;
  std::optional<double> rho_a, rho_b, eps_primal, eps_dual, block_solver_tol, best_response_tol, time_budget_s;
  std::optional<std::size_t> max_iters, workers, gap_every;
  std::optional<std::uint64_t> seed;
  std::optional<int> nodes;
  bool timing = false;

  void add_to(CLI::App* app) {
    app->add_option("--config", config, "JSON settings file (flags override it)");
    app->add_option("--algo", algo, "spadmm, spfw or admm");
    app->add_option("--rho-a", rho_a, "minimizer penalty");
    app->add_option("--rho-b", rho_b, "maximizer penalty");
    app->add_option("--eps-primal", eps_primal);
    app->add_option("--eps-dual", eps_dual);
    app->add_option("--max-iters", max_iters);
    app->add_option("--seed", seed);
    app->add_option("--workers", workers, "threads for the block step");
    app->add_option("--block-solver", block_solver, "auto, analytic, spfw or extragradient");
    app->add_option("--block-solver-tol", block_solver_tol);
    app->add_option("--init", init, "zeros or uniform-projected");
    app->add_option("--gap-every", gap_every, "gap bracket period in iterations (0 = off)");
    app->add_option("--best-response-tol", best_response_tol);
    app->add_option("--time-budget", time_budget_s, "seconds");
    app->add_flag("--timing", timing, "write measured wall time into traces");
  }

  spadmm::Json settings() const {
    spadmm::Json j = config ? spadmm::io::read_json_file(*config) : spadmm::Json::object();
    put(j, "benchmark", benchmark);
    put(j, "problem", problem);
    put(j, "algo", algo);
    put(j, "out", out);
    put(j, "nodes", nodes);
    put(j, "rho_a", rho_a);
    put(j, "rho_b", rho_b);
    put(j, "eps_primal", eps_primal);
    put(j, "eps_dual", eps_dual);
    put(j, "max_iters", max_iters);
    put(j, "seed", seed);
    put(j, "workers", workers);
    put(j, "block_solver", block_solver);
    put(j, "block_solver_tol", block_solver_tol);
    put(j, "init", init);
    put(j, "gap_every", gap_every);
    put(j, "best_response_tol", best_response_tol);
    put(j, "time_budget_s", time_budget_s);
    if (timing) j["timing"] = true;
    return j;
  }
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Saddle-point ADMM solver"};
  app.require_subcommand(1);

  CommonFlags solve_flags;
  CLI::App* solve = app.add_subcommand("solve", "run one solver on one problem");
  solve_flags.add_to(solve);
  solve->add_option("--benchmark", solve_flags.benchmark, "power-allocation or routing");
  solve->add_option("--problem", solve_flags.problem, "problem JSON file");
  solve->add_option("--nodes", solve_flags.nodes, "routing graph size");
  solve->add_option("--out", solve_flags.out, "directory for trace.csv, trace.jsonl, summary.json");

  CommonFlags compare_flags;
  std::optional<std::vector<int>> sizes;
  std::optional<double> budget_s;
  std::optional<std::size_t> budget_iters;
  CLI::App* compare = app.add_subcommand("compare", "SP-ADMM against SP-FW on routing instances");
  compare_flags.add_to(compare);
  compare->add_option("--sizes", sizes, "node counts, e.g. 10,20")->delimiter(',');
  compare->add_option("--budget", budget_s, "wall-clock budget per run in seconds");
  compare->add_option("--budget-iters", budget_iters, "iteration budget per run (replaces --budget)");
  compare->add_option("--out", compare_flags.out, "CSV output file");

  CLI11_PARSE(app, argc, argv);

  const spadmm::cli::Context ctx{std::cout, std::cerr, spadmm::cli::log_level_from_env()};
  try {
    if (*solve) return spadmm::cli::cmd_solve(solve_flags.settings(), ctx);
    spadmm::Json s = compare_flags.settings();
    put(s, "sizes", sizes);
    put(s, "budget_s", budget_s);
    put(s, "budget_iters", budget_iters);
    return spadmm::cli::cmd_compare(s, ctx);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
