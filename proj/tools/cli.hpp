#pragma once

#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "spadmm/spadmm.hpp"

namespace spadmm::cli {

enum class LogLevel { Quiet = 0, Info = 1, Debug = 2 };

inline LogLevel log_level_from_env() {
  const char* v = std::getenv("SPADMM_LOG");
  if (!v) return LogLevel::Quiet;
  const std::string s = v;
  if (s == "debug" || s == "2") return LogLevel::Debug;
  if (s == "info" || s == "1") return LogLevel::Info;
  return LogLevel::Quiet;
}

struct Context {
  std::ostream& out;
  std::ostream& err;
  LogLevel level = LogLevel::Quiet;

  void info(const std::string& msg) const {
    if (level >= LogLevel::Info) err << "[spadmm] " << msg << '\n';
  }
  void debug(const std::string& msg) const {
    if (level >= LogLevel::Debug) err << "[spadmm] " << msg << '\n';
  }
};

// Keys a settings document may carry besides the SolverConfig fields.
inline const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys = {
      "benchmark", "problem", "algo", "nodes", "out", "timing", "sizes", "budget_s", "budget_iters",
      "rho_a", "rho_b", "eps_primal", "eps_dual", "max_iters", "block_solver", "block_solver_tol",
      "block_solver_max_iters", "warm_start", "seed", "workers", "init", "gap_every", "best_response_tol",
      "time_budget_s"};
  return keys;
}

inline void check_keys(const Json& settings) {
  if (!settings.is_object()) throw ArgumentError("config: expected a JSON object");
  for (const auto& [key, _] : settings.items())
    if (!known_keys().count(key)) throw ArgumentError("config: unknown key '" + key + "'");
}

struct LoadedProblem {
  SaddleProblem problem;
  Json metadata;
  bool routing = false;
};

inline LoadedProblem load_problem(const Json& settings) {
  const bool has_bench = settings.contains("benchmark");
  const bool has_file = settings.contains("problem");
  if (has_bench == has_file) throw ArgumentError("exactly one of --benchmark or --problem is required");
  if (has_file) {
    const auto path = settings.at("problem").get<std::string>();
    return {io::problem_from_json(io::read_json_file(path)), {{"problem", path}}, false};
  }
  const auto name = settings.at("benchmark").get<std::string>();
  if (name == "power-allocation")
    return {build_power_allocation(default_power_allocation_spec()), {{"benchmark", name}}, false};
  if (name == "routing") {
    RoutingSpec rs;
    rs.n_nodes = settings.value("nodes", 20);
    rs.seed = settings.value("seed", std::uint64_t{0});
    const RoutingGraph g = generate_routing_graph(rs);
    Json meta = {{"benchmark", name},
                 {"nodes", rs.n_nodes},
                 {"edges", g.edges.size()},
                 {"seed", rs.seed},
                 {"repaired", g.repaired}};
    return {build_routing(g, rs.state1_min_density), meta, true};
  }
  throw ArgumentError("unknown benchmark '" + name + "' (expected power-allocation or routing)");
}

// SolverConfig with benchmark-dependent defaults, then the settings on top.
inline SolverConfig make_config(const Json& settings, const LoadedProblem& lp) {
  SolverConfig cfg;
  if (lp.routing) cfg.init = InitMode::UniformProjected;
  if (lp.problem.has_maximizer()) cfg.gap_every = 10;
  io::apply_config_json(settings, cfg);
  cfg.validate();
  return cfg;
}

inline int exit_code(Termination t) {
  switch (t) {
    case Termination::Converged:
      return 0;
    case Termination::IterationCap:
    case Termination::TimeBudget:
      return 2;
    case Termination::Error:
      return 1;
  }
  return 1;
}

inline Json summary_json(const std::string& algo, const SolveResult& r, const Json& metadata, double wall_time) {
  Json s = {{"algo", algo},
            {"termination", to_string(r.termination)},
            {"iterations", r.trace.empty() ? 0 : r.trace.back().k},
            {"final_objective", r.trace.empty() ? Json(nullptr) : Json(r.trace.back().objective)},
            {"final_gap", nullptr},
            {"gap_lower", nullptr},
            {"gap_upper", nullptr},
            {"wall_time_s", wall_time},
            {"problem", metadata}};
  if (!r.trace.empty() && r.trace.back().gap_lower) {
    s["gap_lower"] = *r.trace.back().gap_lower;
    s["gap_upper"] = *r.trace.back().gap_upper;
    s["final_gap"] = *r.trace.back().gap_upper - *r.trace.back().gap_lower;
  }
  if (!r.error.empty()) s["error"] = r.error;
  return s;
}

inline void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write '" + path.string() + "'");
  f << text;
}

inline int cmd_solve(const Json& settings, const Context& ctx) {
  try {
    check_keys(settings);
    LoadedProblem lp = load_problem(settings);
    const SolverConfig cfg = make_config(settings, lp);
    const std::string algo = settings.value("algo", std::string("spadmm"));
    const bool timing = settings.value("timing", false);
    ctx.info("solving with " + algo + ", " + std::to_string(lp.problem.num_blocks()) + " blocks");

    const TraceObserver observer = [&](const TraceRecord& t, const IterateState&) {
      if (ctx.level < LogLevel::Debug) return;
      std::ostringstream line;
      line << "k=" << t.k << " residual=" << io::format_double(t.total_residual)
           << " objective=" << io::format_double(t.objective);
      if (t.gap_lower) line << " gap=" << io::format_double(*t.gap_upper - *t.gap_lower);
      ctx.debug(line.str());
    };

    const auto t0 = std::chrono::steady_clock::now();
    SolveResult result;
    if (algo == "spadmm") {
      result = solve(lp.problem, cfg, observer);
    } else if (algo == "admm") {
      result = admm_minimize(lp.problem, cfg, observer);
    } else if (algo == "spfw") {
      SpfwOptions opt;
      opt.max_iters = cfg.max_iters;
      opt.trace_every = cfg.gap_every;
      opt.time_budget_s = cfg.time_budget_s;
      opt.best_response_tol = cfg.best_response_tol;
      opt.init = cfg.init;
      result = spfw_solve(lp.problem, opt, observer);
    } else {
      throw ArgumentError("unknown algorithm '" + algo + "' (expected spadmm, spfw or admm)");
    }
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    Json meta = lp.metadata;
    meta["config"] = io::config_to_json(cfg);
    const Json summary = summary_json(algo, result, meta, wall);
    if (settings.contains("out")) {
      const std::filesystem::path dir = settings.at("out").get<std::string>();
      std::filesystem::create_directories(dir);
      std::ostringstream csv, jsonl;
      io::write_trace_csv(csv, result.trace, timing);
      io::write_trace_jsonl(jsonl, result.trace, timing);
      write_file(dir / "trace.csv", csv.str());
      write_file(dir / "trace.jsonl", jsonl.str());
      write_file(dir / "summary.json", summary.dump(2) + "\n");
    }
    ctx.out << summary.dump(2) << '\n';
    if (result.termination == Termination::Error) ctx.err << "error: " << result.error << '\n';
    return exit_code(result.termination);
  } catch (const std::exception& e) {
    ctx.err << "error: " << e.what() << '\n';
    return 1;
  }
}

struct CompareRow {
  int nodes = 0;
  std::size_t edges = 0;
  std::string algo;
  double gap = 0.0;
  double time_s = 0.0;
};

inline double final_gap(const SolveResult& r) {
  for (auto it = r.trace.rbegin(); it != r.trace.rend(); ++it)
    if (it->gap_lower) return *it->gap_upper - *it->gap_lower;
  return kInf;
}

// Routing instances of each size, both algorithms under the same budget.
// budget_s is wall clock; budget_iters makes the table reproducible.
inline int cmd_compare(const Json& settings, const Context& ctx) {
  try {
    check_keys(settings);
    if (!settings.contains("sizes") || !settings.at("sizes").is_array() || settings.at("sizes").empty())
      throw ArgumentError("compare: need a non-empty list of sizes");
    const double budget_s = settings.value("budget_s", 10.0);
    const std::size_t budget_iters = settings.value("budget_iters", std::size_t{0});
    if (budget_iters == 0 && !(budget_s > 0.0)) throw ArgumentError("compare: budget must be positive");
    const bool timing = settings.value("timing", false);

    std::vector<CompareRow> rows;
    for (const auto& size : settings.at("sizes")) {
      Json per = settings;
      per.erase("sizes");
      per.erase("budget_s");
      per.erase("budget_iters");
      per["benchmark"] = "routing";
      per["nodes"] = size.get<int>();
      LoadedProblem lp = load_problem(per);
      SolverConfig cfg = make_config(per, lp);
      if (budget_iters > 0) {
        cfg.max_iters = budget_iters;
        cfg.time_budget_s = 0.0;
      } else {
        cfg.max_iters = std::numeric_limits<std::size_t>::max();
        cfg.time_budget_s = budget_s;
      }
      const std::size_t edges = lp.metadata.at("edges").get<std::size_t>();
      ctx.info("compare: " + std::to_string(size.get<int>()) + " nodes, " + std::to_string(edges) + " edges");

      auto t0 = std::chrono::steady_clock::now();
      const SolveResult admm = solve(lp.problem, cfg);
      const double t_admm = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (admm.termination == Termination::Error) throw Error("spadmm: " + admm.error);

      SpfwOptions opt;
      opt.max_iters = cfg.max_iters;
      opt.time_budget_s = cfg.time_budget_s;
      opt.trace_every = cfg.gap_every;
      opt.best_response_tol = cfg.best_response_tol;
      opt.init = cfg.init;
      t0 = std::chrono::steady_clock::now();
      const SolveResult fw = spfw_solve(lp.problem, opt);
      const double t_fw = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      if (fw.termination == Termination::Error) throw Error("spfw: " + fw.error);

      rows.push_back({size.get<int>(), edges, "spadmm", final_gap(admm), timing ? t_admm : 0.0});
      rows.push_back({size.get<int>(), edges, "spfw", final_gap(fw), timing ? t_fw : 0.0});
    }

    std::ostringstream csv;
    csv << "nodes,edges,algo,gap,time_s\n";
    for (const auto& r : rows)
      csv << r.nodes << ',' << r.edges << ',' << r.algo << ',' << io::format_double(r.gap) << ','
          << io::format_double(r.time_s) << '\n';
    if (settings.contains("out")) {
      const std::filesystem::path path = settings.at("out").get<std::string>();
      if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
      write_file(path, csv.str());
    }
    ctx.out << csv.str();
    return 0;
  } catch (const std::exception& e) {
    ctx.err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace spadmm::cli
