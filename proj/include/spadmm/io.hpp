#pragma once

#include <cmath>
#include <cstdio>
#include <fstream>
#include <memory>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"

#include "spadmm/convex_set.hpp"
#include "spadmm/driver.hpp"
#include "spadmm/error.hpp"
#include "spadmm/objectives.hpp"
#include "spadmm/problem.hpp"

namespace spadmm {

using Json = nlohmann::json;

namespace io {

// Shortest round-trippable decimal form, used for every number we write.
inline std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline Json number_to_json(double v) {
  if (std::isinf(v)) return v > 0 ? Json("inf") : Json("-inf");
  return v;
}

inline double number_from_json(const Json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "+inf") return kInf;
    if (s == "-inf") return -kInf;
    throw ArgumentError("json: expected number, got string '" + s + "'");
  }
  if (!j.is_number()) throw ArgumentError("json: expected number");
  return j.get<double>();
}

inline Json vector_to_json(const Vector& v) {
  Json a = Json::array();
  for (Index i = 0; i < v.size(); ++i) a.push_back(number_to_json(v[i]));
  return a;
}

inline Vector vector_from_json(const Json& j) {
  if (!j.is_array()) throw ArgumentError("json: expected array");
  Vector v(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) v[static_cast<Index>(i)] = number_from_json(j[i]);
  return v;
}

// --- set descriptors -------------------------------------------------------

inline Json set_to_json(const ConvexSet& s) {
  switch (s.kind()) {
    case ConvexSet::Kind::Box:
      return {{"type", "box"}, {"lower", vector_to_json(s.as_box().lower)}, {"upper", vector_to_json(s.as_box().upper)}};
    case ConvexSet::Kind::ScaledSimplex:
      return {{"type", "scaled-simplex"}, {"total", s.as_simplex().total}, {"dim", s.as_simplex().dim}};
    case ConvexSet::Kind::Halfspace: {
      const auto& h = s.as_halfspace();
      return {{"type", "halfspace"},
              {"a", vector_to_json(h.a)},
              {"b", h.b},
              {"sense", h.sense == ConvexSet::Sense::LessEqual ? "le" : "ge"}};
    }
    case ConvexSet::Kind::AffineBox: {
      const auto& ab = s.as_affine_box();
      Json flat = Json::array();
      for (Index r = 0; r < ab.A.rows(); ++r)
        for (Index c = 0; c < ab.A.cols(); ++c) flat.push_back(ab.A(r, c));
      return {{"type", "affine-box"},         {"rows", ab.A.rows()},
              {"cols", ab.A.cols()},          {"A", flat},
              {"b", vector_to_json(ab.b)},    {"lower", vector_to_json(ab.lower)},
              {"upper", vector_to_json(ab.upper)}};
    }
    case ConvexSet::Kind::Intersection: {
      Json parts = Json::array();
      for (const auto& p : s.as_intersection().parts) parts.push_back(set_to_json(p));
      return {{"type", "intersection"}, {"sets", parts}};
    }
  }
  throw UnsupportedError("set_to_json: unknown set kind");
}

inline ConvexSet set_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("type")) throw ArgumentError("set descriptor: missing 'type'");
  const auto type = j.at("type").get<std::string>();
  if (type == "box") return ConvexSet::box(vector_from_json(j.at("lower")), vector_from_json(j.at("upper")));
  if (type == "scaled-simplex") return ConvexSet::scaled_simplex(j.at("total").get<double>(), j.at("dim").get<Index>());
  if (type == "halfspace") {
    const auto sense = j.at("sense").get<std::string>();
    if (sense != "le" && sense != "ge") throw ArgumentError("halfspace: sense must be 'le' or 'ge'");
    return ConvexSet::halfspace(vector_from_json(j.at("a")), j.at("b").get<double>(),
                                sense == "le" ? ConvexSet::Sense::LessEqual : ConvexSet::Sense::GreaterEqual);
  }
  if (type == "affine-box") {
    const Index rows = j.at("rows").get<Index>(), cols = j.at("cols").get<Index>();
    const Vector flat = vector_from_json(j.at("A"));
    if (flat.size() != rows * cols) throw ArgumentError("affine-box: A has wrong number of entries");
    Matrix A(rows, cols);
    for (Index r = 0; r < rows; ++r)
      for (Index c = 0; c < cols; ++c) A(r, c) = flat[r * cols + c];
    return ConvexSet::affine_box(A, vector_from_json(j.at("b")), vector_from_json(j.at("lower")),
                                 vector_from_json(j.at("upper")));
  }
  if (type == "intersection") {
    std::vector<ConvexSet> parts;
    for (const auto& p : j.at("sets")) parts.push_back(set_from_json(p));
    return ConvexSet::intersection(std::move(parts));
  }
  throw ArgumentError("set descriptor: unknown type '" + type + "'");
}

// --- problems --------------------------------------------------------------

inline Json block_to_json(const BlockObjective& b) {
  Json params;
  if (const auto* bq = dynamic_cast<const BilinearQuadratic*>(&b)) {
    params = {{"qx", bq->qx()}, {"b", bq->b()}, {"qy", bq->qy()}, {"cx", bq->cx()}, {"cy", bq->cy()}};
  } else if (const auto* pc = dynamic_cast<const PowerCapacity*>(&b)) {
    params = {{"sigma", pc->sigma()}};
  } else if (const auto* sq = dynamic_cast<const SeparableQuadratic*>(&b)) {
    params = {{"center", vector_to_json(sq->center())}, {"weight", sq->weight()}, {"linear", vector_to_json(sq->linear())}};
  } else {
    throw UnsupportedError("block_to_json: objective type '" + b.type() + "' is not serializable");
  }
  return {{"type", b.type()}, {"kind", to_string(b.kind())}, {"dims", {b.dims().a, b.dims().b}}, {"params", params}};
}

inline BlockPtr block_from_json(const Json& j) {
  const auto type = j.at("type").get<std::string>();
  const Json& p = j.at("params");
  BlockPtr block;
  if (type == "bilinear-quadratic") {
    block = std::make_shared<BilinearQuadratic>(p.at("qx").get<double>(), p.at("b").get<double>(),
                                                p.at("qy").get<double>(), p.value("cx", 0.0), p.value("cy", 0.0));
  } else if (type == "power-capacity") {
    block = std::make_shared<PowerCapacity>(p.at("sigma").get<double>());
  } else if (type == "separable-quadratic") {
    block = std::make_shared<SeparableQuadratic>(vector_from_json(p.at("center")), p.at("weight").get<double>(),
                                                 vector_from_json(p.at("linear")));
  } else {
    throw ArgumentError("block: unknown objective type '" + type + "'");
  }
  if (j.contains("kind") && j.at("kind").get<std::string>() != to_string(block->kind()))
    throw ArgumentError("block: kind does not match objective type '" + type + "'");
  if (j.contains("dims")) {
    const auto dims = j.at("dims");
    if (dims.size() != 2 || dims[0].get<Index>() != block->dims().a || dims[1].get<Index>() != block->dims().b)
      throw ArgumentError("block: dims do not match objective type '" + type + "'");
  }
  return block;
}

inline Json problem_to_json(const SaddleProblem& p, const Json& metadata = Json::object()) {
  Json blocks = Json::array(), la = Json::array(), lb = Json::array();
  for (std::size_t i = 0; i < p.num_blocks(); ++i) {
    blocks.push_back(block_to_json(p.block(i)));
    la.push_back(set_to_json(p.local_a(i)));
    lb.push_back(set_to_json(p.local_b(i)));
  }
  Json j = {{"blocks", blocks},
            {"local_sets", {{"a", la}, {"b", lb}}},
            {"global_sets", {{"a", set_to_json(p.global_a())}, {"b", set_to_json(p.global_b())}}}};
  if (!metadata.empty()) j["metadata"] = metadata;
  return j;
}

inline SaddleProblem problem_from_json(const Json& j) {
  std::vector<BlockPtr> blocks;
  std::vector<ConvexSet> la, lb;
  for (const auto& b : j.at("blocks")) blocks.push_back(block_from_json(b));
  for (const auto& s : j.at("local_sets").at("a")) la.push_back(set_from_json(s));
  for (const auto& s : j.at("local_sets").at("b")) lb.push_back(set_from_json(s));
  return SaddleProblem(std::move(blocks), std::move(la), std::move(lb), set_from_json(j.at("global_sets").at("a")),
                       set_from_json(j.at("global_sets").at("b")));
}

inline Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ArgumentError("cannot parse '" + path + "': " + e.what());
  }
}

// --- solver config -----------------------------------------------------------

inline void apply_config_json(const Json& j, SolverConfig& cfg) {
  if (!j.is_object()) throw ArgumentError("config: expected a JSON object");
  if (j.contains("rho_a")) cfg.rho_a = j.at("rho_a").get<double>();
  if (j.contains("rho_b")) cfg.rho_b = j.at("rho_b").get<double>();
  if (j.contains("eps_primal")) cfg.eps_primal = j.at("eps_primal").get<double>();
  if (j.contains("eps_dual")) cfg.eps_dual = j.at("eps_dual").get<double>();
  if (j.contains("max_iters")) cfg.max_iters = j.at("max_iters").get<std::size_t>();
  if (j.contains("block_solver")) cfg.block_solver = parse_block_solver(j.at("block_solver").get<std::string>());
  if (j.contains("block_solver_tol")) cfg.block_solver_tol = j.at("block_solver_tol").get<double>();
  if (j.contains("block_solver_max_iters")) cfg.block_solver_max_iters = j.at("block_solver_max_iters").get<std::size_t>();
  if (j.contains("warm_start")) cfg.warm_start = j.at("warm_start").get<bool>();
  if (j.contains("seed")) cfg.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("workers")) cfg.workers = j.at("workers").get<std::size_t>();
  if (j.contains("init")) {
    const auto s = j.at("init").get<std::string>();
    if (s == "zeros") cfg.init = InitMode::Zeros;
    else if (s == "uniform-projected") cfg.init = InitMode::UniformProjected;
    else throw ArgumentError("config: unknown init mode '" + s + "'");
  }
  if (j.contains("gap_every")) cfg.gap_every = j.at("gap_every").get<std::size_t>();
  if (j.contains("best_response_tol")) cfg.best_response_tol = j.at("best_response_tol").get<double>();
  if (j.contains("time_budget_s")) cfg.time_budget_s = j.at("time_budget_s").get<double>();
}

inline Json config_to_json(const SolverConfig& cfg) {
  return {{"rho_a", cfg.rho_a},
          {"rho_b", cfg.rho_b},
          {"eps_primal", cfg.eps_primal},
          {"eps_dual", cfg.eps_dual},
          {"max_iters", cfg.max_iters},
          {"block_solver", to_string(cfg.block_solver)},
          {"block_solver_tol", cfg.block_solver_tol},
          {"block_solver_max_iters", cfg.block_solver_max_iters},
          {"warm_start", cfg.warm_start},
          {"seed", cfg.seed},
          {"workers", cfg.workers},
          {"init", cfg.init == InitMode::Zeros ? "zeros" : "uniform-projected"},
          {"gap_every", cfg.gap_every},
          {"best_response_tol", cfg.best_response_tol},
          {"time_budget_s", cfg.time_budget_s}};
}

// --- traces ----------------------------------------------------------------

inline constexpr const char* kTraceHeader = "k,ra,rb,sa,sb,total_residual,objective,gap_lower,gap_upper,wall_time_s";

// Wall time is written only when record_time is set; otherwise the column
// holds 0 so that trace files are reproducible byte for byte.
inline void write_trace_csv(std::ostream& out, const std::vector<TraceRecord>& trace, bool record_time = false) {
  out << kTraceHeader << '\n';
  for (const auto& r : trace) {
    out << r.k << ',' << format_double(r.ra) << ',' << format_double(r.rb) << ',' << format_double(r.sa) << ','
        << format_double(r.sb) << ',' << format_double(r.total_residual) << ',' << format_double(r.objective) << ','
        << (r.gap_lower ? format_double(*r.gap_lower) : "") << ','
        << (r.gap_upper ? format_double(*r.gap_upper) : "") << ','
        << (record_time ? format_double(r.wall_time) : "0") << '\n';
  }
}

inline void write_trace_jsonl(std::ostream& out, const std::vector<TraceRecord>& trace, bool record_time = false) {
  for (const auto& r : trace) {
    Json j = {{"k", r.k},
              {"ra", r.ra},
              {"rb", r.rb},
              {"sa", r.sa},
              {"sb", r.sb},
              {"total_residual", r.total_residual},
              {"objective", r.objective},
              {"gap_lower", r.gap_lower ? Json(*r.gap_lower) : Json(nullptr)},
              {"gap_upper", r.gap_upper ? Json(*r.gap_upper) : Json(nullptr)},
              {"wall_time_s", record_time ? r.wall_time : 0.0},
              {"block_residual", r.block_residual}};
    out << j.dump() << '\n';
  }
}

}  // namespace io
}  // namespace spadmm
