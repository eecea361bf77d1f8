#include "choquard/config.hpp"

#include "choquard/error.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace choquard {

namespace {

using nlohmann::json;

void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object())
    throw ConfigError("'" + where + "' must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.count(key))
      throw ConfigError("unknown key '" + (where.empty() ? key : where + "." + key) + "'");
  }
}

template <class T>
void read(const json& obj, const char* key, const std::string& where, T& out) {
  auto it = obj.find(key);
  if (it == obj.end())
    return;
  try {
    if constexpr (std::is_same_v<T, bool>) {
      if (!it->is_boolean())
        throw ConfigError("");
    } else if constexpr (std::is_integral_v<T>) {
      if (!it->is_number_integer())
        throw ConfigError("");
    } else {
      if (!it->is_number())
        throw ConfigError("");
    }
    out = it->get<T>();
  } catch (const std::exception&) {
    throw ConfigError("'" + where + "." + key + "' has the wrong type");
  }
}

} // namespace

std::string format_double(double x) {
  if (std::isnan(x))
    return "NaN";
  if (std::isinf(x))
    return x > 0 ? "Infinity" : "-Infinity";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

RunConfig RunConfig::from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  reject_unknown(doc, "", {"grid", "params", "solver", "rng_seed"});

  RunConfig cfg;
  if (doc.contains("grid")) {
    const auto& g = doc["grid"];
    reject_unknown(g, "grid", {"N", "r_max", "count", "spacing"});
    read(g, "N", "grid", cfg.dimension);
    read(g, "r_max", "grid", cfg.r_max);
    read(g, "count", "grid", cfg.count);
    if (g.contains("spacing")) {
      const auto& sp = g["spacing"];
      if (sp == "uniform")
        cfg.spacing = Spacing::uniform;
      else if (sp == "graded")
        cfg.spacing = Spacing::graded;
      else
        throw ConfigError("grid.spacing must be \"uniform\" or \"graded\"");
    }
  }
  if (doc.contains("params")) {
    const auto& p = doc["params"];
    reject_unknown(p, "params", {"alpha", "p", "q", "v0", "s"});
    read(p, "alpha", "params", cfg.alpha);
    read(p, "p", "params", cfg.p);
    read(p, "q", "params", cfg.q);
    read(p, "v0", "params", cfg.v0);
    read(p, "s", "params", cfg.s);
  }
  if (doc.contains("solver")) {
    const auto& s = doc["solver"];
    reject_unknown(s, "solver", {"tol_residual", "max_iters", "step0", "multistarts", "warm_start"});
    read(s, "tol_residual", "solver", cfg.tol_residual);
    read(s, "max_iters", "solver", cfg.max_iters);
    read(s, "step0", "solver", cfg.step0);
    read(s, "multistarts", "solver", cfg.multistarts);
    read(s, "warm_start", "solver", cfg.warm_start);
  }
  read(doc, "rng_seed", "", cfg.rng_seed);
  cfg.validate();
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json(ss.str());
}

void RunConfig::validate() const {
  if (dimension < 3)
    throw ConfigError("grid.N must be >= 3");
  if (!(r_max > 0.0) || !std::isfinite(r_max))
    throw ConfigError("grid.r_max must be positive");
  if (count < 16)
    throw ConfigError("grid.count must be >= 16");
  if (!(alpha > 0.0 && alpha < dimension))
    throw ConfigError("params.alpha must lie in (0, N)");
  const double lo = (dimension + alpha) / dimension;
  const double hi = (dimension + alpha) / (dimension - 2.0);
  if (!(p > lo && p < hi))
    throw ConfigError("params.p must lie in ((N+alpha)/N, (N+alpha)/(N-2)) = (" + format_double(lo) + ", " +
                      format_double(hi) + ")");
  if (!(q >= 1.1 && q <= 1.9))
    throw ConfigError("params.q must lie in [1.1, 1.9]");
  if (!(v0 > 0.0))
    throw ConfigError("params.v0 must be positive");
  if (!(s > dimension))
    throw ConfigError("params.s must exceed N");
  if (!(tol_residual > 0.0))
    throw ConfigError("solver.tol_residual must be positive");
  if (max_iters <= 0)
    throw ConfigError("solver.max_iters must be positive");
  if (!(step0 > 0.0))
    throw ConfigError("solver.step0 must be positive");
  if (multistarts < 1)
    throw ConfigError("solver.multistarts must be >= 1");
}

std::string RunConfig::to_json() const {
  std::string out = "{\"grid\":{\"N\":" + std::to_string(dimension) + ",\"r_max\":" + format_double(r_max) +
                    ",\"count\":" + std::to_string(count) + ",\"spacing\":\"" +
                    (spacing == Spacing::uniform ? "uniform" : "graded") + "\"}";
  out += ",\"params\":{\"alpha\":" + format_double(alpha) + ",\"p\":" + format_double(p) +
         ",\"q\":" + format_double(q) + ",\"v0\":" + format_double(v0) + ",\"s\":" + format_double(s) + "}";
  out += ",\"solver\":{\"tol_residual\":" + format_double(tol_residual) +
         ",\"max_iters\":" + std::to_string(max_iters) + ",\"step0\":" + format_double(step0) +
         ",\"multistarts\":" + std::to_string(multistarts) +
         ",\"warm_start\":" + (warm_start ? "true" : "false") + "}";
  out += ",\"rng_seed\":" + std::to_string(rng_seed) + "}";
  return out;
}

std::uint64_t RunConfig::hash() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : to_json()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

ProblemParams RunConfig::problem(double lambda) const {
  ProblemParams prm;
  prm.dimension = dimension;
  prm.alpha = alpha;
  prm.p = p;
  prm.q = q;
  prm.pot = PotentialSpec{v0, s};
  prm.lambda = lambda;
  return prm;
}

GridPtr RunConfig::make_grid() const { return RadialGrid::build(dimension, r_max, count, spacing); }

Model RunConfig::make_model(double lambda) const { return Model::build(make_grid(), problem(lambda)); }

SolverOptions RunConfig::solver_options() const {
  SolverOptions o;
  o.tol_residual = tol_residual;
  o.max_iters = max_iters;
  o.step0 = step0;
  o.multistarts = multistarts;
  o.warm_start = warm_start;
  return o;
}

ExtremalOptions RunConfig::extremal_options() const {
  ExtremalOptions o;
  o.max_iters = 5 * max_iters;
  o.multistarts = multistarts;
  return o;
}

} // namespace choquard
