#include "choquard/io.hpp"

#include "choquard/error.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <span>

namespace choquard {

namespace {

std::string hash_hex(const RunConfig& cfg) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%016" PRIx64, cfg.hash());
  return buf;
}

// Emits one JSON object with keys in insertion order.
class JsonObject {
public:
  JsonObject& num(const char* key, double v) { return raw(key, format_double(v)); }
  JsonObject& integer(const char* key, long long v) { return raw(key, std::to_string(v)); }
  JsonObject& str(const char* key, const std::string& v) { return raw(key, "\"" + v + "\""); }
  JsonObject& boolean(const char* key, bool v) { return raw(key, v ? "true" : "false"); }
  JsonObject& array(const char* key, std::span<const double> xs) {
    std::string s = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i)
        s += ",";
      s += format_double(xs[i]);
    }
    return raw(key, s + "]");
  }
  JsonObject& raw(const char* key, const std::string& v) {
    body_ += body_.empty() ? "" : ",";
    body_ += "\"" + std::string(key) + "\":" + v;
    return *this;
  }
  std::string str() const { return "{" + body_ + "}"; }

private:
  std::string body_;
};

std::string grid_block(const RunConfig& cfg) {
  return JsonObject()
      .integer("N", cfg.dimension)
      .num("r_max", cfg.r_max)
      .integer("count", static_cast<long long>(cfg.count))
      .str();
}

std::string params_block(const RunConfig& cfg) {
  return JsonObject().num("alpha", cfg.alpha).num("p", cfg.p).num("q", cfg.q).num("v0", cfg.v0).num("s", cfg.s).str();
}

std::string csv_num(double x) { return std::isfinite(x) ? format_double(x) : "nan"; }

} // namespace

std::string extremal_to_json(const ExtremalResult& r, const RunConfig& cfg) {
  return JsonObject()
             .num("lambda_n", r.lambda_n)
             .num("lambda_e", r.lambda_e)
             .num("ratio", r.lambda_e / r.lambda_n)
             .integer("iterations", r.iterations)
             .num("el_residual_sup", r.el_residual_sup)
             .num("el_residual_scale", r.el_residual_scale)
             .boolean("converged", r.converged)
             .str("seed", r.seed)
             .raw("grid", grid_block(cfg))
             .raw("params", params_block(cfg))
             .array("minimizer_values", r.minimizer.values())
             .raw("config", cfg.to_json())
             .str("config_hash", hash_hex(cfg))
             .str() +
         "\n";
}

std::string solution_to_json(const Solution& s, const RunConfig& cfg) {
  return JsonObject()
             .num("lambda", s.lambda)
             .str("branch", std::string(to_string(s.branch)))
             .num("energy", s.energy)
             .num("A", s.coef.A)
             .num("B", s.coef.B)
             .num("G", s.coef.G)
             .num("second_form", s.second_form_val)
             .num("residual_sup", s.residual_sup)
             .num("residual_scale", s.residual_scale)
             .integer("iterations", s.iterations)
             .array("values", s.u.values())
             .raw("config", cfg.to_json())
             .str("config_hash", hash_hex(cfg))
             .str() +
         "\n";
}

std::string sweep_to_csv(const BranchDiagram& d, const RunConfig& cfg) {
  std::string out = "lambda,E1,E2,sign_E2,norm_u,norm_v,iter_u,iter_v,residual_u,residual_v\n";
  out += "# config_hash=" + hash_hex(cfg) + "\n";
  out += "# config=" + cfg.to_json() + "\n";
  const double nan = std::nan("");
  for (const auto& row : d.rows) {
    out += csv_num(row.lambda) + "," + csv_num(row.e1()) + "," + csv_num(row.e2()) + "," +
           std::to_string(row.sign_e2()) + "," + csv_num(row.u ? row.u->norm() : nan) + "," +
           csv_num(row.v ? row.v->norm() : nan) + "," + std::to_string(row.u ? row.u->iterations : -1) + "," +
           std::to_string(row.v ? row.v->iterations : -1) + "," + csv_num(row.u ? row.u->residual_sup : nan) + "," +
           csv_num(row.v ? row.v->residual_sup : nan) + "\n";
  }
  return out;
}

FiberingTable fibering_table(const Field& u, const Model& model, double t_min, double t_max, int samples) {
  if (samples < 2)
    throw InvalidArgument("fibering needs at least 2 samples");
  FiberingTable tab;
  const auto c = fiber_coefficients(u, model);
  tab.analysis = analyze(c);
  tab.t_zero = t_zero(c);
  if (t_max <= 0.0)
    t_max = tab.t_zero;
  if (t_max > tab.t_zero) {
    t_max = tab.t_zero;
    tab.clipped = true;
  }
  if (t_min <= 0.0) {
    if (t_min < 0.0)
      tab.clipped = true;
    t_min = t_max / samples;
  }
  if (!(t_min < t_max))
    throw InvalidArgument("fibering range is empty after clipping to (0, t_zero]");
  for (int i = 0; i < samples; ++i) {
    const double t = t_min + (t_max - t_min) * i / (samples - 1);
    tab.t.push_back(t);
    tab.qn.push_back(q_n(c, t));
    tab.qe.push_back(q_e(c, t));
  }
  return tab;
}

std::string fibering_to_csv(const FiberingTable& tab, const RunConfig& cfg) {
  std::string out = "t,Qn,Qe\n";
  const auto& a = tab.analysis;
  out += "# t_n=" + format_double(a.t_n) + ",t_e=" + format_double(a.t_e) +
         ",lambda_n_u=" + format_double(a.lambda_n_u) + ",lambda_e_u=" + format_double(a.lambda_e_u) +
         ",t_zero=" + format_double(tab.t_zero) + "\n";
  out += "# config_hash=" + hash_hex(cfg) + "\n";
  for (std::size_t i = 0; i < tab.t.size(); ++i)
    out += format_double(tab.t[i]) + "," + format_double(tab.qn[i]) + "," + format_double(tab.qe[i]) + "\n";
  return out;
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out)
    throw Error("cannot open '" + path + "' for writing");
  out << contents;
  if (!out)
    throw Error("write to '" + path + "' failed");
}

} // namespace choquard
