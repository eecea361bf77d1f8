#include "choquard/choquard.h"

#include "choquard/config.hpp"
#include "choquard/error.hpp"
#include "choquard/io.hpp"
#include "choquard/verify.hpp"

#include <cmath>
#include <cstdlib>
#include <cstring>
#include <optional>

using namespace choquard;

struct chq_context {
  RunConfig cfg;
  Model model;
  std::optional<ExtremalResult> extremal;
};

struct chq_extremal {
  ExtremalResult result;
  RunConfig cfg;
};

struct chq_solution {
  Solution sol;
  RunConfig cfg;
};

struct chq_sweep {
  BranchDiagram diagram;
  RunConfig cfg;
};

namespace {

thread_local std::string g_last_error;

chq_status fail(chq_status code, const std::string& msg) {
  g_last_error = msg;
  return code;
}

// Runs fn, translating exceptions into status codes.
template <class Fn>
chq_status guarded(Fn&& fn) {
  try {
    g_last_error.clear();
    return fn();
  } catch (const ConfigError& e) {
    return fail(CHQ_ERR_CONFIG, e.what());
  } catch (const NonConvergence& e) {
    return fail(CHQ_ERR_NONCONVERGENCE, e.what());
  } catch (const InvariantViolation& e) {
    return fail(CHQ_ERR_INVARIANT, e.what());
  } catch (const NoRoots& e) {
    return fail(CHQ_ERR_NO_ROOTS, e.what());
  } catch (const InvalidArgument& e) {
    return fail(CHQ_ERR_INVALID_ARGUMENT, e.what());
  } catch (const DomainError& e) {
    return fail(CHQ_ERR_INVALID_ARGUMENT, e.what());
  } catch (const ZeroField& e) {
    return fail(CHQ_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::exception& e) {
    return fail(CHQ_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(CHQ_ERR_INTERNAL, "unknown failure");
  }
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out)
    throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

const ExtremalResult& ensure_extremal(chq_context* ctx) {
  if (!ctx->extremal)
    ctx->extremal = minimize_lambda_n(ctx->model, ctx->cfg.extremal_options());
  return *ctx->extremal;
}

double resolve_lambda(chq_context* ctx, double lambda, int relative) {
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw InvalidArgument("lambda must be finite and >= 0");
  return relative ? lambda * ensure_extremal(ctx).lambda_n : lambda;
}

} // namespace

extern "C" {

const char* chq_version(void) { return "0.1.0"; }

const char* chq_last_error(void) { return g_last_error.c_str(); }

const char* chq_status_name(chq_status status) {
  switch (status) {
  case CHQ_OK: return "ok";
  case CHQ_ERR_USAGE: return "usage";
  case CHQ_ERR_CONFIG: return "config";
  case CHQ_ERR_NONCONVERGENCE: return "nonconvergence";
  case CHQ_ERR_INVARIANT: return "invariant";
  case CHQ_ERR_INVALID_ARGUMENT: return "invalid_argument";
  case CHQ_ERR_NO_ROOTS: return "no_roots";
  case CHQ_ERR_IO: return "io";
  case CHQ_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

void chq_string_free(char* s) { std::free(s); }

chq_status chq_context_create(const char* config_json, chq_context** out) {
  if (!out)
    return fail(CHQ_ERR_USAGE, "out is null");
  *out = nullptr;
  return guarded([&] {
    const RunConfig cfg = config_json && *config_json ? RunConfig::from_json(config_json) : RunConfig{};
    cfg.validate();
    *out = new chq_context{cfg, cfg.make_model(), std::nullopt};
    return CHQ_OK;
  });
}

chq_status chq_context_load(const char* path, chq_context** out) {
  if (!out || !path)
    return fail(CHQ_ERR_USAGE, "null argument");
  *out = nullptr;
  return guarded([&] {
    const RunConfig cfg = RunConfig::load(path);
    *out = new chq_context{cfg, cfg.make_model(), std::nullopt};
    return CHQ_OK;
  });
}

void chq_context_free(chq_context* ctx) { delete ctx; }

chq_status chq_context_config_json(const chq_context* ctx, char** out) {
  if (!ctx || !out)
    return fail(CHQ_ERR_USAGE, "null argument");
  return guarded([&] {
    *out = dup(ctx->cfg.to_json());
    return CHQ_OK;
  });
}

chq_status chq_extremal_compute(chq_context* ctx, chq_extremal** out) {
  if (!ctx || !out)
    return fail(CHQ_ERR_USAGE, "null argument");
  *out = nullptr;
  return guarded([&] {
    try {
      *out = new chq_extremal{ensure_extremal(ctx), ctx->cfg};
      return CHQ_OK;
    } catch (const NonConvergence& e) {
      // Keep the lowest quotient reached among the seeds.
      const auto opts = ctx->cfg.extremal_options();
      std::optional<ExtremalResult> best;
      for (const auto& name : seed_profile_names()) {
        auto r = minimize_lambda_n_from(ctx->model, seed_profile(ctx->model.grid, name), opts, name);
        if (!best || r.lambda_n < best->lambda_n)
          best = std::move(r);
      }
      *out = new chq_extremal{*best, ctx->cfg};
      return fail(CHQ_ERR_NONCONVERGENCE, e.what());
    }
  });
}

double chq_extremal_lambda_n(const chq_extremal* ex) { return ex ? ex->result.lambda_n : std::nan(""); }
double chq_extremal_lambda_e(const chq_extremal* ex) { return ex ? ex->result.lambda_e : std::nan(""); }
double chq_extremal_el_residual(const chq_extremal* ex) { return ex ? ex->result.el_residual_sup : std::nan(""); }
int chq_extremal_converged(const chq_extremal* ex) { return ex && ex->result.converged ? 1 : 0; }

chq_status chq_extremal_to_json(const chq_extremal* ex, char** out) {
  if (!ex || !out)
    return fail(CHQ_ERR_USAGE, "null argument");
  return guarded([&] {
    *out = dup(extremal_to_json(ex->result, ex->cfg));
    return CHQ_OK;
  });
}

void chq_extremal_free(chq_extremal* ex) { delete ex; }

chq_status chq_solve(chq_context* ctx, double lambda, int relative, chq_branch branch, chq_solution** out) {
  if (!ctx || !out)
    return fail(CHQ_ERR_USAGE, "null argument");
  if (branch != CHQ_BRANCH_PLUS && branch != CHQ_BRANCH_MINUS)
    return fail(CHQ_ERR_USAGE, "unknown branch");
  *out = nullptr;
  return guarded([&] {
    const double lam = resolve_lambda(ctx, lambda, relative);
    const auto opts = ctx->cfg.solver_options();
    const auto& ex = ensure_extremal(ctx);
    Solution s;
    if (lam == 0.0) {
      if (branch == CHQ_BRANCH_PLUS)
        throw NoRoots("N_plus is empty when lambda = 0");
      s = solve_lambda_zero(ctx->model, opts, &ex.minimizer);
    } else if (lam == ex.lambda_n) {
      // Reached only through the increasing sequence lambda_j -> lambda_n.
      auto lim = limit_to_lambda_n(ctx->model, ex, opts);
      s = branch == CHQ_BRANCH_PLUS ? std::move(lim.u) : std::move(lim.v);
    } else {
      const BranchTag tag = branch == CHQ_BRANCH_PLUS ? BranchTag::N_plus : BranchTag::N_minus;
      s = solve_branch_cold(ctx->model.with_lambda(lam), tag, opts, &ex.minimizer);
    }
    *out = new chq_solution{std::move(s), ctx->cfg};
    return CHQ_OK;
  });
}

double chq_solution_lambda(const chq_solution* s) { return s ? s->sol.lambda : std::nan(""); }
double chq_solution_energy(const chq_solution* s) { return s ? s->sol.energy : std::nan(""); }
double chq_solution_norm(const chq_solution* s) { return s ? s->sol.norm() : std::nan(""); }
double chq_solution_residual(const chq_solution* s) { return s ? s->sol.residual_sup : std::nan(""); }

size_t chq_solution_values(const chq_solution* s, double* values, size_t cap) {
  if (!s)
    return 0;
  const auto v = s->sol.u.values();
  if (values)
    std::memcpy(values, v.data(), std::min(cap, v.size()) * sizeof(double));
  return v.size();
}

chq_status chq_solution_to_json(const chq_solution* s, char** out) {
  if (!s || !out)
    return fail(CHQ_ERR_USAGE, "null argument");
  return guarded([&] {
    *out = dup(solution_to_json(s->sol, s->cfg));
    return CHQ_OK;
  });
}

void chq_solution_free(chq_solution* s) { delete s; }

chq_status chq_sweep_run(chq_context* ctx, double lambda_min, double lambda_max, int steps, int relative,
                         chq_sweep** out) {
  if (!ctx || !out)
    return fail(CHQ_ERR_USAGE, "null argument");
  *out = nullptr;
  if (steps < 2)
    return fail(CHQ_ERR_USAGE, "a sweep needs at least 2 steps");
  if (!(lambda_min > 0.0 && lambda_max > lambda_min))
    return fail(CHQ_ERR_USAGE, "sweep needs 0 < lambda_min < lambda_max");
  return guarded([&] {
    const auto& ex = ensure_extremal(ctx);
    const double scale = relative ? ex.lambda_n : 1.0;
    std::vector<double> lambdas;
    for (int k = 0; k < steps; ++k)
      lambdas.push_back(scale * (lambda_min + (lambda_max - lambda_min) * k / (steps - 1)));
    auto* sw = new chq_sweep{sweep(ctx->model, lambdas, ctx->cfg.solver_options(), &ex.minimizer), ctx->cfg};
    *out = sw;
    if (!sw->diagram.all_ok())
      return fail(CHQ_ERR_NONCONVERGENCE, std::to_string(chq_sweep_failed_rows(sw)) + " sweep rows failed");
    return CHQ_OK;
  });
}

size_t chq_sweep_rows(const chq_sweep* sw) { return sw ? sw->diagram.rows.size() : 0; }

size_t chq_sweep_failed_rows(const chq_sweep* sw) {
  if (!sw)
    return 0;
  size_t n = 0;
  for (const auto& r : sw->diagram.rows)
    n += r.ok() ? 0 : 1;
  return n;
}

chq_status chq_sweep_row(const chq_sweep* sw, size_t i, double* lambda, double* e1, double* e2) {
  if (!sw)
    return fail(CHQ_ERR_USAGE, "null argument");
  if (i >= sw->diagram.rows.size())
    return fail(CHQ_ERR_INVALID_ARGUMENT, "row index out of range");
  const auto& r = sw->diagram.rows[i];
  if (lambda)
    *lambda = r.lambda;
  if (e1)
    *e1 = r.e1();
  if (e2)
    *e2 = r.e2();
  return CHQ_OK;
}

chq_status chq_sweep_to_csv(const chq_sweep* sw, char** out) {
  if (!sw || !out)
    return fail(CHQ_ERR_USAGE, "null argument");
  return guarded([&] {
    *out = dup(sweep_to_csv(sw->diagram, sw->cfg));
    return CHQ_OK;
  });
}

void chq_sweep_free(chq_sweep* sw) { delete sw; }

chq_status chq_fibering_csv(chq_context* ctx, const char* profile, double t_min, double t_max, int samples,
                            char** out, int* clipped) {
  if (!ctx || !out)
    return fail(CHQ_ERR_USAGE, "null argument");
  return guarded([&] {
    const std::string name = profile ? profile : "gaussian";
    const Field u = name == "extremal" ? ensure_extremal(ctx).minimizer : seed_profile(ctx->model.grid, name);
    const auto tab = fibering_table(u, ctx->model, t_min, t_max, samples);
    if (clipped)
      *clipped = tab.clipped ? 1 : 0;
    *out = dup(fibering_to_csv(tab, ctx->cfg));
    return CHQ_OK;
  });
}

chq_status chq_verify(chq_context* ctx, const char* suite, char** report) {
  if (!ctx || !report)
    return fail(CHQ_ERR_USAGE, "null argument");
  return guarded([&] {
    const auto rep = run_verify(ctx->cfg, suite ? suite : "fast");
    std::string text;
    for (const auto& r : rep.results)
      text += std::to_string(r.id) + " " + (r.pass ? "PASS" : "FAIL") + " " + r.name + ": " + r.detail + "\n";
    *report = dup(text);
    if (!rep.all_pass())
      return fail(CHQ_ERR_INVARIANT, "verification failed");
    return CHQ_OK;
  });
}

double chq_cpq(double p, double q) {
  try {
    return cpq(p, q);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return std::nan("");
  }
}

double chq_cpq_tilde(double p, double q) {
  try {
    return cpq_tilde(p, q);
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return std::nan("");
  }
}

} // extern "C"
