#include "choquard/choquard.h"

#include <CLI11.hpp>

#include <cstdio>
#include <string>

namespace {

int exit_code(chq_status st) {
  switch (st) {
  case CHQ_OK: return 0;
  case CHQ_ERR_CONFIG: return 2;
  case CHQ_ERR_NONCONVERGENCE:
  case CHQ_ERR_NO_ROOTS:
  case CHQ_ERR_INTERNAL: return 3;
  case CHQ_ERR_INVARIANT: return 4;
  default: return 1;
  }
}

void report(chq_status st) {
  if (st != CHQ_OK)
    std::fprintf(stderr, "choquard: %s: %s\n", chq_status_name(st), chq_last_error());
}

// Writes text to path, or stdout when path is empty. Returns false on I/O failure.
bool emit(const std::string& path, const char* text) {
  if (path.empty() || path == "-") {
    std::fputs(text, stdout);
    return true;
  }
  FILE* f = std::fopen(path.c_str(), "wb");
  if (!f) {
    std::fprintf(stderr, "choquard: cannot open '%s' for writing\n", path.c_str());
    return false;
  }
  const bool ok = std::fputs(text, f) >= 0;
  return std::fclose(f) == 0 && ok;
}

chq_context* open_context(const std::string& config, chq_status& st) {
  chq_context* ctx = nullptr;
  st = config.empty() ? chq_context_create(nullptr, &ctx) : chq_context_load(config.c_str(), &ctx);
  report(st);
  return ctx;
}

struct Owned {
  char* s = nullptr;
  ~Owned() { chq_string_free(s); }
};

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Nehari-manifold solver for the Choquard concave-convex problem"};
  app.require_subcommand(1);
  std::string config, out;

  auto* ext = app.add_subcommand("extremal", "compute lambda_n, lambda_e and the minimizer");
  ext->add_option("--config", config, "config JSON file")->check(CLI::ExistingFile);
  ext->add_option("--out", out, "output JSON (stdout when omitted)");

  double lambda = 0.0;
  bool relative = false;
  std::string branch = "plus";
  auto* solve = app.add_subcommand("solve", "solve one branch at one lambda");
  solve->add_option("--config", config, "config JSON file")->check(CLI::ExistingFile);
  solve->add_option("--lambda", lambda, "lambda value")->required();
  solve->add_flag("--relative-to-lambda-n", relative, "read lambda as a fraction of lambda_n");
  solve->add_option("--branch", branch, "plus (N+) or minus (N-)")->check(CLI::IsMember({"plus", "minus"}));
  solve->add_option("--out", out, "output JSON (stdout when omitted)");

  double lmin = 0.0, lmax = 0.0;
  int steps = 24;
  auto* sweep = app.add_subcommand("sweep", "two-branch continuation sweep in lambda");
  sweep->add_option("--config", config, "config JSON file")->check(CLI::ExistingFile);
  sweep->add_option("--lambda-min", lmin, "first lambda")->required();
  sweep->add_option("--lambda-max", lmax, "last lambda")->required();
  sweep->add_option("--steps", steps, "number of lambda values")->check(CLI::Range(2, 100000));
  sweep->add_flag("--relative-to-lambda-n", relative, "read lambdas as fractions of lambda_n");
  sweep->add_option("--out", out, "output CSV (stdout when omitted)");

  std::string profile = "gaussian";
  double tmin = 0.0, tmax = 0.0;
  int samples = 400;
  auto* fib = app.add_subcommand("fibering", "tabulate Q_n and Q_e along one ray");
  fib->add_option("--config", config, "config JSON file")->check(CLI::ExistingFile);
  fib->add_option("--profile", profile, "gaussian, exp_poly, wide_gaussian or extremal");
  fib->add_option("--t-min", tmin, "first t (default t_max / samples)");
  fib->add_option("--t-max", tmax, "last t (default and upper limit t_zero)");
  fib->add_option("--samples", samples, "number of t values")->check(CLI::Range(2, 10000000));
  fib->add_option("--out", out, "output CSV (stdout when omitted)");

  std::string suite = "fast";
  auto* ver = app.add_subcommand("verify", "run the property checks");
  ver->add_option("--config", config, "config JSON file")->check(CLI::ExistingFile);
  ver->add_option("--suite", suite, "suite name")->check(CLI::IsMember({"fast"}));
  ver->add_option("--out", out, "report file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  chq_status st = CHQ_OK;
  chq_context* ctx = open_context(config, st);
  if (!ctx)
    return exit_code(st);

  Owned text;
  if (*ext) {
    chq_extremal* ex = nullptr;
    st = chq_extremal_compute(ctx, &ex);
    report(st);
    if (ex) {
      const chq_status js = chq_extremal_to_json(ex, &text.s);
      if (js != CHQ_OK)
        st = js;
      chq_extremal_free(ex);
    }
  } else if (*solve) {
    chq_solution* sol = nullptr;
    st = chq_solve(ctx, lambda, relative, branch == "plus" ? CHQ_BRANCH_PLUS : CHQ_BRANCH_MINUS, &sol);
    report(st);
    if (sol) {
      st = chq_solution_to_json(sol, &text.s);
      chq_solution_free(sol);
    }
  } else if (*sweep) {
    chq_sweep* sw = nullptr;
    st = chq_sweep_run(ctx, lmin, lmax, steps, relative, &sw);
    report(st);
    if (sw) {
      const chq_status cs = chq_sweep_to_csv(sw, &text.s);
      if (cs != CHQ_OK)
        st = cs;
      chq_sweep_free(sw);
    }
  } else if (*fib) {
    int clipped = 0;
    st = chq_fibering_csv(ctx, profile.c_str(), tmin, tmax, samples, &text.s, &clipped);
    report(st);
    if (clipped)
      std::fprintf(stderr, "choquard: warning: t range clipped to (0, t_zero]\n");
  } else if (*ver) {
    st = chq_verify(ctx, suite.c_str(), &text.s);
    if (st != CHQ_ERR_INVARIANT)
      report(st);
  }
  chq_context_free(ctx);

  if (text.s && !emit(out, text.s))
    return 1;
  return exit_code(st);
}
