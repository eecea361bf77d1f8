#include "choquard/verify.hpp"

#include "choquard/error.hpp"
#include "choquard/extremal.hpp"
#include "choquard/fibering.hpp"
#include "choquard/solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <random>
#include <sstream>

namespace choquard {

namespace {

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

Field random_smooth(const GridPtr& g, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> amp(0.2, 2.0), width(0.1, 3.0), poly(0.0, 1.0);
  double a[3], b[3], c[3];
  for (int k = 0; k < 3; ++k) {
    a[k] = amp(rng);
    b[k] = width(rng);
    c[k] = poly(rng);
  }
  return Field::sample(g, [&](double r) {
    double v = 0.0;
    for (int k = 0; k < 3; ++k)
      v += a[k] * (1.0 + c[k] * r * r) * std::exp(-b[k] * r * r);
    return v;
  });
}

// u times a bounded oscillating profile: E is only C^1 where u vanishes, so
// directions are kept inside the support and decay of u.
Field random_direction(const Field& u, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> coef(-1.0, 1.0), freq(0.2, 3.0);
  const double c0 = coef(rng), c1 = coef(rng), k1 = freq(rng), c2 = coef(rng), k2 = freq(rng);
  Field w = Field::sample(u.grid(), [&](double r) { return c0 + c1 * std::cos(k1 * r) + c2 * std::sin(k2 * r); });
  return hadamard(w, u);
}

struct Context {
  const RunConfig& cfg;
  Model model;
  std::mt19937_64 rng;
  ExtremalResult extremal;
  bool have_extremal = false;
  std::vector<double> minus_norms;
  BranchDiagram diagram;
  bool have_diagram = false;
};

CriterionResult riesz_oracle(Context& ctx) {
  CriterionResult res{1, "riesz oracle", false, ""};
  auto g = RadialGrid::build(3, ctx.cfg.r_max, ctx.cfg.count);
  RieszOperator newton(g, 2.0, RieszBackend::newtonian_exact);
  const Field chi = Field::indicator_ball(g, 1.0);
  const double at0 = newton.potential_at(chi, 0.0);
  const double at2 = newton.potential_at(chi, 2.0);
  const double e0 = std::abs(at0 - 0.5) / 0.5, e2 = std::abs(at2 - 1.0 / 6.0) * 6.0;

  auto gs = RadialGrid::build(3, ctx.cfg.r_max, std::min<std::size_t>(ctx.cfg.count, 1024));
  RieszOperator n2(gs, 2.0, RieszBackend::newtonian_exact), dense(gs, 2.0, RieszBackend::dense_kernel);
  double worst = 0.0;
  for (const Field& f : {Field::sample(gs, [](double r) { return std::exp(-r * r); }), Field::indicator_ball(gs, 1.0)}) {
    const Field a = n2.apply(f), b = dense.apply(f);
    for (std::size_t i = 0; i < a.size(); ++i)
      worst = std::max(worst, std::abs(a[i] - b[i]) / std::abs(a[i]));
  }
  res.pass = e0 <= 1e-4 && e2 <= 1e-4 && worst <= 1e-4;
  res.detail = fmt("rel err at 0: %.2e, at 2: %.2e, dense vs newtonian: %.2e", e0, e2, worst);
  return res;
}

CriterionResult hls(Context& ctx) {
  CriterionResult res{2, "HLS bound", false, ""};
  const auto& op = *ctx.model.riesz;
  const double t = 2.0 * ctx.cfg.dimension / (ctx.cfg.dimension + ctx.cfg.alpha);
  int violations = 0;
  double worst = 0.0;
  for (int k = 0; k < 100; ++k) {
    const auto c = hls_check(op, random_smooth(ctx.model.grid, ctx.rng), random_smooth(ctx.model.grid, ctx.rng), t);
    violations += c.lhs > c.bound;
    worst = std::max(worst, c.lhs / c.bound);
  }
  res.pass = violations == 0;
  res.detail = fmt("violations %.0f of 100, max lhs/bound %.4f", violations, worst);
  return res;
}

CriterionResult derivatives(Context& ctx) {
  CriterionResult res{3, "derivative correctness", false, ""};
  const Model m = ctx.model.with_lambda(1.0);
  double worst1 = 0.0, worst2 = 0.0;
  for (int k = 0; k < 50; ++k) {
    const Field u = random_smooth(m.grid, ctx.rng);
    const Field w = random_direction(u, ctx.rng);
    const double h = 1e-4;
    const double fd = (energy(u + h * w, m) - energy(u - h * w, m)) / (2.0 * h);
    const double dd = directional_derivative(u, w, m);
    const auto cw = fiber_coefficients(w, m);
    const auto cu = fiber_coefficients(u, m);
    const double scale = std::sqrt(cu.A * cw.A) + std::abs(dd);
    worst1 = std::max(worst1, std::abs(fd - dd) / scale);

    // Richardson-extrapolated second difference of t -> E(t u) at t = 1.
    auto second_diff = [&](double d) {
      return (energy((1.0 + d) * u, m) - 2.0 * energy(u, m) + energy((1.0 - d) * u, m)) / (d * d);
    };
    const double h2 = 4e-3;
    const double d2 = (4.0 * second_diff(0.5 * h2) - second_diff(h2)) / 3.0;
    const double sf = second_form(u, m);
    worst2 = std::max(worst2, std::abs(d2 - sf) / (cu.A + std::abs(sf)));
  }
  res.pass = worst1 <= 1e-6 && worst2 <= 1e-6;
  res.detail = fmt("max rel err first %.2e, second %.2e", worst1, worst2);
  return res;
}

void need_extremal(Context& ctx) {
  if (!ctx.have_extremal) {
    ctx.extremal = minimize_lambda_n(ctx.model, ctx.cfg.extremal_options());
    ctx.have_extremal = true;
  }
}

CriterionResult fibering_algebra(Context& ctx) {
  CriterionResult res{4, "fibering algebra", false, ""};
  need_extremal(ctx);
  const double p = ctx.cfg.p, q = ctx.cfg.q;
  std::uniform_real_distribution<double> frac(0.0, 1.0), logc(-2.0, 2.0);
  double ratio_t = 0.0, ratio_l = 0.0;
  int chain_fail = 0, link_fail = 0;
  for (int k = 0; k < 1000; ++k) {
    // Rays of random fields, rescaled so the triple spans several decades.
    const auto c = fiber_coefficients(std::pow(10.0, logc(ctx.rng)) * random_smooth(ctx.model.grid, ctx.rng), ctx.model);
    const auto a = analyze(c);
    ratio_t = std::max(ratio_t, std::abs(a.t_e / a.t_n / std::pow(p, 1.0 / (2.0 * p - 2.0)) - 1.0));
    ratio_l = std::max(ratio_l, std::abs(a.lambda_e_u / a.lambda_n_u / (cpq_tilde(p, q) / cpq(p, q)) - 1.0));
    double lambda = 0.0;
    while (!(lambda > 0.0))
      lambda = frac(ctx.rng) * ctx.extremal.lambda_e;
    const auto nr = nehari_roots(c, lambda);
    const auto er = energy_roots(c, lambda);
    const bool ok = 0.0 < nr.t_plus && nr.t_plus < er.t_plus && er.t_plus < a.t_n && a.t_n < a.t_e &&
                    a.t_e < nr.t_minus && nr.t_minus < er.t_minus;
    chain_fail += !ok;
    link_fail += ok ? 0 : !(er.t_plus < a.t_n);
  }
  FiberCoefficients unit{1.0, 1.0, 1.0, 2.0, 1.5};
  const auto roots = nehari_roots(unit, 0.4);
  const bool consts = std::abs(cpq(2.0, 1.5) - 0.534992) <= 1e-6 && std::abs(cpq_tilde(2.0, 1.5) - 0.477162) <= 1e-6;
  const bool rts = std::abs(roots.t_plus - 0.1696) <= 1e-3 && std::abs(roots.t_minus - 0.7291) <= 1e-3;
  res.pass = ratio_t <= 1e-12 && ratio_l <= 1e-12 && chain_fail == 0 && consts && rts;
  res.detail = fmt("t ratio err %.1e, Lambda ratio err %.1e, chain failures %.0f", ratio_t, ratio_l, chain_fail);
  if (chain_fail)
    res.detail += fmt(" (%.0f at t_e+ < t_n)", link_fail);
  return res;
}

CriterionResult extremal_values(Context& ctx) {
  CriterionResult res{5, "extremal values", false, ""};
  need_extremal(ctx);
  const auto& ex = ctx.extremal;
  const double ratio = ex.lambda_e / ex.lambda_n;
  const double expected = cpq_tilde(ctx.cfg.p, ctx.cfg.q) / cpq(ctx.cfg.p, ctx.cfg.q);
  int probe_fail = 0;
  for (int k = 0; k < 20; ++k)
    probe_fail += lambda_n_of(random_smooth(ctx.model.grid, ctx.rng), ctx.model) < ex.lambda_n * (1.0 - 1e-8);

  // Minimizers from two coarser grids, both measured on the configured grid.
  RunConfig coarse = ctx.cfg;
  ExtremalOptions o = ctx.cfg.extremal_options();
  o.multistarts = 1;
  coarse.count = ctx.cfg.count / 4;
  const auto r4 = minimize_lambda_n(coarse.make_model(), o);
  coarse.count = ctx.cfg.count / 2;
  const auto r2 = minimize_lambda_n(coarse.make_model(), o);
  const double res4 = el_residual(r4, ctx.model).sup, res2 = el_residual(r2, ctx.model).sup;

  // Tabulated value at the flagship exponents; it is 5.3e-6 below the exact 3 2^{1/4}/4.
  const bool flagship_exponents = ctx.cfg.p == 2.0 && ctx.cfg.q == 1.5;
  const bool tabulated = !flagship_exponents || std::abs(ratio - 0.891900) <= 1e-6;
  res.pass = ex.lambda_n > 0.0 && std::abs(ratio - expected) <= 1e-6 && tabulated && probe_fail == 0 &&
             ex.el_residual_sup <= 1e-4 * ex.el_residual_scale && res4 >= 2.0 * res2;
  res.detail = fmt("lambda_n %.10g, EL residual/scale %.2e, refinement gain %.2f", ex.lambda_n,
                   ex.el_residual_sup / ex.el_residual_scale, res4 / res2);
  if (!tabulated)
    res.detail += fmt(", ratio %.8f outside 0.891900 +- 1e-6", ratio);
  if (probe_fail)
    res.detail += ", probe below lambda_n";
  return res;
}

CriterionResult two_branches(Context& ctx) {
  CriterionResult res{6, "two branches and sign of E2", false, ""};
  need_extremal(ctx);
  const auto opts = ctx.cfg.solver_options();
  bool ok = true;
  double worst = 0.0;
  for (double f : {0.3, 0.5, 0.7, 0.95}) {
    const Model m = ctx.model.with_lambda(f * ctx.extremal.lambda_n);
    try {
      const auto u = solve_branch_cold(m, BranchTag::N_plus, opts, &ctx.extremal.minimizer);
      const auto v = solve_branch_cold(m, BranchTag::N_minus, opts, &ctx.extremal.minimizer);
      worst = std::max({worst, u.relative_residual(), v.relative_residual()});
      ok = ok && u.relative_residual() <= 1e-6 && v.relative_residual() <= 1e-6 && u.energy < 0.0 &&
           u.branch == BranchTag::N_plus && v.branch == BranchTag::N_minus;
      ctx.minus_norms.push_back(v.norm());
    } catch (const Error&) {
      ok = false;
    }
  }

  std::vector<double> lambdas;
  for (int k = 0; k < 24; ++k)
    lambdas.push_back((0.05 + 0.95 * k / 23.0) * ctx.extremal.lambda_n);
  ctx.diagram = sweep(ctx.model, lambdas, opts, &ctx.extremal.minimizer);
  ctx.have_diagram = true;
  const double le = ctx.extremal.lambda_e;
  int crossings = 0;
  bool bracketed = false;
  for (std::size_t i = 0; i < ctx.diagram.rows.size(); ++i) {
    const auto& row = ctx.diagram.rows[i];
    if (!row.ok()) {
      ok = false;
      continue;
    }
    ctx.minus_norms.push_back(row.v->norm());
    ok = ok && row.e1() < 0.0 && row.u->branch == BranchTag::N_plus && row.v->branch == BranchTag::N_minus;
    if (row.lambda < le && row.sign_e2() != 1)
      ok = false;
    if (row.lambda > le && row.sign_e2() != -1)
      ok = false;
    if (i > 0 && ctx.diagram.rows[i - 1].ok() && ctx.diagram.rows[i - 1].sign_e2() != row.sign_e2()) {
      ++crossings;
      bracketed = ctx.diagram.rows[i - 1].lambda < le && le < row.lambda;
    }
  }
  res.pass = ok && crossings == 1 && bracketed;
  res.detail = fmt("max residual/scale %.2e, E2 sign changes %.0f", worst, crossings);
  return res;
}

CriterionResult monotone_energies(Context& ctx) {
  CriterionResult res{7, "monotone energies and continuity", false, ""};
  if (!ctx.have_diagram) {
    res.detail = "sweep unavailable";
    return res;
  }
  const auto& rows = ctx.diagram.rows;
  bool ok = ctx.diagram.all_ok();
  for (std::size_t i = 0; ok && i < rows.size(); ++i) {
    ok = rows[i].e1() < rows[i].e2();
    if (i > 0)
      ok = ok && rows[i].e1() < rows[i - 1].e1() && rows[i].e2() < rows[i - 1].e2();
  }
  const auto opts = ctx.cfg.solver_options();
  double worst = 0.0;
  try {
    const double lam = 0.5 * ctx.extremal.lambda_n;
    const Model m = ctx.model.with_lambda(lam);
    for (auto branch : {BranchTag::N_plus, BranchTag::N_minus}) {
      const auto base = solve_branch_cold(m, branch, opts, &ctx.extremal.minimizer);
      for (double f : {0.98, 1.02}) {
        const auto near = solve_branch(ctx.model.with_lambda(f * lam), branch, base.u, opts);
        const Field d = near.u - base.u;
        worst = std::max(worst, std::sqrt(l2_inner(ctx.model.apply_operator(d), d)) / base.norm());
      }
    }
  } catch (const Error&) {
    ok = false;
  }
  res.pass = ok && worst <= 0.05;
  res.detail = fmt("max relative change over 2%% in lambda: %.3f", worst);
  return res;
}

CriterionResult small_lambda(Context& ctx) {
  CriterionResult res{8, "limit lambda -> 0", false, ""};
  need_extremal(ctx);
  const auto opts = ctx.cfg.solver_options();
  try {
    const auto v0 = solve_lambda_zero(ctx.model, opts, &ctx.extremal.minimizer);
    std::vector<double> norm_u, e1, dist_v;
    for (double f : {0.2, 0.1, 0.05, 0.02}) {
      const Model m = ctx.model.with_lambda(f * ctx.extremal.lambda_n);
      const auto u = solve_branch_cold(m, BranchTag::N_plus, opts, &ctx.extremal.minimizer);
      const auto v = solve_branch(m, BranchTag::N_minus, v0.u, opts);
      ctx.minus_norms.push_back(v.norm());
      norm_u.push_back(u.norm());
      e1.push_back(u.energy);
      const Field d = v.u - v0.u;
      dist_v.push_back(std::sqrt(l2_inner(ctx.model.apply_operator(d), d)));
    }
    bool ok = norm_u.back() <= 0.2 * norm_u.front();
    for (std::size_t i = 0; i < norm_u.size(); ++i) {
      ok = ok && e1[i] < 0.0;
      if (i > 0)
        ok = ok && norm_u[i] < norm_u[i - 1] && e1[i] > e1[i - 1] && dist_v[i] < dist_v[i - 1];
    }
    res.pass = ok;
    res.detail = fmt("||u|| %.3e -> %.3e, ||v - v0|| final %.3e", norm_u.front(), norm_u.back(), dist_v.back());
  } catch (const Error& e) {
    res.detail = e.what();
  }
  return res;
}

CriterionResult at_lambda_n(Context& ctx) {
  CriterionResult res{9, "two solutions at lambda_n", false, ""};
  need_extremal(ctx);
  try {
    const auto lim = limit_to_lambda_n(ctx.model, ctx.extremal, ctx.cfg.solver_options());
    ctx.minus_norms.push_back(lim.v.norm());
    const double r = 0.9 * ctx.cfg.r_max;
    double worst = 0.0;
    for (const auto* s : {&lim.u, &lim.v}) {
      const double mass = lq_norm_pow(s->u, ctx.cfg.p);
      worst = std::max(worst, std::abs(farfield_ratio(*ctx.model.riesz, s->u, ctx.cfg.p, r) / mass - 1.0));
    }
    res.pass = lim.u.branch != BranchTag::N_zero && lim.v.branch != BranchTag::N_zero && lim.u.energy < lim.v.energy &&
               lim.v.energy < 0.0 && worst <= 0.1;
    res.detail = fmt("E1 %.6g, E2 %.6g, farfield deviation %.2e", lim.u.energy, lim.v.energy, worst);
  } catch (const Error& e) {
    res.detail = e.what();
  }
  return res;
}

CriterionResult lower_bound(Context& ctx) {
  CriterionResult res{10, "uniform lower bound on N_minus", false, ""};
  auto norms = ctx.minus_norms;
  if (norms.empty()) {
    res.detail = "no N_minus solutions";
    return res;
  }
  std::sort(norms.begin(), norms.end());
  const double median = norms.size() % 2 ? norms[norms.size() / 2]
                                         : 0.5 * (norms[norms.size() / 2 - 1] + norms[norms.size() / 2]);
  res.pass = norms.front() >= 0.5 * median;
  res.detail = fmt("min %.4g, median %.4g over %.0f solutions", norms.front(), median, norms.size());
  return res;
}

} // namespace

bool VerifyReport::all_pass() const {
  return !results.empty() && std::all_of(results.begin(), results.end(), [](const auto& r) { return r.pass; });
}

VerifyReport run_verify(const RunConfig& cfg, const std::string& suite) {
  if (suite != "fast")
    throw InvalidArgument("unknown verify suite '" + suite + "'");
  Context ctx{cfg, cfg.make_model(), std::mt19937_64(cfg.rng_seed), {}, false, {}, {}, false};
  VerifyReport rep;
  using Check = CriterionResult (*)(Context&);
  for (Check check : {riesz_oracle, hls, derivatives, fibering_algebra, extremal_values, two_branches, monotone_energies,
                      small_lambda, at_lambda_n, lower_bound}) {
    try {
      rep.results.push_back(check(ctx));
    } catch (const Error& e) {
      rep.results.push_back({static_cast<int>(rep.results.size()) + 1, "error", false, e.what()});
    }
  }
  return rep;
}

} // namespace choquard
