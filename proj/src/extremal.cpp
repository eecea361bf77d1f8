#include "choquard/extremal.hpp"

#include "choquard/error.hpp"
#include "choquard/krylov.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <future>
#include <limits>

namespace choquard {

namespace {

struct DescentOutcome {
  Field u;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

using ValueFn = std::function<double(const Field&)>;
using GradientFn = std::function<Field(const Field&)>;

Field normalize_lq(Field u, double q) {
  const double g = lq_norm_pow(u, q);
  if (!(g > 0.0))
    throw ZeroField();
  u *= std::pow(g, -1.0 / q);
  return u;
}

// Preconditioned steepest descent for a 0-homogeneous objective: the L^2
// gradient is mapped through (-Delta + V)^{-1}, steps are Armijo-backtracked,
// and iterates are kept on the unit L^q sphere.
DescentOutcome descend(const Model& model, const Field& seed, const ValueFn& value,
                       const GradientFn& gradient, const ExtremalOptions& opts) {
  const double q = model.params.q;
  DescentOutcome out;
  out.u = normalize_lq(seed, q);
  out.value = value(out.u);

  std::deque<double> history{out.value};
  double tau = 0.0;
  for (int it = 0; it < opts.max_iters; ++it) {
    const Field grad = gradient(out.u);
    const Field dir = model.solve_operator(grad);
    const double slope = l2_inner(grad, dir);
    if (!(slope > 0.0)) {
      out.converged = true;
      break;
    }
    if (tau == 0.0)
      tau = opts.step0 * std::sqrt(l2_inner(model.apply_operator(out.u), out.u) / slope);

    bool accepted = false;
    for (int tries = 0; tries < 60; ++tries) {
      Field cand = out.u - tau * dir;
      double jc = std::numeric_limits<double>::infinity();
      try {
        jc = value(cand);
      } catch (const ZeroField&) {
      }
      if (std::isfinite(jc) && jc <= out.value - 1e-4 * tau * slope) {
        out.u = normalize_lq(std::move(cand), q);
        out.value = jc;
        accepted = true;
        break;
      }
      tau *= 0.5;
    }
    ++out.iterations;
    if (!accepted) {
      // No descent possible at round-off level: the iterate is stationary.
      out.converged = true;
      break;
    }
    tau *= 2.0;

    history.push_back(out.value);
    if (history.size() > 11)
      history.pop_front();
    if (history.size() == 11 && history.front() - out.value < opts.tol) {
      out.converged = true;
      break;
    }
  }
  return out;
}

double log_lambda_n(const Field& u, const Model& model) {
  return std::log(lambda_n_of(fiber_coefficients(u, model)));
}

Field grad_log_lambda_n(const Field& u, const Model& model) {
  const auto& prm = model.params;
  const double p = prm.p, q = prm.q;
  const auto c = fiber_coefficients(u, model);
  const double a = (2.0 * p - q) / (2.0 * p - 2.0);
  const double b = (2.0 - q) / (2.0 * p - 2.0);
  Field g = (2.0 * a / c.A) * model.apply_operator(u);
  g -= (q / c.G) * sublinear_term(u, q);
  g -= (2.0 * p * b / c.B) * choquard_force(*model.riesz, u, p);
  return g;
}

// Lambda_e(u) = Q_e(t_e(u)), evaluated on the fibering map itself.
double log_lambda_e_fibered(const Field& u, const Model& model) {
  const auto c = fiber_coefficients(u, model);
  return std::log(q_e(c, t_e(c)));
}

// grad Lambda_e(u) = t_e grad R_e(t_e u) since Q_e'(t_e) = 0.
Field grad_log_lambda_e_fibered(const Field& u, const Model& model) {
  const auto& prm = model.params;
  const auto c = fiber_coefficients(u, model);
  const double te = t_e(c);
  const Field w = te * u;
  const auto cw = c.scaled(te);
  const double re = prm.q * (0.5 * cw.A - cw.B / (2.0 * prm.p)) / cw.G;
  Field g = model.apply_operator(w);
  g -= choquard_force(*model.riesz, w, prm.p);
  g -= re * sublinear_term(w, prm.q);
  g *= te * prm.q / cw.G / re;
  return g;
}

struct Bordered {
  Field v;
  double mu = 0.0;
  bool converged = false;
};

// Newton-GMRES on  L v - p F(v) - (q/2) mu |v|^{q-2} v = 0,
//                  (2-q) A(v) - (2p-q) B(v) = 0,
// whose solutions are the t_n-scaled critical points of Lambda_n with mu = Lambda_n.
Bordered polish_extremal(const Model& model, Field v, double mu) {
  const auto& prm = model.params;
  const double p = prm.p, q = prm.q;
  const std::size_t m = v.size();
  const auto weights = model.grid->weights();
  std::vector<double> w_ext(weights.begin(), weights.end());
  w_ext.push_back(1.0);

  auto eval = [&](const Field& x, double mu_x, Field& phi, double& psi, double& scale) {
    const Field lx = model.apply_operator(x);
    const Field fx = choquard_force(*model.riesz, x, p);
    const Field sx = sublinear_term(x, q);
    phi = lx - p * fx;
    phi -= (0.5 * q * mu_x) * sx;
    const double a = l2_inner(lx, x);
    const double b = l2_inner(fx, x);
    psi = ((2.0 - q) * a - (2.0 * p - q) * b) / a;
    scale = std::max({lx.sup_norm(), p * fx.sup_norm(), 0.5 * q * mu_x * sx.sup_norm()});
  };

  Bordered out{v, mu, false};
  Field phi;
  double psi = 0.0, scale = 0.0;
  eval(out.v, out.mu, phi, psi, scale);
  double merit = std::hypot(std::sqrt(l2_inner(phi, phi)), psi);

  for (int step = 0; step < 40; ++step) {
    if (phi.sup_norm() <= 1e-11 * scale && std::abs(psi) <= 1e-12) {
      out.converged = true;
      break;
    }
    const Field lv = model.apply_operator(out.v);
    const Field fv = choquard_force(*model.riesz, out.v, p);
    const Field sv = sublinear_term(out.v, q);
    const double a = l2_inner(lv, out.v);

    LinearMap jac = [&](std::span<const double> x) {
      Field dv(model.grid, std::vector<double>(x.begin(), x.begin() + m));
      const double dmu = x[m];
      Field r = model.apply_operator(dv);
      r -= p * choquard_force_derivative(*model.riesz, out.v, dv, p);
      for (std::size_t i = 0; i < m; ++i) {
        if (out.v[i] != 0.0)
          r[i] -= 0.5 * q * out.mu * (q - 1.0) * std::pow(std::abs(out.v[i]), q - 2.0) * dv[i];
        r[i] -= 0.5 * q * sv[i] * dmu;
      }
      std::vector<double> y(r.values().begin(), r.values().end());
      y.push_back((2.0 * (2.0 - q) * l2_inner(lv, dv) - 2.0 * p * (2.0 * p - q) * l2_inner(fv, dv)) / a);
      return y;
    };
    LinearMap precond = [&](std::span<const double> x) {
      std::vector<double> y = model.op_matrix->solve(x.subspan(0, m));
      y.push_back(x[m]);
      return y;
    };
    std::vector<double> rhs(m + 1);
    for (std::size_t i = 0; i < m; ++i)
      rhs[i] = -phi[i];
    rhs[m] = -psi;
    const auto sol = gmres(jac, precond, rhs, w_ext, 1e-12, 80, 800);

    Field dv(model.grid, std::vector<double>(sol.x.begin(), sol.x.begin() + m));
    double alpha = 1.0;
    bool improved = false;
    for (int tries = 0; tries < 30; ++tries) {
      Field cand = out.v + alpha * dv;
      const double cand_mu = out.mu + alpha * sol.x[m];
      Field cphi;
      double cpsi = 0.0, cscale = 0.0;
      eval(cand, cand_mu, cphi, cpsi, cscale);
      const double cmerit = std::hypot(std::sqrt(l2_inner(cphi, cphi)), cpsi);
      if (cmerit < (1.0 - 1e-4 * alpha) * merit) {
        out.v = std::move(cand);
        out.mu = cand_mu;
        phi = std::move(cphi);
        psi = cpsi;
        scale = cscale;
        merit = cmerit;
        improved = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!improved) {
      out.converged = phi.sup_norm() <= 1e-9 * scale && std::abs(psi) <= 1e-10;
      break;
    }
  }
  return out;
}

} // namespace

Field seed_profile(const GridPtr& grid, const std::string& name) {
  if (name == "gaussian")
    return Field::sample(grid, [](double r) { return std::exp(-r * r); });
  if (name == "exp_poly")
    return Field::sample(grid, [](double r) { return (1.0 + r) * std::exp(-r); });
  if (name == "wide_gaussian")
    return Field::sample(grid, [](double r) { return std::exp(-0.25 * r * r); });
  throw InvalidArgument("unknown seed profile '" + name + "'");
}

const std::vector<std::string>& seed_profile_names() {
  static const std::vector<std::string> names{"gaussian", "exp_poly", "wide_gaussian"};
  return names;
}

double lambda_n_of(const Field& u, const Model& model) { return lambda_n_of(fiber_coefficients(u, model)); }

double lambda_e_of(const Field& u, const Model& model) { return lambda_e_of(fiber_coefficients(u, model)); }

ExtremalResult minimize_lambda_n_from(const Model& model, const Field& seed, const ExtremalOptions& opts,
                                      const std::string& seed_name) {
  if (seed.grid() != model.grid)
    throw GridMismatch();
  fiber_coefficients(seed, model);

  auto outcome = descend(
      model, seed, [&](const Field& u) { return log_lambda_n(u, model); },
      [&](const Field& u) { return grad_log_lambda_n(u, model); }, opts);

  ExtremalResult res;
  res.seed = seed_name;
  res.iterations = outcome.iterations;
  res.converged = outcome.converged;

  Field u = abs(outcome.u);
  if (opts.polish) {
    const auto c = fiber_coefficients(u, model);
    auto polished = polish_extremal(model, t_n(c) * u, lambda_n_of(c));
    if (polished.converged) {
      u = abs(polished.v);
      res.converged = true;
    }
  }
  res.minimizer = normalize_lq(u, model.params.q);
  const auto c = fiber_coefficients(res.minimizer, model);
  res.lambda_n = lambda_n_of(c);
  res.lambda_e = cpq_tilde(c.p, c.q) / cpq(c.p, c.q) * res.lambda_n;
  const auto report = el_residual(res, model);
  res.el_residual_sup = report.sup;
  res.el_residual_scale = report.scale;
  return res;
}

ExtremalResult minimize_lambda_n(const Model& model, const ExtremalOptions& opts) {
  const auto& names = seed_profile_names();
  const std::size_t starts = std::clamp<std::size_t>(opts.multistarts, 1, names.size());
  std::vector<std::future<ExtremalResult>> runs;
  for (std::size_t k = 0; k < starts; ++k) {
    runs.push_back(std::async(std::launch::async, [&, k] {
      return minimize_lambda_n_from(model, seed_profile(model.grid, names[k]), opts, names[k]);
    }));
  }
  std::vector<ExtremalResult> results;
  for (auto& r : runs)
    results.push_back(r.get());

  const ExtremalResult* best = nullptr;
  for (const auto& r : results) {
    if (r.converged && (!best || r.lambda_n < best->lambda_n))
      best = &r;
  }
  if (!best)
    throw NonConvergence("Lambda_n minimization did not converge from any seed");
  return *best;
}

ResidualReport el_residual(const ExtremalResult& result, const Model& model) {
  const auto& prm = model.params;
  Field u = result.minimizer.grid() == model.grid ? result.minimizer : resample(result.minimizer, model.grid);
  const auto c = fiber_coefficients(u, model);
  const Field v = t_n(c) * u;

  const Field t1 = 2.0 * model.apply_operator(v);
  const Field t2 = (2.0 * prm.p) * choquard_force(*model.riesz, v, prm.p);
  const Field t3 = (prm.q * result.lambda_n) * sublinear_term(v, prm.q);

  ResidualReport rep;
  double s1 = 0.0, s2 = 0.0, s3 = 0.0;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    rep.sup = std::max(rep.sup, std::abs(t1[i] - t2[i] - t3[i]));
    s1 = std::max(s1, std::abs(t1[i]));
    s2 = std::max(s2, std::abs(t2[i]));
    s3 = std::max(s3, std::abs(t3[i]));
  }
  rep.scale = std::max({s1, s2, s3});
  return rep;
}

double lambda_e_direct(const Model& model, const ExtremalOptions& opts, Field* minimizer) {
  const auto& names = seed_profile_names();
  const std::size_t starts = std::clamp<std::size_t>(opts.multistarts, 1, names.size());
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < starts; ++k) {
    auto outcome = descend(
        model, seed_profile(model.grid, names[k]),
        [&](const Field& u) { return log_lambda_e_fibered(u, model); },
        [&](const Field& u) { return grad_log_lambda_e_fibered(u, model); }, opts);
    const double value = std::exp(outcome.value);
    if (value < best) {
      best = value;
      if (minimizer)
        *minimizer = outcome.u;
    }
  }
  return best;
}

} // namespace choquard
