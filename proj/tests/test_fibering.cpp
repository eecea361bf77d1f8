#include "choquard/error.hpp"
#include "choquard/fibering.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace choquard;

namespace {

const FiberCoefficients kUnit{1.0, 1.0, 1.0, 2.0, 1.5};

oracle::Triple triple(const FiberCoefficients& c) { return {c.A, c.B, c.G, c.p, c.q}; }

FiberCoefficients random_coef(std::mt19937_64& rng, double p, double q) {
  std::uniform_real_distribution<double> logu(-3.0, 3.0);
  return {std::pow(10.0, logu(rng)), std::pow(10.0, logu(rng)), std::pow(10.0, logu(rng)), p, q};
}

} // namespace

TEST_CASE("constants against extended precision") {
  CHECK(std::abs(cpq(2.0, 1.5) - 0.534992) <= 1e-6);
  CHECK(std::abs(cpq_tilde(2.0, 1.5) - 0.477162) <= 1e-6);
  // At (2, 1.5) the ratio is 3 2^{1/4} / 4 = 0.8919053...
  CHECK(cpq_tilde(2.0, 1.5) / cpq(2.0, 1.5) == doctest::Approx(0.75 * std::pow(2.0, 0.25)).epsilon(1e-14));
  CHECK(std::abs(cpq_tilde(2.0, 1.5) / cpq(2.0, 1.5) - 0.891905) <= 1e-6);
  CHECK(cpq(2.0, 1.5) == doctest::Approx(oracle::cpq(2.0, 1.5)).epsilon(1e-15));
  CHECK(cpq_tilde(2.0, 1.5) == doctest::Approx(oracle::cpq_tilde(2.0, 1.5)).epsilon(1e-15));
  CHECK(cpq(2.0, 1.999) > 0.99);
  CHECK(cpq(2.0, 1.999) < 1.0);
  CHECK(cpq(2.0, 1.1) < 1.0);
  CHECK_THROWS_AS(cpq(2.0, 2.0), DomainError);
  CHECK_THROWS_AS(cpq(2.0, 1.0), DomainError);
  CHECK_THROWS_AS(cpq_tilde(1.0, 1.5), DomainError);

  std::mt19937_64 rng(41);
  std::uniform_real_distribution<double> pd(1.01, 4.0), qd(1.01, 1.99);
  for (int k = 0; k < 1000; ++k) {
    const double p = pd(rng), q = qd(rng);
    REQUIRE(cpq_tilde(p, q) < cpq(p, q));
    REQUIRE(cpq(p, q) == doctest::Approx(oracle::cpq(p, q)).epsilon(1e-13));
    REQUIRE(cpq_tilde(p, q) == doctest::Approx(oracle::cpq_tilde(p, q)).epsilon(1e-13));
  }
}

TEST_CASE("fibering maps on the unit triple") {
  CHECK(q_n(kUnit, 1.0) == doctest::Approx(0.0));
  CHECK(q_e(kUnit, 1.0) == doctest::Approx(0.375).epsilon(1e-15));
  CHECK(t_n(kUnit) == doctest::Approx(std::sqrt(0.2)).epsilon(1e-15));
  CHECK(t_e(kUnit) == doctest::Approx(std::sqrt(0.4)).epsilon(1e-15));
  CHECK(q_n(kUnit, 10.0) < 0.0);
  CHECK(q_n(kUnit, 1e3) < q_n(kUnit, 10.0));

  // A/B = (2p-q)/(2-q) puts t_n at 1.
  const FiberCoefficients unit_root{5.0, 1.0, 2.0, 2.0, 1.5};
  CHECK(t_n(unit_root) == doctest::Approx(1.0).epsilon(1e-15));
}

TEST_CASE("critical points, maxima and their values") {
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> pd(1.2, 3.0), qd(1.1, 1.9), logt(-3.0, 3.0);
  for (int k = 0; k < 200; ++k) {
    const double p = pd(rng), q = qd(rng);
    const auto c = random_coef(rng, p, q);
    const auto a = analyze(c);
    const auto o = triple(c);
    CHECK(a.t_n == doctest::Approx(o.argmax(&oracle::Triple::qn)).epsilon(1e-6));
    CHECK(a.t_e == doctest::Approx(o.argmax(&oracle::Triple::qe)).epsilon(1e-6));
    CHECK(a.t_e / a.t_n == doctest::Approx(std::pow(p, 1.0 / (2 * p - 2))).epsilon(1e-13));
    CHECK(a.lambda_e_u / a.lambda_n_u == doctest::Approx(oracle::cpq_tilde(p, q) / oracle::cpq(p, q)).epsilon(1e-13));
    CHECK(a.lambda_n_u == doctest::Approx(q_n(c, a.t_n)).epsilon(1e-13));
    CHECK(a.lambda_e_u == doctest::Approx(q_e(c, a.t_e)).epsilon(1e-13));
    const double kern = std::pow(c.A, (2 * p - q) / (2 * p - 2)) / (c.G * std::pow(c.B, (2 - q) / (2 * p - 2)));
    CHECK(a.lambda_n_u == doctest::Approx(oracle::cpq(p, q) * kern).epsilon(1e-12));
    CHECK(t_zero(c) == doctest::Approx(std::pow(c.A / c.B, 1 / (2 * p - 2))).epsilon(1e-14));

    const double slope_scale = std::abs(q_n(c, a.t_n)) / a.t_n;
    CHECK(std::abs(q_n_prime(c, a.t_n)) <= 1e-12 * slope_scale);
    CHECK(std::abs(q_e_prime(c, a.t_e)) <= 1e-12 * std::abs(q_e(c, a.t_e)) / a.t_e);
    for (int j = 1; j <= 100; ++j) {
      const double t = a.t_n * std::pow(10.0, logt(rng));
      REQUIRE(q_n(c, t) <= a.lambda_n_u);
      if (std::abs(t / a.t_n - 1.0) > 1e-6)
        REQUIRE((q_n_prime(c, t) > 0) == (t < a.t_n));
    }
  }
}

TEST_CASE("zero-homogeneity of the quotient values") {
  std::mt19937_64 rng(43);
  for (int k = 0; k < 100; ++k) {
    const auto c = random_coef(rng, 2.0, 1.5);
    for (double s : {1e-3, 1.0, 1e3}) {
      const auto cs = c.scaled(s);
      CHECK(lambda_n_of(cs) == doctest::Approx(lambda_n_of(c)).epsilon(1e-12));
      CHECK(lambda_e_of(cs) == doctest::Approx(lambda_e_of(c)).epsilon(1e-12));
    }
  }
}

TEST_CASE("crossing structure of Q_n and Q_e") {
  std::mt19937_64 rng(44);
  for (int k = 0; k < 50; ++k) {
    const auto c = random_coef(rng, 2.0, 1.5);
    const double te = t_e(c);
    CHECK(q_n(c, te) == doctest::Approx(q_e(c, te)).epsilon(1e-12));
    for (int j = 1; j <= 100; ++j) {
      REQUIRE(q_n(c, te * j / 101.0) > q_e(c, te * j / 101.0));
      REQUIRE(q_n(c, te * (1.0 + j / 10.0)) < q_e(c, te * (1.0 + j / 10.0)));
    }
  }
}

TEST_CASE("Nehari roots") {
  const auto r = nehari_roots(kUnit, 0.4);
  // Bisection on t^{1/2} (1 - t^2) = 0.4.
  auto f = [](double t) { return std::sqrt(t) * (1 - t * t) - 0.4; };
  const double plus = oracle::bisect(f, 1e-9, std::sqrt(0.2)), minus = oracle::bisect(f, std::sqrt(0.2), 1.0);
  CHECK(std::abs(r.t_plus - 0.1696) <= 1e-3);
  CHECK(std::abs(r.t_minus - 0.7291) <= 1e-3);
  CHECK(r.t_plus == doctest::Approx(plus).epsilon(1e-12));
  CHECK(r.t_minus == doctest::Approx(minus).epsilon(1e-12));
  CHECK(r.slope_plus > 0.0);
  CHECK(r.slope_minus < 0.0);

  const double ln = lambda_n_of(kUnit);
  const auto tangent = nehari_roots(kUnit, ln * (1 - 1e-12));
  CHECK(std::abs(tangent.t_plus - t_n(kUnit)) <= 1e-4);
  CHECK(std::abs(tangent.t_minus - t_n(kUnit)) <= 1e-4);
  CHECK_THROWS_AS(nehari_roots(kUnit, 0.6), NoRoots);
  CHECK_THROWS_AS(nehari_roots(kUnit, ln), NoRoots);
  CHECK_THROWS_AS(nehari_roots(kUnit, 0.0), DomainError);

  std::mt19937_64 rng(45);
  std::uniform_real_distribution<double> frac(1e-6, 1.0 - 1e-6);
  for (int k = 0; k < 500; ++k) {
    const auto c = random_coef(rng, 2.0, 1.5);
    const double lambda = frac(rng) * lambda_n_of(c);
    const auto rr = nehari_roots(c, lambda);
    CHECK(rr.t_plus < t_n(c));
    CHECK(rr.t_minus > t_n(c));
    CHECK(q_n(c, rr.t_plus) == doctest::Approx(lambda).epsilon(1e-12));
    CHECK(q_n(c, rr.t_minus) == doctest::Approx(lambda).epsilon(1e-12));
    // Slope of Q_n at a root carries the sign of E''.
    CHECK((second_form(c.scaled(rr.t_plus), lambda) > 0) == (rr.slope_plus > 0));
    CHECK((second_form(c.scaled(rr.t_minus), lambda) > 0) == (rr.slope_minus > 0));
    CHECK(classify(c.scaled(rr.t_plus), lambda) == BranchTag::N_plus);
    CHECK(classify(c.scaled(rr.t_minus), lambda) == BranchTag::N_minus);
  }
}

TEST_CASE("energy roots") {
  const auto r = energy_roots(kUnit, 0.3);
  CHECK(q_e(kUnit, r.t_plus) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(q_e(kUnit, r.t_minus) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK_THROWS_AS(energy_roots(kUnit, lambda_e_of(kUnit)), NoRoots);
  CHECK_THROWS_AS(energy_roots(kUnit, 0.5), NoRoots);

  // Six-term ordering for the unit triple at lambda = 0.3.
  const auto n = nehari_roots(kUnit, 0.3);
  const double tn = t_n(kUnit), te = t_e(kUnit);
  CHECK(0.0 < n.t_plus);
  CHECK(n.t_plus < r.t_plus);
  CHECK(r.t_plus < tn);
  CHECK(tn < te);
  CHECK(te < n.t_minus);
  CHECK(n.t_minus < r.t_minus);
}

TEST_CASE("ordering chain holds exactly below Q_e(t_n)") {
  // Every link but t_e+ < t_n holds for all lambda < Lambda_e; that link needs
  // lambda < Q_e(t_n), which sits strictly below Lambda_e = Q_e(t_e).
  std::mt19937_64 rng(46);
  std::uniform_real_distribution<double> frac(1e-6, 1.0 - 1e-9);
  int above = 0;
  for (int k = 0; k < 1000; ++k) {
    const auto c = random_coef(rng, 2.0, 1.5);
    const double le = lambda_e_of(c);
    const double lambda = frac(rng) * le;
    const auto n = nehari_roots(c, lambda);
    const auto e = energy_roots(c, lambda);
    const double tn = t_n(c), te = t_e(c);
    REQUIRE(0.0 < n.t_plus);
    REQUIRE(n.t_plus < e.t_plus);
    REQUIRE(tn < te);
    REQUIRE(te < n.t_minus);
    REQUIRE(n.t_minus < e.t_minus);
    const bool link = e.t_plus < tn;
    REQUIRE(link == (lambda < q_e(c, tn)));
    above += !link;
  }
  CHECK(above > 0);

  // Explicit counterexample on the unit triple: Q_e(t_n) = 0.4514 < lambda < Lambda_e = 0.4772.
  const double lambda = 0.47;
  CHECK(q_e(kUnit, t_n(kUnit)) < lambda);
  CHECK(lambda < lambda_e_of(kUnit));
  CHECK(energy_roots(kUnit, lambda).t_plus > t_n(kUnit));
}

TEST_CASE("classification") {
  const double ln = lambda_n_of(kUnit);
  CHECK(classify(kUnit.scaled(t_n(kUnit)), ln) == BranchTag::N_zero);
  CHECK(classify(kUnit, 0.4) == BranchTag::off_nehari);
  CHECK(classify(kUnit, 0.0) == BranchTag::N_minus);
  CHECK(to_string(BranchTag::N_plus) == "N_plus");
  CHECK(to_string(BranchTag::N_minus) == "N_minus");
  CHECK(to_string(BranchTag::N_zero) == "N_zero");
  CHECK(to_string(BranchTag::off_nehari) == "off_nehari");
  CHECK_THROWS_AS(analyze(FiberCoefficients{0.0, 1.0, 1.0, 2.0, 1.5}), ZeroField);
}
