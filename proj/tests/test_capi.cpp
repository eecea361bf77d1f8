// Exercises the shared library through its C header only.
#include "choquard/choquard.h"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <string>
#include <vector>

namespace {

const char* kSmall = R"({"grid":{"count":512}})";

std::string take(char* s) {
  std::string out = s ? s : "";
  chq_string_free(s);
  return out;
}

} // namespace

TEST_CASE("status names and constants") {
  CHECK(std::string(chq_version()).size() > 0);
  CHECK(std::string(chq_status_name(CHQ_OK)) == "ok");
  CHECK(std::string(chq_status_name(CHQ_ERR_CONFIG)) == "config");
  CHECK(std::string(chq_status_name(static_cast<chq_status>(99))) == "unknown");
  CHECK(std::abs(chq_cpq(2.0, 1.5) - 0.534992) <= 1e-6);
  CHECK(std::abs(chq_cpq_tilde(2.0, 1.5) - 0.477162) <= 1e-6);
  CHECK(std::isnan(chq_cpq(2.0, 2.5)));
  CHECK(std::string(chq_last_error()).size() > 0);
}

TEST_CASE("context creation and config errors") {
  chq_context* ctx = nullptr;
  CHECK(chq_context_create(nullptr, &ctx) == CHQ_OK);
  REQUIRE(ctx);
  char* cfg = nullptr;
  REQUIRE(chq_context_config_json(ctx, &cfg) == CHQ_OK);
  const auto doc = nlohmann::json::parse(take(cfg));
  CHECK(doc["grid"]["count"] == 2048);
  chq_context_free(ctx);

  ctx = reinterpret_cast<chq_context*>(0x1);
  CHECK(chq_context_create(R"({"params":{"q":2.5}})", &ctx) == CHQ_ERR_CONFIG);
  CHECK(ctx == nullptr);
  CHECK(std::string(chq_last_error()).find("q") != std::string::npos);
  CHECK(chq_context_create(R"({"bogus":1})", &ctx) == CHQ_ERR_CONFIG);
  CHECK(chq_context_create("{", &ctx) == CHQ_ERR_CONFIG);
  CHECK(chq_context_load("/nonexistent.json", &ctx) == CHQ_ERR_CONFIG);
  CHECK(chq_context_create(nullptr, nullptr) == CHQ_ERR_USAGE);

  // Freeing null handles is a no-op.
  chq_context_free(nullptr);
  chq_extremal_free(nullptr);
  chq_solution_free(nullptr);
  chq_sweep_free(nullptr);
  chq_string_free(nullptr);
  CHECK(std::isnan(chq_extremal_lambda_n(nullptr)));
  CHECK(chq_solution_values(nullptr, nullptr, 0) == 0);
}

TEST_CASE("extremal, solve and sweep through handles") {
  chq_context* ctx = nullptr;
  REQUIRE(chq_context_create(kSmall, &ctx) == CHQ_OK);

  chq_extremal* ex = nullptr;
  REQUIRE(chq_extremal_compute(ctx, &ex) == CHQ_OK);
  const double ln = chq_extremal_lambda_n(ex), le = chq_extremal_lambda_e(ex);
  CHECK(ln > 0.0);
  CHECK(std::abs(le / ln - 0.891905) <= 1e-6);
  CHECK(chq_extremal_converged(ex) == 1);
  CHECK(chq_extremal_el_residual(ex) >= 0.0);
  char* js = nullptr;
  REQUIRE(chq_extremal_to_json(ex, &js) == CHQ_OK);
  CHECK(nlohmann::json::parse(take(js))["lambda_n"].get<double>() == ln);
  chq_extremal_free(ex);

  chq_solution* plus = nullptr;
  chq_solution* minus = nullptr;
  REQUIRE(chq_solve(ctx, 0.5, 1, CHQ_BRANCH_PLUS, &plus) == CHQ_OK);
  REQUIRE(chq_solve(ctx, 0.5 * ln, 0, CHQ_BRANCH_MINUS, &minus) == CHQ_OK);
  CHECK(chq_solution_lambda(plus) == doctest::Approx(0.5 * ln).epsilon(1e-15));
  CHECK(chq_solution_energy(plus) < 0.0);
  CHECK(chq_solution_energy(plus) < chq_solution_energy(minus));
  CHECK(chq_solution_norm(minus) > chq_solution_norm(plus));
  CHECK(chq_solution_residual(plus) >= 0.0);
  std::vector<double> vals(600);
  CHECK(chq_solution_values(plus, vals.data(), vals.size()) == 512);
  CHECK(vals[0] > vals[100]);
  REQUIRE(chq_solution_to_json(minus, &js) == CHQ_OK);
  CHECK(nlohmann::json::parse(take(js))["branch"] == "N_minus");
  chq_solution_free(plus);
  chq_solution_free(minus);

  chq_solution* zero = nullptr;
  CHECK(chq_solve(ctx, 0.0, 0, CHQ_BRANCH_PLUS, &zero) == CHQ_ERR_NO_ROOTS);
  CHECK(zero == nullptr);
  REQUIRE(chq_solve(ctx, 0.0, 0, CHQ_BRANCH_MINUS, &zero) == CHQ_OK);
  CHECK(chq_solution_lambda(zero) == 0.0);
  chq_solution_free(zero);
  CHECK(chq_solve(ctx, -1.0, 0, CHQ_BRANCH_MINUS, &zero) == CHQ_ERR_INVALID_ARGUMENT);
  CHECK(chq_solve(ctx, 0.5, 1, static_cast<chq_branch>(7), &zero) == CHQ_ERR_USAGE);

  chq_sweep* sw = nullptr;
  CHECK(chq_sweep_run(ctx, 0.1, 0.9, 1, 1, &sw) == CHQ_ERR_USAGE);
  CHECK(chq_sweep_run(ctx, 0.9, 0.1, 4, 1, &sw) == CHQ_ERR_USAGE);
  REQUIRE(chq_sweep_run(ctx, 0.1, 0.9, 5, 1, &sw) == CHQ_OK);
  CHECK(chq_sweep_rows(sw) == 5);
  CHECK(chq_sweep_failed_rows(sw) == 0);
  double lam = 0, e1 = 0, e2 = 0, prev = -INFINITY;
  for (size_t i = 0; i < 5; ++i) {
    REQUIRE(chq_sweep_row(sw, i, &lam, &e1, &e2) == CHQ_OK);
    CHECK(lam > prev);
    CHECK(e1 < e2);
    prev = lam;
  }
  CHECK(chq_sweep_row(sw, 5, &lam, &e1, &e2) == CHQ_ERR_INVALID_ARGUMENT);
  REQUIRE(chq_sweep_to_csv(sw, &js) == CHQ_OK);
  const std::string csv = take(js);
  CHECK(csv.rfind("lambda,E1,E2,sign_E2,", 0) == 0);
  chq_sweep_free(sw);

  char* fib = nullptr;
  int clipped = -1;
  REQUIRE(chq_fibering_csv(ctx, "extremal", 0.0, 1e6, 50, &fib, &clipped) == CHQ_OK);
  CHECK(clipped == 1);
  CHECK(take(fib).rfind("t,Qn,Qe\n# t_n=", 0) == 0);
  CHECK(chq_fibering_csv(ctx, "triangle", 0.0, 0.0, 50, &fib, &clipped) == CHQ_ERR_INVALID_ARGUMENT);

  char* report = nullptr;
  CHECK(chq_verify(ctx, "slow", &report) == CHQ_ERR_INVALID_ARGUMENT);
  chq_context_free(ctx);
}
