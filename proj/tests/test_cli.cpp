// Runs the choquard executable and inspects exit codes and output files.
#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>
#include <vector>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / ("choquard_cli_" + std::to_string(::getpid()));
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

std::string write(const std::string& name, const std::string& text) {
  const fs::path p = workdir() / name;
  std::ofstream(p) << text;
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run(const std::string& args) {
  const std::string cmd = std::string(CHOQUARD_CLI) + " " + args + " >/dev/null 2>" + (workdir() / "stderr").string();
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::vector<std::string> data_rows(const std::string& csv) {
  std::vector<std::string> rows;
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);
  while (std::getline(in, line))
    if (!line.empty() && line[0] != '#')
      rows.push_back(line);
  return rows;
}

std::vector<double> split(const std::string& row) {
  std::vector<double> out;
  std::istringstream in(row);
  for (std::string cell; std::getline(in, cell, ',');)
    out.push_back(std::strtod(cell.c_str(), nullptr));
  return out;
}

const std::string& small_config() {
  static const std::string path = write("small.json", R"({"grid":{"count":512},"rng_seed":3})");
  return path;
}

} // namespace

TEST_CASE("usage and config errors") {
  CHECK(run("") == 1);
  CHECK(run("bogus") == 1);
  CHECK(run("solve --config " + small_config()) == 1);
  CHECK(run("extremal --config /nonexistent.json") == 1);
  CHECK(run("sweep --config " + small_config() + " --lambda-min 0.1 --lambda-max 0.5 --steps 1") == 1);
  CHECK(run("solve --config " + small_config() + " --lambda 0.5 --branch sideways") == 1);

  CHECK(run("extremal --config " + write("bad_q.json", R"({"params":{"q":1.95}})")) == 2);
  CHECK(run("extremal --config " + write("unknown.json", R"({"grid":{"count":512,"points":3}})")) == 2);
  CHECK(run("extremal --config " + write("broken.json", "{\"grid\":")) == 2);
  CHECK(slurp((workdir() / "stderr").string()).find("config") != std::string::npos);
}

TEST_CASE("extremal output is deterministic and embeds the config") {
  const std::string a = (workdir() / "ex_a.json").string(), b = (workdir() / "ex_b.json").string();
  REQUIRE(run("extremal --config " + small_config() + " --out " + a) == 0);
  REQUIRE(run("extremal --config " + small_config() + " --out " + b) == 0);
  const std::string text = slurp(a);
  CHECK(text == slurp(b));
  const json doc = json::parse(text);
  CHECK(doc["lambda_n"].get<double>() > 0.0);
  CHECK(std::abs(doc["ratio"].get<double>() - 0.891905) <= 1e-6);
  CHECK(doc["grid"]["count"] == 512);
  CHECK(doc["config"]["rng_seed"] == 3);
  CHECK(doc["minimizer_values"].size() == 512);
}

TEST_CASE("solve writes a solution document") {
  const std::string out = (workdir() / "sol.json").string();
  REQUIRE(run("solve --config " + small_config() + " --lambda 0.5 --relative-to-lambda-n --branch minus --out " +
              out) == 0);
  const json doc = json::parse(slurp(out));
  CHECK(doc["branch"] == "N_minus");
  CHECK(doc["second_form"].get<double>() < 0.0);
  CHECK(run("solve --config " + small_config() + " --lambda 0 --branch plus") == 3);
}

TEST_CASE("sweep CSV") {
  const std::string out = (workdir() / "sweep.csv").string();
  REQUIRE(run("sweep --config " + small_config() +
              " --lambda-min 0.05 --lambda-max 1.0 --steps 12 --relative-to-lambda-n --out " + out) == 0);
  const std::string csv = slurp(out);
  CHECK(csv.rfind("lambda,E1,E2,sign_E2,norm_u,norm_v,iter_u,iter_v,residual_u,residual_v\n# config_hash=", 0) == 0);
  const auto rows = data_rows(csv);
  REQUIRE(rows.size() == 12);
  int changes = 0;
  double prev_sign = 0.0;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const auto v = split(rows[i]);
    REQUIRE(v.size() == 10);
    CHECK(v[1] < v[2]);
    CHECK(v[1] < 0.0);
    if (i > 0)
      changes += v[3] != prev_sign;
    prev_sign = v[3];
  }
  CHECK(changes == 1);
}

TEST_CASE("fibering CSV markers") {
  const std::string out = (workdir() / "fib.csv").string();
  REQUIRE(run("fibering --config " + small_config() + " --profile gaussian --samples 2000 --out " + out) == 0);
  const std::string csv = slurp(out);
  std::istringstream in(csv);
  std::string header, markers;
  std::getline(in, header);
  std::getline(in, markers);
  CHECK(header == "t,Qn,Qe");
  REQUIRE(markers.rfind("# ", 0) == 0);
  double tn = 0, te = 0;
  std::istringstream ms(markers.substr(2));
  for (std::string kv; std::getline(ms, kv, ',');) {
    const auto eq = kv.find('=');
    const std::string key = kv.substr(0, eq);
    const double val = std::strtod(kv.c_str() + eq + 1, nullptr);
    if (key == "t_n")
      tn = val;
    if (key == "t_e")
      te = val;
  }
  CHECK(std::abs(te / tn - std::sqrt(2.0)) <= 1e-10);

  const auto rows = data_rows(csv);
  REQUIRE(rows.size() == 2000);
  double best = -INFINITY, t_best = 0.0, dt = split(rows[1])[0] - split(rows[0])[0];
  for (const auto& r : rows) {
    const auto v = split(r);
    if (v[1] > best) {
      best = v[1];
      t_best = v[0];
    }
  }
  CHECK(std::abs(t_best - tn) <= dt);

  REQUIRE(run("fibering --config " + small_config() + " --t-max 1e6 --samples 10 --out " + out) == 0);
  CHECK(slurp((workdir() / "stderr").string()).find("clipped") != std::string::npos);
  CHECK(run("fibering --config " + small_config() + " --profile square") == 1);
}
