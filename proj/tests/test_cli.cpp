#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "reference.hpp"

using nlohmann::json;

namespace {

struct RunResult {
  int exit_code;
  std::string stdout_text;
  std::string stderr_text;
};

std::string slurp(const std::string& path) {
  std::ifstream f(path);
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

RunResult run_cli(const std::string& args) {
  std::string out = "cli_stdout.txt", err = "cli_stderr.txt";
  std::string cmd = std::string(RINGPOT_CLI_PATH) + " " + args + " > " + out + " 2> " + err;
  int status = std::system(cmd.c_str());
  int code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return {code, slurp(out), slurp(err)};
}

}  // namespace

TEST_CASE("eval robin returns a finite value with truncation metadata") {
  RunResult r = run_cli("eval --a 1 --b 2 --y 1.5,0 --what robin");
  REQUIRE(r.exit_code == 0);
  json doc = json::parse(r.stdout_text);
  CHECK(doc["manifest"]["command"] == "eval");
  CHECK(doc["manifest"]["version"].is_string());
  double value = doc["result"]["value"];
  CHECK(std::isfinite(value));
  CHECK(std::abs(value - ref::robin_1_2_r15) < 1e-9);
  CHECK(doc["result"]["m_used"].get<int>() >= 1);
  CHECK(doc["result"]["tail_bound"].get<double>() < 1e-10);
}

TEST_CASE("eval rejects an inverted annulus with exit code 2") {
  RunResult r = run_cli("eval --a 2 --b 1 --y 1.5,0 --what robin");
  CHECK(r.exit_code == 2);
  CHECK(r.stderr_text.find("inner radius must be less than outer") != std::string::npos);
}

TEST_CASE("eval grad-robin reports a vanishing tangential part") {
  RunResult r = run_cli("eval --a 1 --b 2 --y 1.5,0.7 --what grad-robin");
  REQUIRE(r.exit_code == 0);
  json doc = json::parse(r.stdout_text);
  CHECK(std::abs(doc["result"]["gradient"]["tangential_part"].get<double>()) < 1e-14);
}

TEST_CASE("eval green requires --x") {
  RunResult r = run_cli("eval --a 1 --b 2 --y 1.5,0 --what green");
  CHECK(r.exit_code == 2);
}

TEST_CASE("eval green reproduces the reference value") {
  RunResult r = run_cli(
      "eval --a 1 --b 2 --x 1.3,0 --y 1.6,1.5707963267948966 --what green --tol 1e-13");
  REQUIRE(r.exit_code == 0);
  json doc = json::parse(r.stdout_text);
  CHECK(std::abs(doc["result"]["value"].get<double>() - ref::green_1_2_a) < 1e-11);
}

TEST_CASE("r0 lands inside the proven bracket, with the special rows in the CSV") {
  RunResult r = run_cli("r0 --a 1 --b 2 --tol 1e-12 --profile-csv cli_profile.csv --n-grid 40");
  REQUIRE(r.exit_code == 0);
  json doc = json::parse(r.stdout_text);
  double r0 = doc["result"]["r0"];
  CHECK(r0 > 1.41421356);
  CHECK(r0 < 1.68179283);
  CHECK(doc["result"]["residual"].get<double>() < 1e-12);
  CHECK(doc["result"]["bracket"][0].get<double>() == doctest::Approx(std::sqrt(2.0)));

  std::ifstream csv("cli_profile.csv");
  std::string line;
  std::getline(csv, line);
  CHECK(line == "r,f,g");
  double best_g_at_sqrt2 = 1.0, best_f_at_right = 1.0;
  double want_lo = std::sqrt(2.0), want_hi = std::pow(2.0, 0.75);
  while (std::getline(csv, line)) {
    double rr, ff, gg;
    REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf", &rr, &ff, &gg) == 3);
    if (std::abs(rr - want_lo) < 1e-12) best_g_at_sqrt2 = gg;
    if (std::abs(rr - want_hi) < 1e-12) best_f_at_right = ff;
  }
  CHECK(std::abs(best_g_at_sqrt2) < 1e-12);
  CHECK(std::abs(best_f_at_right) < 1e-14);
}

TEST_CASE("solve is deterministic for a fixed seed, modulo the timestamp") {
  std::string args = "solve --a 1 --b 2 --points 2 --starts 4 --seed 7";
  RunResult r1 = run_cli(args);
  RunResult r2 = run_cli(args);
  REQUIRE(r1.exit_code == 0);
  REQUIRE(r2.exit_code == 0);
  json d1 = json::parse(r1.stdout_text);
  json d2 = json::parse(r2.stdout_text);
  d1["manifest"].erase("timestamp");
  d2["manifest"].erase("timestamp");
  CHECK(d1.dump() == d2.dump());
}

TEST_CASE("solve reports antipodal two-point configurations") {
  RunResult r = run_cli("solve --a 1 --b 2 --points 2 --starts 5 --seed 7");
  REQUIRE(r.exit_code == 0);
  json doc = json::parse(r.stdout_text);
  int converged = 0;
  for (const auto& rep : doc["result"]) {
    if (!rep["converged"].get<bool>()) continue;
    ++converged;
    CHECK(rep["antipodality_gap"].get<double>() < 1e-6);
    CHECK(rep["radius_gap"].get<double>() < 1e-6);
  }
  CHECK(converged >= 4);
}

TEST_CASE("single-point solve reports one shared radius") {
  RunResult r = run_cli("solve --a 1 --b 2 --points 1 --starts 4 --seed 11");
  REQUIRE(r.exit_code == 0);
  json doc = json::parse(r.stdout_text);
  double rstar = ref::bisect([](double x) { return ref::robin_deriv_direct(1.0, 2.0, x); },
                             1.05, 1.95, 1e-13);
  for (const auto& rep : doc["result"]) {
    REQUIRE(rep["converged"].get<bool>());
    CHECK(std::abs(rep["points"][0]["r"].get<double>() - rstar) < 1e-6);
  }
}

TEST_CASE("solve exits 3 when no start converges") {
  RunResult r = run_cli(
      "solve --a 1 --b 2 --points 2 --starts 2 --seed 5 --max-iterations 2 --out cli_fail.json");
  CHECK(r.exit_code == 3);
  json doc = json::parse(slurp("cli_fail.json"));  // reports still written
  CHECK(doc["result"].size() == 2);
  for (const auto& rep : doc["result"]) CHECK_FALSE(rep["converged"].get<bool>());
}

TEST_CASE("three-point solve carries polygon diagnostics") {
  RunResult r = run_cli("solve --a 1 --b 2 --points 3 --starts 2 --seed 1");
  REQUIRE(r.exit_code == 0);
  json doc = json::parse(r.stdout_text);
  for (const auto& rep : doc["result"]) {
    if (!rep["converged"].get<bool>()) continue;
    CHECK(rep.contains("radius_spread"));
    CHECK(rep.contains("angle_gap_spread"));
    CHECK_FALSE(rep.contains("antipodality_gap"));
  }
}

TEST_CASE("validate poisson suite passes at the default grid") {
  RunResult r = run_cli("validate --a 1 --b 2 --suite poisson");
  REQUIRE(r.exit_code == 0);
  json doc = json::parse(r.stdout_text);
  CHECK(doc["result"]["pass"].get<bool>());
}

TEST_CASE("validate exits 4 when a check fails") {
  // a starved series tolerance cannot sustain gradient consistency at 1e-7
  RunResult r = run_cli("validate --a 1 --b 2 --suite gradients --tol 1e-4");
  CHECK(r.exit_code == 4);
  json doc = json::parse(r.stdout_text);
  CHECK_FALSE(doc["result"]["pass"].get<bool>());
}

TEST_CASE("validate green suite passes") {
  RunResult r = run_cli("validate --a 1 --b 2 --suite green");
  REQUIRE(r.exit_code == 0);
  json doc = json::parse(r.stdout_text);
  CHECK(doc["result"]["pass"].get<bool>());
  for (const auto& check : doc["result"]["checks"]) {
    CHECK(check["pass"].get<bool>());
  }
}

TEST_CASE("validate gradients suite passes") {
  RunResult r = run_cli("validate --a 1 --b 2 --suite gradients");
  REQUIRE(r.exit_code == 0);
  json doc = json::parse(r.stdout_text);
  CHECK(doc["result"]["pass"].get<bool>());
}
