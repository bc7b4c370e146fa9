// End-to-end checks of the installed command-line surface: spawns the real
// binary, parses its JSON output, checks exit codes.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#ifndef POPSCALE_CLI_PATH
#error "POPSCALE_CLI_PATH must point at the CLI binary"
#endif

namespace {

using nlohmann::json;

struct RunResult {
  int exit_code;
  std::string out;
};

RunResult run_cli(const std::string& args) {
  std::filesystem::path tmp =
      std::filesystem::temp_directory_path() / "popscale_cli_out.txt";
  std::string cmd = std::string(POPSCALE_CLI_PATH) + " " + args + " > " + tmp.string() + " 2>&1";
  int status = std::system(cmd.c_str());
  std::ifstream in(tmp);
  std::ostringstream buf;
  buf << in.rdbuf();
  int code = -1;
#ifdef WEXITSTATUS
  if (status != -1) code = WEXITSTATUS(status);
#else
  code = status;
#endif
  return {code, buf.str()};
}

std::string write_instance(const std::string& name, const std::string& text) {
  std::filesystem::path p = std::filesystem::temp_directory_path() / name;
  std::ofstream out(p);
  out << text;
  return p.string();
}

}  // namespace

TEST_CASE("analyze the builtin counterexample at mu 1 and 2") {
  RunResult r1 = run_cli("analyze paper-table12 --mu 1");
  REQUIRE(r1.exit_code == 0);
  json doc = json::parse(r1.out);
  CHECK(doc["spectral"]["norm_inf"].get<double>() == doctest::Approx(2.5).epsilon(1e-12));

  RunResult r2 = run_cli("analyze paper-table12 --mu 2 --selection replicate_best");
  REQUIRE(r2.exit_code == 0);
  json doc2 = json::parse(r2.out);
  CHECK(doc2["spectral"]["norm_inf"].get<double>() == doctest::Approx(2.75).epsilon(1e-12));
}

TEST_CASE("analyze an instance file and write the report atomically") {
  std::string path = write_instance("popscale_t12.json", R"({
    "schema_version": 1, "kind": "builtin", "builtin": {"name": "paper-table12"}
  })");
  std::filesystem::path out =
      std::filesystem::temp_directory_path() / "popscale_report.json";
  RunResult r = run_cli("analyze " + path + " --mu 1 --out " + out.string());
  REQUIRE(r.exit_code == 0);
  std::ifstream in(out);
  json doc = json::parse(in);
  CHECK(doc["spectral"]["convergent"].get<bool>());
}

TEST_CASE("scale sweep flags the superlinear deceptive case") {
  RunResult r = run_cli(
      "scale deceptive-knapsack --n 4 --mu-max 3 --selection elitist_proportional");
  REQUIRE(r.exit_code == 0);
  json doc = json::parse(r.out);
  for (const auto& row : doc["sweep"])
    CHECK(row["rho_scalability"]["classification"].get<std::string>() == "superlinear");
}

TEST_CASE("scale sweep on onemax never goes superlinear") {
  RunResult r = run_cli("scale onemax-knapsack --n 4 --mu-max 3");
  REQUIRE(r.exit_code == 0);
  json doc = json::parse(r.out);
  for (const auto& row : doc["sweep"]) {
    std::string cls = row["rho_scalability"]["classification"].get<std::string>();
    CHECK(cls != "superlinear");
  }
}

TEST_CASE("landscape classifications") {
  RunResult r = run_cli("landscape onemax-knapsack --n 4");
  REQUIRE(r.exit_code == 0);
  json doc = json::parse(r.out);
  CHECK(doc["bridge"]["landscape"].get<std::string>() == "non_bridgeable");

  RunResult r2 = run_cli("landscape deceptive-knapsack --n 4");
  json doc2 = json::parse(r2.out);
  CHECK(doc2["bridge"]["landscape"].get<std::string>() == "bridgeable");
  CHECK(doc2["bridge"]["x_rho"].get<std::string>() == "0111");
}

TEST_CASE("roads reports the checker verdicts") {
  RunResult r = run_cli(
      "roads deceptive-knapsack --n 4 --mu 2 --k-max 20 --selection elitist_proportional");
  REQUIRE(r.exit_code == 0);
  json doc = json::parse(r.out);
  CHECK(doc["road_condition"]["satisfied_at"].get<int>() == 2);
  CHECK(doc["bridge_necessity"]["verdict"].get<std::string>() == "inconclusive");

  RunResult r2 = run_cli("roads deceptive-knapsack --n 4 --mu 2 --k-max 10");
  json doc2 = json::parse(r2.out);
  CHECK(doc2["bridge_necessity"]["verdict"].get<std::string>() == "no-superlinear-possible");
}

TEST_CASE("simulate reproducibly") {
  std::string args = "simulate paper-table12 --mu 2 --runs 5000 --seed 7 "
                     "--init fixed --start x4,x4";
  RunResult a = run_cli(args);
  RunResult b = run_cli(args);
  REQUIRE(a.exit_code == 0);
  json da = json::parse(a.out), db = json::parse(b.out);
  CHECK(da["estimate"]["mean_hitting"].get<double>() ==
        db["estimate"]["mean_hitting"].get<double>());
  CHECK(std::abs(da["estimate"]["mean_hitting"].get<double>() - 2.75) < 0.1);
}

TEST_CASE("exit codes: parse failure is 2, cap exceeded is 3") {
  std::string bad = write_instance("popscale_bad.json", "{ not json");
  CHECK(run_cli("analyze " + bad + " --mu 1").exit_code == 2);

  std::string malformed = write_instance("popscale_badrow.json", R"({
    "schema_version": 1, "kind": "tabular",
    "tabular": {"states": ["a","b"], "fitness": [1,0],
                "mutation": [[1.0,0.0],[0.7,0.7]]}
  })");
  CHECK(run_cli("analyze " + malformed + " --mu 1").exit_code == 2);

  CHECK(run_cli("analyze onemax-knapsack --n 8 --mu 4 --state-cap 100").exit_code == 3);
}

TEST_CASE("state cap honors the environment variable") {
  RunResult r = run_cli("analyze onemax-knapsack --n 8 --mu 3 --state-cap 10");
  CHECK(r.exit_code == 3);
#ifndef _WIN32
  std::string cmd = std::string("POPSCALE_STATE_CAP=10 ") + POPSCALE_CLI_PATH +
                    " analyze onemax-knapsack --n 8 --mu 3 > /dev/null 2>&1";
  int status = std::system(cmd.c_str());
  CHECK(WEXITSTATUS(status) == 3);
#endif
}
