#include <doctest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "poisbal/instance.hpp"

using namespace poisbal;

namespace {

namespace fs = std::filesystem;

struct RunResult {
  int exit_code = -1;
  std::string out;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

RunResult run_cli(const std::string& args, const std::string& env = "") {
  fs::path tmp = fs::temp_directory_path() / "poisbal_cli_out.txt";
  std::string cmd = env + (env.empty() ? "" : " ") + POISBAL_CLI_PATH + " " +
                    args + " > " + tmp.string() + " 2>/dev/null";
  int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WEXITSTATUS(status);
  r.out = slurp(tmp);
  fs::remove(tmp);
  return r;
}

fs::path write_instance(const std::string& name, const std::string& body) {
  fs::path p = fs::temp_directory_path() / name;
  std::ofstream out(p);
  out << body;
  return p;
}

}  // namespace

TEST_CASE("solve: greedy loads on the pinned instance") {
  auto p = write_instance("cli_greedy.json",
                          R"({"machines": 2, "jobs": [3, 3, 2, 2, 2]})");
  RunResult r = run_cli("solve --input " + p.string() +
                        " --epsilon 0.5 --algorithm greedy");
  REQUIRE(r.exit_code == 0);
  std::vector<double> sizes{3, 3, 2, 2, 2};
  Assignment a = assignment_from_json_text(r.out, sizes, 2);
  CHECK(a.loads[0] == doctest::Approx(7.0));
  CHECK(a.loads[1] == doctest::Approx(5.0));
  fs::remove(p);
}

TEST_CASE("solve: brute force balances four unit jobs") {
  auto p = write_instance("cli_units.json",
                          R"({"machines": 2, "jobs": [1, 1, 1, 1]})");
  RunResult r = run_cli("solve --input " + p.string() +
                        " --epsilon 0.5 --algorithm brute");
  REQUIRE(r.exit_code == 0);
  std::vector<double> sizes{1, 1, 1, 1};
  Assignment a = assignment_from_json_text(r.out, sizes, 2);
  CHECK(a.loads[0] == doctest::Approx(2.0));
  CHECK(a.loads[1] == doctest::Approx(2.0));
  fs::remove(p);
}

TEST_CASE("solve: exit codes") {
  RunResult missing =
      run_cli("solve --input /nonexistent/file.json --epsilon 0.5");
  CHECK(missing.exit_code == 1);

  auto p = write_instance("cli_codes.json",
                          R"({"machines": 2, "jobs": [1, 1]})");
  RunResult bad_eps =
      run_cli("solve --input " + p.string() + " --epsilon 1.5");
  CHECK(bad_eps.exit_code == 2);
  RunResult guard = run_cli("solve --input " + p.string() +
                            " --epsilon 0.5 --algorithm brute");
  CHECK(guard.exit_code == 0);
  auto big = write_instance("cli_big.json",
                            R"({"machines": 5, "jobs": [1,1,1,1,1,1,1,1,1,1,1,1,1]})");
  RunResult too_big = run_cli("solve --input " + big.string() +
                              " --epsilon 0.5 --algorithm brute");
  CHECK(too_big.exit_code == 2);
  fs::remove(p);
  fs::remove(big);
}

TEST_CASE("solve output is byte-stable") {
  auto p = write_instance("cli_stable.json",
                          R"({"machines": 3, "jobs": [0.5, 2.5, 1.0, 1.0]})");
  RunResult a = run_cli("solve --input " + p.string() +
                        " --epsilon 0.5 --algorithm ptas --seed 1");
  RunResult b = run_cli("solve --input " + p.string() +
                        " --epsilon 0.5 --algorithm ptas --seed 1");
  CHECK(a.exit_code == 0);
  CHECK(a.out == b.out);
  fs::remove(p);
}

TEST_CASE("compare prints one row per algorithm") {
  auto p = write_instance("cli_compare.json",
                          R"({"machines": 2, "jobs": [1, 1, 2]})");
  RunResult r =
      run_cli("compare --input " + p.string() + " --epsilon 0.5 --seed 3");
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("ptas") != std::string::npos);
  CHECK(r.out.find("greedy") != std::string::npos);
  CHECK(r.out.find("det-mean") != std::string::npos);
  CHECK(r.out.find("brute") != std::string::npos);  // small enough instance

  // the ptas row stays within (1+epsilon) of the brute row
  double ptas_value = -1.0;
  double brute_value = -1.0;
  std::istringstream lines(r.out);
  std::string line;
  while (std::getline(lines, line)) {
    std::istringstream fields(line);
    std::string name;
    double exact;
    if (fields >> name >> exact) {
      if (name == "ptas") ptas_value = exact;
      if (name == "brute") brute_value = exact;
    }
  }
  REQUIRE(ptas_value > 0.0);
  REQUIRE(brute_value > 0.0);
  CHECK(ptas_value <= 1.5 * brute_value + 1e-9);
  fs::remove(p);
}

TEST_CASE("solve: the dp algorithm runs the fallback directly") {
  auto p = write_instance("cli_dp.json",
                          R"({"machines": 2, "jobs": [1, 1, 1, 1]})");
  RunResult r = run_cli("solve --input " + p.string() +
                        " --epsilon 0.5 --algorithm dp");
  REQUIRE(r.exit_code == 0);
  std::vector<double> sizes{1, 1, 1, 1};
  Assignment a = assignment_from_json_text(r.out, sizes, 2);
  CHECK(a.loads[0] == doctest::Approx(2.0));
  CHECK(a.loads[1] == doctest::Approx(2.0));
  fs::remove(p);
}

TEST_CASE("verify identities suite passes and emits CSV") {
  RunResult r = run_cli("verify --suite identities");
  CHECK(r.exit_code == 0);
  CHECK(r.out.rfind("lemma,params,", 0) == 0);
  CHECK(r.out.find("identity.cdf_survival") != std::string::npos);
}

TEST_CASE("verify lemmas and appendix suites pass") {
  RunResult lemmas = run_cli("verify --suite lemmas");
  CHECK(lemmas.exit_code == 0);
  CHECK(lemmas.out.find("case1.upper") != std::string::npos);
  CHECK(lemmas.out.find("case5.two_plus") != std::string::npos);
  CHECK(lemmas.out.find("t2_vs_mu1") != std::string::npos);

  RunResult appendix = run_cli("verify --suite appendix");
  CHECK(appendix.exit_code == 0);
  CHECK(appendix.out.find("appendixA.direction") != std::string::npos);
  CHECK(appendix.out.find("propA1") != std::string::npos);

  RunResult unknown = run_cli("verify --suite bogus");
  CHECK(unknown.exit_code == 2);
}

TEST_CASE("PB_CONFIG provides defaults, flags win") {
  auto cfg = write_instance("cli_cfg.json", R"({"epsilon": 0.25})");
  auto p = write_instance("cli_cfgi.json",
                          R"({"machines": 2, "jobs": [1, 1]})");
  RunResult r = run_cli("solve --input " + p.string() + " --algorithm greedy",
                        "PB_CONFIG=" + cfg.string());
  REQUIRE(r.exit_code == 0);
  CHECK(r.out.find("\"epsilon\":0.25") != std::string::npos);
  RunResult flag = run_cli(
      "solve --input " + p.string() + " --algorithm greedy --epsilon 0.75",
      "PB_CONFIG=" + cfg.string());
  CHECK(flag.out.find("\"epsilon\":0.75") != std::string::npos);
  fs::remove(cfg);
  fs::remove(p);
}
