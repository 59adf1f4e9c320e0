#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "poisbal/det_sched.hpp"
#include "poisbal/dp_solver.hpp"
#include "poisbal/errors.hpp"
#include "poisbal/instance.hpp"
#include "poisbal/oracle.hpp"
#include "poisbal/ptas.hpp"

namespace {

using namespace poisbal;

struct Defaults {
  std::optional<double> epsilon;
  double tail_tol = 1e-9;
  std::uint64_t seed = 0;
};

// Flags > PB_CONFIG (a JSON file with optional epsilon/tail_tol/seed) >
// built-ins.
Defaults load_defaults() {
  Defaults d;
  const char* path = std::getenv("PB_CONFIG");
  if (path == nullptr) return d;
  std::ifstream in(path);
  if (!in) throw ParseError(std::string("cannot open PB_CONFIG file: ") + path);
  nlohmann::json doc;
  try {
    in >> doc;
    if (doc.contains("epsilon")) d.epsilon = doc.at("epsilon").get<double>();
    if (doc.contains("tail_tol")) d.tail_tol = doc.at("tail_tol").get<double>();
    if (doc.contains("seed")) d.seed = doc.at("seed").get<std::uint64_t>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid PB_CONFIG document: ") + e.what());
  }
  return d;
}

void check_epsilon(double epsilon) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
    throw std::invalid_argument("epsilon must lie in (0, 1)");
  }
}

Assignment dp_solve_instance(const JobInstance& instance, double epsilon) {
  PeelResult peel = peel_big_jobs(instance);
  std::vector<std::int32_t> mapping(instance.sizes.size(), -1);
  if (!peel.remaining_indices.empty() || !peel.big_indices.empty()) {
    DpParams params = DpParams::make(peel.big_sizes, peel.remaining_sizes,
                                     instance.machines, epsilon);
    Assignment merged = run_dp(params);
    for (std::size_t i = 0; i < peel.remaining_indices.size(); ++i) {
      mapping[peel.remaining_indices[i]] = merged.machine_of[i];
    }
    for (std::size_t b = 0; b < peel.big_indices.size(); ++b) {
      mapping[peel.big_indices[b]] =
          merged.machine_of[peel.remaining_indices.size() + b];
    }
  }
  return make_assignment(instance.sizes, instance.machines,
                         std::move(mapping));
}

Assignment run_algorithm(const std::string& name, const JobInstance& instance,
                         double epsilon, RunReport* report) {
  if (name == "ptas") return ptas_solve(instance, epsilon, report);
  if (name == "greedy") {
    return graham_greedy(instance.sizes, instance.machines, GreedyOrder::Lpt);
  }
  if (name == "det-mean") return mean_substitution_solve(instance, epsilon);
  if (name == "dp") return dp_solve_instance(instance, epsilon);
  if (name == "brute") return brute_force_opt(instance).assignment;
  throw std::invalid_argument("unknown algorithm: " + name);
}

int cmd_solve(const std::string& input, const std::string& output,
              const std::string& algorithm, double epsilon, double tail_tol,
              std::uint64_t /*seed*/) {
  check_epsilon(epsilon);
  JobInstance instance = JobInstance::load_file(input);
  RunReport report;
  Assignment assignment = run_algorithm(algorithm, instance, epsilon, &report);
  double value = exact_expected_max_of(assignment, tail_tol);
  std::string doc = assignment_to_json_text(assignment, value, algorithm,
                                            epsilon);
  if (algorithm == "ptas") {
    std::cerr << "branch=" << to_string(report.branch) << " mu=" << report.mu
              << " m1=" << report.m1 << " bigs=" << report.big_count;
    if (!report.transition_kind.empty()) {
      std::cerr << ' ' << report.transition_kind << '='
                << report.transition_value;
    }
    std::cerr << '\n';
  }
  if (output.empty()) {
    std::cout << doc << '\n';
  } else {
    std::ofstream out(output);
    if (!out) throw ParseError("cannot open output file: " + output);
    out << doc << '\n';
  }
  return 0;
}

int cmd_compare(const std::string& input, double epsilon, double tail_tol,
                std::uint64_t seed) {
  check_epsilon(epsilon);
  JobInstance instance = JobInstance::load_file(input);

  std::vector<std::string> algorithms{"ptas", "greedy", "det-mean"};
  if (instance.sizes.size() <= 12 && instance.machines <= 4) {
    algorithms.push_back("brute");
  }

  std::cout << std::left << std::setw(10) << "algorithm" << std::right
            << std::setw(16) << "exact_emax" << std::setw(16) << "mc_estimate"
            << std::setw(12) << "mc_se" << std::setw(10) << "ms" << '\n';
  for (std::size_t i = 0; i < algorithms.size(); ++i) {
    auto start = std::chrono::steady_clock::now();
    Assignment a = run_algorithm(algorithms[i], instance, epsilon, nullptr);
    auto ms = std::chrono::duration<double, std::milli>(
                  std::chrono::steady_clock::now() - start)
                  .count();
    double exact = exact_expected_max_of(a, tail_tol);
    MonteCarloResult mc = monte_carlo_emax(a.loads, 200000,
                                           seed + 1000 * (i + 1));
    std::cout << std::left << std::setw(10) << algorithms[i] << std::right
              << std::fixed << std::setprecision(6) << std::setw(16) << exact
              << std::setw(16) << mc.estimate << std::setw(12) << mc.std_error
              << std::setprecision(1) << std::setw(10) << ms << '\n'
              << std::defaultfloat;
  }
  return 0;
}

int cmd_verify(const std::string& suite, const std::string& out_path) {
  std::vector<LemmaReport> rows;
  if (suite == "identities") {
    rows = identity_battery();
  } else if (suite == "lemmas") {
    rows = lemma_battery();
  } else if (suite == "appendix") {
    rows = appendix_battery();
  } else {
    throw std::invalid_argument("unknown suite: " + suite);
  }
  std::string csv = lemma_report_csv(rows);
  if (out_path.empty()) {
    std::cout << csv;
  } else {
    std::ofstream out(out_path);
    if (!out) throw ParseError("cannot open output file: " + out_path);
    out << csv;
  }
  int failed = 0;
  for (const auto& r : rows) {
    if (r.guard_ok && !r.pass) ++failed;
  }
  if (failed > 0) {
    std::cerr << failed << " asserted check(s) failed\n";
    return 2;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  Defaults defaults;
  try {
    defaults = load_defaults();
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }

  CLI::App app{"Load balancing of Poisson jobs: exact expected-makespan "
               "numerics, an approximation scheme, baselines, and a "
               "verification harness"};
  app.require_subcommand(1);

  std::string input;
  std::string output;
  std::string algorithm = "ptas";
  std::string suite;
  std::string out_path;
  double epsilon = defaults.epsilon.value_or(0.5);
  double tail_tol = defaults.tail_tol;
  std::uint64_t seed = defaults.seed;

  auto* solve = app.add_subcommand("solve", "Solve one instance file");
  solve->add_option("--input", input, "Instance JSON file")->required();
  solve->add_option("--epsilon", epsilon, "Target error in (0,1)")
      ->capture_default_str();
  solve->add_option("--algorithm", algorithm,
                    "ptas|greedy|det-mean|dp|brute")
      ->capture_default_str();
  solve->add_option("--seed", seed, "RNG seed")->capture_default_str();
  solve->add_option("--tail-tol", tail_tol, "Expected-max tail tolerance")
      ->capture_default_str();
  solve->add_option("--output", output, "Write the result here (default stdout)");

  auto* compare = app.add_subcommand(
      "compare", "All algorithms on one instance, exact and Monte Carlo");
  compare->add_option("--input", input, "Instance JSON file")->required();
  compare->add_option("--epsilon", epsilon, "Target error in (0,1)")
      ->capture_default_str();
  compare->add_option("--seed", seed, "RNG seed")->capture_default_str();
  compare->add_option("--tail-tol", tail_tol, "Expected-max tail tolerance")
      ->capture_default_str();

  auto* verify = app.add_subcommand("verify", "Run a verification battery");
  verify->add_option("--suite", suite, "lemmas|appendix|identities")
      ->required();
  verify->add_option("--out", out_path, "Write CSV here (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (solve->parsed()) {
      return cmd_solve(input, output, algorithm, epsilon, tail_tol, seed);
    }
    if (compare->parsed()) return cmd_compare(input, epsilon, tail_tol, seed);
    if (verify->parsed()) return cmd_verify(suite, out_path);
  } catch (const ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const GuardError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
