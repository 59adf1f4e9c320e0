#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "poisbal/instance.hpp"
#include "poisbal/rounding.hpp"

namespace poisbal {

// All single-machine assignments c >= 0 with c^T pi <= cap and c <= n,
// in lexicographic order (the zero configuration first).
std::vector<MachineConfig> enumerate_configs(std::span<const double> pi,
                                             std::span<const std::int64_t> n,
                                             double cap,
                                             std::int64_t limit = 10'000'000);

struct ConfigModel {
  std::vector<double> sizes;         // pi, strictly increasing, positive
  std::vector<std::int64_t> counts;  // n
  std::int64_t machines = 0;
  double cap = 0.0;
  std::vector<MachineConfig> configs;  // Q
};

ConfigModel make_config_model(std::span<const SizeGroup> groups,
                              std::int64_t machines, double cap,
                              std::int64_t config_limit = 10'000'000);

struct IpSolution {
  double objective = 0.0;
  // config index in the model -> multiplicity x_c (only nonzero entries)
  std::vector<std::pair<std::size_t, std::int64_t>> multiplicities;
};

// Exact minimum of sum_c x_c f(c^T pi) subject to sum x_c = m and
// sum x_c c = n, by dynamic programming over (consumed job profile,
// machines used). Costs are memoised per distinct configuration load.
// Throws GuardError on infeasibility or when the profile space exceeds
// state_limit states.
IpSolution solve_config_ip(const ConfigModel& model,
                           const std::function<double(double)>& cost,
                           std::int64_t state_limit = 50'000'000);

// The m per-machine configurations of a solution, sorted lexicographically.
std::vector<MachineConfig> expand_solution(const ConfigModel& model,
                                           const IpSolution& solution);

// Concrete rounded jobs fill the configuration slots of their size in
// ascending index order, machines in expand_solution() order.
Assignment extract_assignment(const ConfigModel& model,
                              const IpSolution& solution,
                              std::span<const double> rounded_sizes);

}  // namespace poisbal
