#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "poisbal/instance.hpp"
#include "poisbal/poisson.hpp"

namespace poisbal {

// Inputs of the small-m fallback: jobs already destined for their own
// machines (big), the remaining jobs (small), and the derived parameters.
struct DpParams {
  std::vector<double> big_sizes;
  std::vector<double> small_sizes;
  std::int64_t machines = 1;
  double epsilon = 0.0;

  std::int64_t m1 = 1;   // machines - big count
  double mu = 0.0;       // average small load over the m1 machines
  double delta = 0.0;    // max{epsilon/(1000 m1), 2^(-10^9/epsilon^2)}
  std::int64_t u = 1;    // truncation horizon of the objective

  // Checks the hypotheses (small <= mu, big > mu, mu within the admissible
  // range) and fills the derived fields.
  static DpParams make(std::span<const double> big_sizes,
                       std::span<const double> small_sizes,
                       std::int64_t machines, double epsilon);
};

// Geometric load levels mu/2, (1+delta) mu/2, ..., first level >= 4 mu.
struct LoadGrid {
  double mu = 0.0;
  double delta = 0.0;
  std::int64_t levels = 0;

  static LoadGrid make(double mu, double delta);
  double level_value(std::int64_t k) const;       // k in [1, levels]
  std::int64_t level_of(double load) const;       // smallest k with load <= l_k
};

// The truncated objective: sum over x < u of P[max-of-big = x] times
// (x + sum_{y=x+1..u} P[max over the level profile >= y]). level_loads
// gives (level value, machine count) pairs.
double truncated_objective(std::span<const LoadGroup> level_loads,
                           std::span<const double> big_sizes, std::int64_t u);

struct DpTrace {
  // Every reachable complete load profile (sorted level indices, one per
  // machine), the chosen minimiser, its objective value, and the state count.
  std::vector<std::vector<std::int32_t>> complete_profiles;
  std::vector<std::int32_t> chosen;
  double objective = 0.0;
  std::int64_t states = 0;
};

// Round the small jobs, sweep the reachable (job profile, load profile)
// states, pick the complete load profile minimising the truncated objective,
// trace an assignment back, un-round it and append the big jobs on their own
// machines. Job order in the result: small jobs first, then big jobs.
Assignment run_dp(const DpParams& params,
                  std::int64_t state_limit = 100'000'000,
                  DpTrace* trace = nullptr);

}  // namespace poisbal
