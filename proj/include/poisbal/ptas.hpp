#pragma once

#include <cstdint>
#include <limits>
#include <string>

#include "poisbal/instance.hpp"
#include "poisbal/rounding.hpp"
#include "poisbal/transition.hpp"

namespace poisbal {

struct RunReport {
  CaseTag branch = CaseTag::Dp;
  double mu = 0.0;
  std::int64_t m1 = 0;
  std::int64_t big_count = 0;
  double delta = 0.0;
  std::string transition_kind;  // "t2", "t4", or empty
  double transition_value = std::numeric_limits<double>::quiet_NaN();
  std::int64_t config_count = 0;  // |Q| of the model actually solved
  std::int64_t ip_probes = 0;     // binary-search probes (case 2)
  bool solved = false;            // false for describe_run
};

// Peel, round, classify, dispatch to the case solver, un-round, merge.
// Big jobs end up alone on the top machines. epsilon must lie in (0, 1).
Assignment ptas_solve(const JobInstance& instance, double epsilon,
                      RunReport* report = nullptr);

// The classification half of ptas_solve: identical peeling, rounding and
// branch decision, no solve. Reports the transition point where it is a
// closed-form quantity of (m1, mu).
RunReport describe_run(const JobInstance& instance, double epsilon);

namespace detail {

// Case solvers operating directly on a rounded instance, usable with the
// dispatch guards bypassed. Each returns one configuration per machine.
struct CaseSolve {
  std::vector<MachineConfig> machine_configs;
  double opt = 0.0;
  std::int64_t t2 = -1;
  std::int64_t probes = 0;
  std::int64_t config_count = 0;
};

CaseSolve solve_case2(const RoundedInstance& rounded, std::int64_t m1);
CaseSolve solve_case4(const RoundedInstance& rounded, std::int64_t m1,
                      std::int64_t t4);
CaseSolve solve_case5(const RoundedInstance& rounded, std::int64_t m1);

}  // namespace detail

}  // namespace poisbal
