#pragma once

#include <cstdint>
#include <span>

#include "poisbal/instance.hpp"

namespace poisbal {

// (1+epsilon)-approximate deterministic makespan minimiser: peel big jobs,
// round the rest with delta = epsilon/10, minimise the maximum configuration
// load by a profile DP (configurations capped at 4*mu), un-round.
Assignment det_schedule(std::span<const double> sizes, std::int64_t machines,
                        double epsilon);

enum class GreedyOrder { Lpt, Given };

// Graham's rule: place each job on the machine with the least current
// expected load, lowest machine index on ties.
Assignment graham_greedy(std::span<const double> sizes, std::int64_t machines,
                         GreedyOrder order = GreedyOrder::Lpt);

// Deterministic scheduling on the rates themselves (w_i = E[W_i] = lambda_i).
Assignment mean_substitution_solve(const JobInstance& instance, double epsilon);

}  // namespace poisbal
