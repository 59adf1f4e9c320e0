#include "poisbal/det_sched.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <stdexcept>

#include "poisbal/config_ip.hpp"
#include "poisbal/errors.hpp"
#include "poisbal/rounding.hpp"

namespace poisbal {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Minimise the maximum configuration load over assignments of the rounded
// jobs to exactly `machines` machines (empty machines allowed via the zero
// configuration). Returns one configuration per machine.
std::vector<MachineConfig> minimax_profile_dp(const RoundedInstance& rounded,
                                              std::int64_t machines) {
  auto model = make_config_model(rounded.groups, machines, 4.0 * rounded.mu);
  const std::size_t d = model.sizes.size();

  std::vector<std::int64_t> strides(d);
  std::int64_t total = 1;
  for (std::size_t k = d; k-- > 0;) {
    strides[k] = total;
    total *= model.counts[k] + 1;
    if (total > 50'000'000 / (machines + 1)) {
      throw GuardError("profile space exceeds the state limit");
    }
  }
  const auto profiles = static_cast<std::size_t>(total);

  std::vector<double> config_load(model.configs.size());
  std::vector<std::int64_t> config_rank(model.configs.size());
  for (std::size_t i = 0; i < model.configs.size(); ++i) {
    double load = 0.0;
    std::int64_t r = 0;
    for (std::size_t k = 0; k < d; ++k) {
      load += static_cast<double>(model.configs[i][k]) * model.sizes[k];
      r += model.configs[i][k] * strides[k];
    }
    config_load[i] = load;
    config_rank[i] = r;
  }

  std::vector<double> prev(profiles, kInf);
  std::vector<double> next(profiles, kInf);
  std::vector<std::vector<std::int32_t>> parent(
      static_cast<std::size_t>(machines) + 1,
      std::vector<std::int32_t>(profiles, -1));
  prev[0] = 0.0;

  std::vector<std::int64_t> p(d);
  for (std::int64_t j = 0; j < machines; ++j) {
    std::fill(next.begin(), next.end(), kInf);
    for (std::size_t r = 0; r < profiles; ++r) {
      if (prev[r] == kInf) continue;
      std::int64_t rem = static_cast<std::int64_t>(r);
      for (std::size_t k = 0; k < d; ++k) {
        p[k] = rem / strides[k];
        rem %= strides[k];
      }
      for (std::size_t i = 0; i < model.configs.size(); ++i) {
        bool fits = true;
        for (std::size_t k = 0; k < d; ++k) {
          if (p[k] + model.configs[i][k] > model.counts[k]) {
            fits = false;
            break;
          }
        }
        if (!fits) continue;
        auto nr = static_cast<std::size_t>(
            static_cast<std::int64_t>(r) + config_rank[i]);
        double value = std::max(prev[r], config_load[i]);
        if (value < next[nr]) {
          next[nr] = value;
          parent[static_cast<std::size_t>(j) + 1][nr] =
              static_cast<std::int32_t>(i);
        }
      }
    }
    std::swap(prev, next);
  }

  const auto full = static_cast<std::size_t>(total - 1);
  if (prev[full] == kInf) {
    throw GuardError("no feasible rounded schedule under the 4*mu cap");
  }

  std::vector<MachineConfig> result;
  std::size_t r = full;
  for (std::int64_t j = machines; j > 0; --j) {
    std::int32_t i = parent[static_cast<std::size_t>(j)][r];
    if (i < 0) throw std::logic_error("broken traceback in makespan DP");
    result.push_back(model.configs[static_cast<std::size_t>(i)]);
    r = static_cast<std::size_t>(static_cast<std::int64_t>(r) -
                                 config_rank[static_cast<std::size_t>(i)]);
  }
  std::reverse(result.begin(), result.end());
  return result;
}

}  // namespace

Assignment det_schedule(std::span<const double> sizes, std::int64_t machines,
                        double epsilon) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
    throw std::invalid_argument("epsilon must lie in (0, 1)");
  }
  JobInstance instance{machines, {sizes.begin(), sizes.end()}};
  instance.validate();

  const std::size_t n = sizes.size();
  std::vector<std::int32_t> mapping(n, -1);
  if (n == 0) return make_assignment(sizes, machines, std::move(mapping));

  PeelResult peel = peel_big_jobs(instance);
  for (std::size_t b = 0; b < peel.big_indices.size(); ++b) {
    mapping[peel.big_indices[b]] =
        static_cast<std::int32_t>(peel.m1 + static_cast<std::int64_t>(b));
  }

  if (!peel.remaining_indices.empty()) {
    if (peel.mu == 0.0) {
      for (std::size_t idx : peel.remaining_indices) mapping[idx] = 0;
    } else {
      RoundedInstance rounded =
          round_instance(peel.remaining_sizes, peel.mu, epsilon / 10.0);
      auto configs = minimax_profile_dp(rounded, peel.m1);
      Assignment small = unround_assignment(rounded, configs,
                                            peel.remaining_sizes);
      for (std::size_t i = 0; i < peel.remaining_indices.size(); ++i) {
        mapping[peel.remaining_indices[i]] = small.machine_of[i];
      }
    }
  }
  return make_assignment(sizes, machines, std::move(mapping));
}

Assignment graham_greedy(std::span<const double> sizes, std::int64_t machines,
                         GreedyOrder order) {
  JobInstance instance{machines, {sizes.begin(), sizes.end()}};
  instance.validate();

  std::vector<std::size_t> jobs(sizes.size());
  std::iota(jobs.begin(), jobs.end(), 0);
  if (order == GreedyOrder::Lpt) {
    std::sort(jobs.begin(), jobs.end(), [&](std::size_t a, std::size_t b) {
      if (sizes[a] != sizes[b]) return sizes[a] > sizes[b];
      return a < b;
    });
  }

  // Min-heap on (load, machine index).
  using Entry = std::pair<double, std::int32_t>;
  std::priority_queue<Entry, std::vector<Entry>, std::greater<>> heap;
  for (std::int64_t j = 0; j < machines; ++j) {
    heap.emplace(0.0, static_cast<std::int32_t>(j));
  }

  std::vector<std::int32_t> mapping(sizes.size(), -1);
  for (std::size_t idx : jobs) {
    auto [load, j] = heap.top();
    heap.pop();
    mapping[idx] = j;
    heap.emplace(load + sizes[idx], j);
  }
  return make_assignment(sizes, machines, std::move(mapping));
}

Assignment mean_substitution_solve(const JobInstance& instance,
                                   double epsilon) {
  instance.validate();
  return det_schedule(instance.sizes, instance.machines, epsilon);
}

}  // namespace poisbal
