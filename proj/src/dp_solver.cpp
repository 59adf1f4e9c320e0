#include "poisbal/dp_solver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>
#include <stdexcept>

#include "poisbal/config_ip.hpp"
#include "poisbal/errors.hpp"
#include "poisbal/rounding.hpp"

namespace poisbal {

DpParams DpParams::make(std::span<const double> big_sizes,
                        std::span<const double> small_sizes,
                        std::int64_t machines, double epsilon) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
    throw std::invalid_argument("epsilon must lie in (0, 1)");
  }
  DpParams p;
  p.big_sizes.assign(big_sizes.begin(), big_sizes.end());
  p.small_sizes.assign(small_sizes.begin(), small_sizes.end());
  p.machines = machines;
  p.epsilon = epsilon;

  p.m1 = machines - static_cast<std::int64_t>(big_sizes.size());
  if (p.m1 < (small_sizes.empty() ? 0 : 1)) {
    throw GuardError(
        "hypotheses violated: more single-machine jobs than machines");
  }
  if (small_sizes.empty()) {
    // Nothing left to schedule; the derived fields are inert.
    p.mu = 0.0;
    p.delta = 0.5;
    p.u = 1;
    return p;
  }
  double total = 0.0;
  for (double s : small_sizes) total += s;
  p.mu = total / static_cast<double>(p.m1);

  for (double s : small_sizes) {
    if (s > p.mu * (1.0 + 1e-12)) {
      throw GuardError("hypotheses violated: a small job exceeds mu");
    }
  }
  for (double s : big_sizes) {
    if (!(s > p.mu * (1.0 - 1e-12)) || s == 0.0) {
      throw GuardError("hypotheses violated: a big job does not exceed mu");
    }
  }
  if (p.m1 >= 2) {
    double cap = 6000000.0 / (epsilon * epsilon) *
                 std::log(static_cast<double>(p.m1));
    if (p.mu > cap) {
      throw GuardError("hypotheses violated: mu exceeds the admissible range");
    }
  }

  // The 2^(-10^9/eps^2) term underflows for every representable epsilon;
  // it is clamped at 2^-60 so the max stays well-defined.
  double alt = std::exp2(-std::min(60.0, 1e9 / (epsilon * epsilon)));
  p.delta = std::max(epsilon / (1000.0 * static_cast<double>(p.m1)), alt);

  double lu = 1000.0 / (epsilon * epsilon) *
              std::log(static_cast<double>(p.m1)) * std::max(p.mu, 1.0);
  p.u = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(lu)));
  return p;
}

namespace {

double grid_level(double mu, double delta, std::int64_t k) {
  return (mu / 2.0) * std::pow(1.0 + delta, static_cast<double>(k - 1));
}

}  // namespace

LoadGrid LoadGrid::make(double mu, double delta) {
  if (!(mu > 0.0) || !(delta > 0.0) || !(delta < 1.0)) {
    throw std::invalid_argument("load grid needs mu > 0 and delta in (0,1)");
  }
  LoadGrid g;
  g.mu = mu;
  g.delta = delta;
  // Smallest e with (mu/2)(1+delta)^(e-1) >= 4 mu.
  auto e = static_cast<std::int64_t>(
               std::ceil(std::log(8.0) / std::log1p(delta))) + 1;
  while (grid_level(mu, delta, e) < 4.0 * mu) ++e;
  while (e > 1 && grid_level(mu, delta, e - 1) >= 4.0 * mu) --e;
  g.levels = e;
  return g;
}

double LoadGrid::level_value(std::int64_t k) const {
  return grid_level(mu, delta, k);
}

std::int64_t LoadGrid::level_of(double load) const {
  if (load <= mu / 2.0) return 1;
  if (load > level_value(levels) * (1.0 + 1e-12)) {
    throw std::invalid_argument("load above the grid ceiling");
  }
  auto k = static_cast<std::int64_t>(
      std::ceil(std::log(load / (mu / 2.0)) / std::log1p(delta))) + 1;
  while (k > 1 && level_value(k - 1) >= load) --k;
  while (level_value(k) < load) ++k;
  return std::min(k, levels);
}

double truncated_objective(std::span<const LoadGroup> level_loads,
                           std::span<const double> big_sizes, std::int64_t u) {
  if (u < 1) throw std::invalid_argument("objective needs u >= 1");
  std::vector<double> tail = max_survival_table(level_loads, u);

  std::vector<double> suffix(static_cast<std::size_t>(u) + 1, 0.0);
  for (std::int64_t x = u - 1; x >= 0; --x) {
    suffix[static_cast<std::size_t>(x)] =
        suffix[static_cast<std::size_t>(x + 1)] +
        tail[static_cast<std::size_t>(x + 1)];
  }

  auto big_groups = group_loads(big_sizes);
  std::vector<double> pmf_x = max_pmf_table(big_groups, u - 1);
  double obj = 0.0;
  for (std::int64_t x = 0; x < u; ++x) {
    double p = pmf_x[static_cast<std::size_t>(x)];
    if (p == 0.0) continue;
    obj += p * (static_cast<double>(x) + suffix[static_cast<std::size_t>(x)]);
  }
  return obj;
}

namespace {

// As truncated_objective, but with the big-job pmf precomputed and the
// survival table cut off where it dies, so scanning many candidate load
// profiles stays cheap.
double objective_fast(std::span<const LoadGroup> level_loads,
                      std::span<const double> pmf_x, std::int64_t u) {
  double max_level = 0.0;
  for (const auto& g : level_loads) max_level = std::max(max_level, g.rate);
  auto cut = std::min<std::int64_t>(
      u, static_cast<std::int64_t>(
             std::ceil(max_level + 12.0 * std::sqrt(max_level) + 60.0)));

  // Cut the survival table where it has provably died (the table is zero
  // from the first vanished entry onwards); widen if the guess was short.
  std::vector<double> tail = max_survival_table(level_loads, cut);
  while (cut < u && tail[static_cast<std::size_t>(cut)] > 0.0) {
    cut = std::min<std::int64_t>(u, cut * 2 + 64);
    tail = max_survival_table(level_loads, cut);
  }
  std::vector<double> suffix(static_cast<std::size_t>(cut) + 1, 0.0);
  for (std::int64_t x = cut - 1; x >= 0; --x) {
    suffix[static_cast<std::size_t>(x)] =
        suffix[static_cast<std::size_t>(x + 1)] +
        tail[static_cast<std::size_t>(x + 1)];
  }

  double obj = 0.0;
  auto lim = std::min<std::int64_t>(
      u, static_cast<std::int64_t>(pmf_x.size()));
  for (std::int64_t x = 0; x < lim; ++x) {
    double p = pmf_x[static_cast<std::size_t>(x)];
    if (p == 0.0) continue;
    double s = x < cut ? suffix[static_cast<std::size_t>(x)] : 0.0;
    obj += p * (static_cast<double>(x) + s);
  }
  return obj;
}

using LevelMultiset = std::vector<std::int32_t>;  // sorted level indices

struct StateKey {
  std::int64_t rank;
  LevelMultiset levels;
  bool operator<(const StateKey& other) const {
    if (rank != other.rank) return rank < other.rank;
    return levels < other.levels;
  }
};

struct Parent {
  std::int64_t rank = -1;
  LevelMultiset levels;
  std::int32_t config = -1;
};

}  // namespace

Assignment run_dp(const DpParams& params, std::int64_t state_limit,
                  DpTrace* trace) {
  const auto n_small = static_cast<std::int64_t>(params.small_sizes.size());
  const auto n_big = static_cast<std::int64_t>(params.big_sizes.size());
  const std::int64_t m = params.machines;
  const std::int64_t m1 = params.m1;

  std::vector<std::int32_t> mapping(
      static_cast<std::size_t>(n_small + n_big), -1);
  for (std::int64_t b = 0; b < n_big; ++b) {
    mapping[static_cast<std::size_t>(n_small + b)] =
        static_cast<std::int32_t>(m1 + b);
  }
  std::vector<double> all_sizes = params.small_sizes;
  all_sizes.insert(all_sizes.end(), params.big_sizes.begin(),
                   params.big_sizes.end());

  auto finish = [&](void) {
    return make_assignment(all_sizes, m, std::move(mapping));
  };

  if (n_small == 0) return finish();
  if (m1 == 1 || params.mu == 0.0) {
    // Single remaining machine, or only zero-size jobs: one choice.
    for (std::int64_t i = 0; i < n_small; ++i) {
      mapping[static_cast<std::size_t>(i)] = 0;
    }
    return finish();
  }

  RoundedInstance rounded =
      round_instance(params.small_sizes, params.mu, params.delta);
  LoadGrid grid = LoadGrid::make(params.mu, params.delta);

  std::vector<double> pi;
  std::vector<std::int64_t> counts;
  for (const auto& g : rounded.groups) {
    pi.push_back(g.size);
    counts.push_back(g.count);
  }
  auto configs = enumerate_configs(pi, counts, 4.0 * params.mu);

  const std::size_t d = pi.size();
  std::vector<std::int64_t> strides(d);
  {
    std::int64_t s = 1;
    for (std::size_t k = d; k-- > 0;) {
      strides[k] = s;
      if (s > std::numeric_limits<std::int64_t>::max() / (counts[k] + 1)) {
        throw GuardError("job profile space overflows");
      }
      s *= counts[k] + 1;
    }
  }

  // Per nonzero configuration: profile-rank shift and grid level.
  struct Move {
    std::int64_t rank_shift;
    std::int32_t level;
    std::size_t config;
  };
  std::vector<Move> moves;
  for (std::size_t i = 0; i < configs.size(); ++i) {
    bool zero = std::all_of(configs[i].begin(), configs[i].end(),
                            [](std::int64_t c) { return c == 0; });
    if (zero) continue;
    double load = 0.0;
    std::int64_t shift = 0;
    for (std::size_t k = 0; k < d; ++k) {
      load += static_cast<double>(configs[i][k]) * pi[k];
      shift += configs[i][k] * strides[k];
    }
    moves.push_back({shift, static_cast<std::int32_t>(grid.level_of(load)),
                     i});
  }

  // Reachability, keyed by job-profile rank then by sorted level multiset.
  std::map<std::int64_t, std::set<LevelMultiset>> reachable;
  std::map<StateKey, Parent> parents;
  reachable[0].insert(LevelMultiset{});
  std::int64_t states = 1;

  std::vector<std::int64_t> profile(d);
  for (auto it = reachable.begin(); it != reachable.end(); ++it) {
    const std::int64_t rank = it->first;
    {
      std::int64_t rem = rank;
      for (std::size_t k = 0; k < d; ++k) {
        profile[k] = rem / strides[k];
        rem %= strides[k];
      }
    }
    for (const LevelMultiset& levels : it->second) {
      if (static_cast<std::int64_t>(levels.size()) >= m1) continue;
      for (const Move& mv : moves) {
        const MachineConfig& q = configs[mv.config];
        bool fits = true;
        for (std::size_t k = 0; k < d; ++k) {
          if (profile[k] + q[k] > counts[k]) {
            fits = false;
            break;
          }
        }
        if (!fits) continue;
        LevelMultiset next = levels;
        next.insert(std::upper_bound(next.begin(), next.end(), mv.level),
                    mv.level);
        auto [slot, inserted] = reachable[rank + mv.rank_shift].insert(next);
        if (inserted) {
          if (++states > state_limit) {
            throw GuardError("reachability exceeds the state budget");
          }
          parents[{rank + mv.rank_shift, next}] =
              Parent{rank, levels, static_cast<std::int32_t>(mv.config)};
        }
      }
    }
  }

  std::int64_t full = 0;
  for (std::size_t k = 0; k < d; ++k) full += counts[k] * strides[k];
  auto done = reachable.find(full);
  if (done == reachable.end()) {
    throw GuardError("no load profile covers all rounded jobs");
  }

  // Big-job pmf once; support cut where the max distribution dies.
  std::vector<double> pmf_x;
  {
    auto big_groups = group_loads(params.big_sizes);
    double mx = 0.0;
    for (const auto& g : big_groups) mx = std::max(mx, g.rate);
    auto cut = std::min<std::int64_t>(
        params.u - 1,
        static_cast<std::int64_t>(std::ceil(mx + 12.0 * std::sqrt(mx) + 60.0)));
    pmf_x = max_pmf_table(big_groups, cut);
  }

  const LevelMultiset* best = nullptr;
  double best_value = std::numeric_limits<double>::infinity();
  for (const LevelMultiset& levels : done->second) {
    if (static_cast<std::int64_t>(levels.size()) != m1) continue;
    std::vector<LoadGroup> groups;
    for (std::int32_t lv : levels) {
      if (!groups.empty() && groups.back().rate == grid.level_value(lv)) {
        ++groups.back().count;
      } else {
        groups.push_back({grid.level_value(lv), 1});
      }
    }
    double value = objective_fast(groups, pmf_x, params.u);
    if (trace != nullptr) trace->complete_profiles.push_back(levels);
    if (value < best_value) {
      best_value = value;
      best = &levels;
    }
  }
  if (best == nullptr) {
    throw GuardError("no complete load profile found");
  }
  if (trace != nullptr) {
    trace->chosen = *best;
    trace->objective = best_value;
    trace->states = states;
  }

  // Trace the chosen profile back to one configuration per machine.
  std::vector<MachineConfig> machine_configs;
  {
    StateKey key{full, *best};
    while (key.rank != 0) {
      auto pit = parents.find(key);
      if (pit == parents.end()) {
        throw std::logic_error("broken traceback in reachability DP");
      }
      machine_configs.push_back(configs[static_cast<std::size_t>(
          pit->second.config)]);
      key = StateKey{pit->second.rank, pit->second.levels};
    }
    if (static_cast<std::int64_t>(machine_configs.size()) != m1) {
      throw std::logic_error("traceback produced the wrong machine count");
    }
    std::sort(machine_configs.begin(), machine_configs.end());
  }

  Assignment small = unround_assignment(rounded, machine_configs,
                                        params.small_sizes);
  for (std::int64_t i = 0; i < n_small; ++i) {
    mapping[static_cast<std::size_t>(i)] =
        small.machine_of[static_cast<std::size_t>(i)];
  }
  return finish();
}

}  // namespace poisbal
