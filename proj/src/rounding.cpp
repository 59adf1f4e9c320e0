#include "poisbal/rounding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>

#include "poisbal/errors.hpp"

namespace poisbal {

namespace {

constexpr double kBundleMarker = std::numeric_limits<double>::quiet_NaN();

// Unique integer k with base^(k-1) * anchor < value <= base^k * anchor,
// evaluated against the same pow() the caller will use.
std::int64_t geometric_index(double value, double anchor, double base) {
  auto k = static_cast<std::int64_t>(
      std::ceil(std::log(value / anchor) / std::log(base)));
  while (std::pow(base, static_cast<double>(k)) * anchor < value) ++k;
  while (k > 0 &&
         std::pow(base, static_cast<double>(k - 1)) * anchor >= value) {
    --k;
  }
  return k;
}

// Unique integer l with anchor + (l-1) step < value <= anchor + l step.
std::int64_t arithmetic_index(double value, double anchor, double step) {
  auto l = static_cast<std::int64_t>(std::ceil((value - anchor) / step));
  while (anchor + static_cast<double>(l) * step < value) ++l;
  while (l > 0 && anchor + static_cast<double>(l - 1) * step >= value) --l;
  return std::max<std::int64_t>(l, 0);
}

}  // namespace

std::int64_t RoundedInstance::rounded_count() const {
  return static_cast<std::int64_t>(regular_jobs.size()) + bundle_count;
}

std::size_t RoundedInstance::group_index_of(double size) const {
  auto it = std::lower_bound(
      groups.begin(), groups.end(), size,
      [](const SizeGroup& g, double v) { return g.size < v; });
  if (it == groups.end() || it->size != size) {
    throw std::invalid_argument("size is not a rounded size of this instance");
  }
  return static_cast<std::size_t>(it - groups.begin());
}

std::vector<double> RoundedInstance::flat_sizes(std::int64_t limit) const {
  if (rounded_count() > limit) {
    throw GuardError("rounded instance too large to materialise");
  }
  std::vector<double> sizes;
  sizes.reserve(static_cast<std::size_t>(rounded_count()));
  for (std::size_t idx : regular_jobs) sizes.push_back(rounded_of[idx]);
  for (std::int64_t i = 0; i < bundle_count; ++i) sizes.push_back(bundle_size);
  return sizes;
}

RoundedInstance round_instance(std::span<const double> sizes, double mu,
                               double delta) {
  if (!(delta > 0.0) || !(delta < 1.0)) {
    throw std::invalid_argument("delta must lie in (0, 1)");
  }
  if (!std::isfinite(mu) || mu < 0.0) {
    throw std::invalid_argument("mu must be finite and >= 0");
  }

  RoundedInstance out;
  out.delta = delta;
  out.mu = mu;
  out.rounded_of.assign(sizes.size(), kBundleMarker);

  if (mu == 0.0) {
    // All-zero instance: everything is sub-threshold mass zero.
    for (std::size_t i = 0; i < sizes.size(); ++i) {
      if (sizes[i] != 0.0) {
        throw std::invalid_argument("mu == 0 requires all sizes to be 0");
      }
      out.small_jobs.push_back(i);
    }
    return out;
  }

  const double threshold = delta * mu;       // both grid anchor and bundle size
  const double step = delta * delta * mu;    // arithmetic grid step
  out.bundle_size = threshold;

  double small_sum = 0.0;
  std::map<double, std::int64_t> tally;
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    double lam = sizes[i];
    if (lam > mu * (1.0 + 1e-12)) {
      throw std::invalid_argument("rounding requires every size <= mu");
    }
    lam = std::min(lam, mu);
    if (lam >= threshold) {
      std::int64_t k = geometric_index(lam, threshold, 1.0 + delta);
      double nu = std::pow(1.0 + delta, static_cast<double>(k)) * threshold;
      std::int64_t l = arithmetic_index(nu, threshold, step);
      double rounded = threshold + static_cast<double>(l) * step;
      out.rounded_of[i] = rounded;
      out.regular_jobs.push_back(i);
      ++tally[rounded];
    } else {
      small_sum += lam;
      out.small_jobs.push_back(i);
    }
  }
  out.small_total = small_sum;

  if (small_sum > 0.0) {
    auto k = static_cast<std::int64_t>(std::ceil(small_sum / threshold));
    while (static_cast<double>(k) * threshold < small_sum) ++k;
    while (k > 0 && static_cast<double>(k - 1) * threshold >= small_sum) --k;
    out.bundle_count = k;
    tally[threshold] += k;
  }

  out.groups.reserve(tally.size());
  for (const auto& [size, count] : tally) out.groups.push_back({size, count});
  return out;
}

namespace {

struct BundleMachine {
  std::size_t machine;
  std::int64_t slots;
  double capacity;
};

}  // namespace

Assignment unround_assignment(const RoundedInstance& rounded,
                              std::span<const MachineConfig> machine_configs,
                              std::span<const double> original_sizes) {
  const auto m = static_cast<std::int64_t>(machine_configs.size());
  if (m < 1) throw std::invalid_argument("need at least one machine");
  if (rounded.rounded_of.size() != original_sizes.size()) {
    throw std::invalid_argument(
        "rounding provenance does not cover the original jobs");
  }
  const std::size_t g_count = rounded.groups.size();

  // Per-group slot totals must match the rounded instance exactly.
  std::vector<std::int64_t> used(g_count, 0);
  for (const auto& config : machine_configs) {
    if (config.size() != g_count) {
      throw std::invalid_argument("config width does not match group count");
    }
    for (std::size_t g = 0; g < g_count; ++g) {
      if (config[g] < 0) throw std::invalid_argument("negative config entry");
      used[g] += config[g];
    }
  }
  for (std::size_t g = 0; g < g_count; ++g) {
    if (used[g] != rounded.groups[g].count) {
      throw std::invalid_argument(
          "machine configs do not cover the rounded jobs exactly");
    }
  }

  std::vector<double> rounded_loads(static_cast<std::size_t>(m), 0.0);
  for (std::size_t j = 0; j < machine_configs.size(); ++j) {
    for (std::size_t g = 0; g < g_count; ++g) {
      rounded_loads[j] += static_cast<double>(machine_configs[j][g]) *
                          rounded.groups[g].size;
    }
  }

  std::vector<std::int32_t> mapping(original_sizes.size(), -1);

  // Regular originals fill the slots of their own rounded size, smallest
  // original first, machines in index order.
  std::vector<std::vector<std::size_t>> per_group(g_count);
  for (std::size_t idx : rounded.regular_jobs) {
    per_group[rounded.group_index_of(rounded.rounded_of[idx])].push_back(idx);
  }
  for (auto& jobs : per_group) {
    std::sort(jobs.begin(), jobs.end(), [&](std::size_t a, std::size_t b) {
      if (original_sizes[a] != original_sizes[b]) {
        return original_sizes[a] < original_sizes[b];
      }
      return a < b;
    });
  }

  std::vector<BundleMachine> bundle_machines;
  for (std::size_t g = 0; g < g_count; ++g) {
    std::size_t cursor = 0;
    for (std::size_t j = 0; j < machine_configs.size(); ++j) {
      std::int64_t slots = machine_configs[j][g];
      std::int64_t filled = 0;
      while (filled < slots && cursor < per_group[g].size()) {
        mapping[per_group[g][cursor++]] = static_cast<std::int32_t>(j);
        ++filled;
      }
      // Slots of the bundle size left over after the regular jobs of that
      // size are placed become bundle capacity.
      if (slots > filled) {
        bundle_machines.push_back(
            {j, slots - filled,
             static_cast<double>(slots - filled) * rounded.bundle_size});
      }
    }
    if (cursor < per_group[g].size()) {
      throw std::invalid_argument("more rounded jobs than config slots");
    }
  }

  // Pour the sub-threshold originals into the bundle capacity, biggest jobs
  // and best-provisioned machines first. Each machine stops as soon as it
  // reaches its capacity, so it overflows by less than one small job.
  std::vector<std::size_t> smalls = rounded.small_jobs;
  std::sort(smalls.begin(), smalls.end(), [&](std::size_t a, std::size_t b) {
    if (original_sizes[a] != original_sizes[b]) {
      return original_sizes[a] > original_sizes[b];
    }
    return a < b;
  });
  std::sort(bundle_machines.begin(), bundle_machines.end(),
            [](const BundleMachine& a, const BundleMachine& b) {
              if (a.slots != b.slots) return a.slots > b.slots;
              return a.machine < b.machine;
            });

  std::size_t cursor = 0;
  for (const auto& bm : bundle_machines) {
    double poured = 0.0;
    while (cursor < smalls.size() && poured < bm.capacity) {
      mapping[smalls[cursor]] = static_cast<std::int32_t>(bm.machine);
      poured += original_sizes[smalls[cursor]];
      ++cursor;
    }
  }
  // Only zero-size jobs can remain (their melted mass is 0).
  for (; cursor < smalls.size(); ++cursor) {
    if (original_sizes[smalls[cursor]] > 0.0) {
      throw GuardError("small jobs left over after the bundle pour");
    }
    mapping[smalls[cursor]] = 0;
  }

  for (std::int32_t v : mapping) {
    if (v < 0) throw std::invalid_argument("provenance missed an original job");
  }

  Assignment result = make_assignment(original_sizes, m, std::move(mapping));

  // Per-machine postcondition, with one rebalance attempt before giving up:
  // move trailing small jobs off a violating machine into remaining bundle
  // slack elsewhere.
  const double factor = 1.0 + 5.0 * rounded.delta;
  auto bound_of = [&](std::size_t j) {
    return factor * rounded_loads[j] + 1e-9 * (1.0 + rounded_loads[j]);
  };
  for (int pass = 0; pass < 2; ++pass) {
    bool violated = false;
    for (std::size_t j = 0; j < result.loads.size(); ++j) {
      if (result.loads[j] > bound_of(j)) violated = true;
    }
    if (!violated) break;
    if (pass == 1) {
      throw GuardError("un-rounding exceeded the (1+5*delta) load bound");
    }
    for (std::size_t j = 0; j < result.loads.size(); ++j) {
      while (result.loads[j] > bound_of(j)) {
        // Smallest movable job on j.
        std::int64_t pick = -1;
        for (std::size_t idx : smalls) {
          if (result.machine_of[idx] == static_cast<std::int32_t>(j) &&
              (pick < 0 || original_sizes[idx] <
                               original_sizes[static_cast<std::size_t>(pick)])) {
            pick = static_cast<std::int64_t>(idx);
          }
        }
        if (pick < 0) break;
        double sz = original_sizes[static_cast<std::size_t>(pick)];
        std::int64_t target = -1;
        double best_slack = 0.0;
        for (std::size_t t = 0; t < result.loads.size(); ++t) {
          if (t == j) continue;
          double slack = bound_of(t) - result.loads[t] - sz;
          if (slack > best_slack) {
            best_slack = slack;
            target = static_cast<std::int64_t>(t);
          }
        }
        if (target < 0) break;
        result.machine_of[static_cast<std::size_t>(pick)] =
            static_cast<std::int32_t>(target);
        result.loads[j] -= sz;
        result.loads[static_cast<std::size_t>(target)] += sz;
      }
    }
  }
  return result;
}

Assignment unround_assignment(const RoundedInstance& rounded,
                              const Assignment& rounded_assignment,
                              std::span<const double> original_sizes) {
  const auto m = static_cast<std::int64_t>(rounded_assignment.loads.size());
  if (static_cast<std::int64_t>(rounded_assignment.machine_of.size()) !=
      rounded.rounded_count()) {
    throw std::invalid_argument(
        "rounded assignment length does not match the rounded instance");
  }
  std::vector<MachineConfig> configs(
      static_cast<std::size_t>(m), MachineConfig(rounded.groups.size(), 0));
  std::size_t flat = 0;
  for (std::size_t idx : rounded.regular_jobs) {
    std::int32_t j = rounded_assignment.machine_of[flat++];
    ++configs.at(static_cast<std::size_t>(j))
          [rounded.group_index_of(rounded.rounded_of[idx])];
  }
  if (rounded.bundle_count > 0) {
    std::size_t gb = rounded.group_index_of(rounded.bundle_size);
    for (std::int64_t i = 0; i < rounded.bundle_count; ++i) {
      std::int32_t j = rounded_assignment.machine_of[flat++];
      ++configs.at(static_cast<std::size_t>(j))[gb];
    }
  }
  return unround_assignment(rounded, configs, original_sizes);
}

}  // namespace poisbal
