#include "poisbal/config_ip.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

#include "poisbal/errors.hpp"

namespace poisbal {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double config_load(const MachineConfig& c, std::span<const double> pi) {
  double load = 0.0;
  for (std::size_t k = 0; k < c.size(); ++k) {
    load += static_cast<double>(c[k]) * pi[k];
  }
  return load;
}

// Mixed-radix layout of job profiles p <= n; the first component is the
// most significant digit, so ascending rank is ascending lex order.
struct ProfileSpace {
  std::vector<std::int64_t> radix;    // n_k + 1
  std::vector<std::int64_t> strides;
  std::int64_t total = 1;

  explicit ProfileSpace(std::span<const std::int64_t> n) {
    const std::size_t d = n.size();
    radix.resize(d);
    strides.resize(d);
    for (std::size_t k = 0; k < d; ++k) radix[k] = n[k] + 1;
    std::int64_t s = 1;
    for (std::size_t k = d; k-- > 0;) {
      strides[k] = s;
      if (radix[k] != 0 && s > std::numeric_limits<std::int64_t>::max() / radix[k]) {
        throw GuardError("job profile space overflows");
      }
      s *= radix[k];
    }
    total = s;
  }

  std::int64_t rank_of(const MachineConfig& c) const {
    std::int64_t r = 0;
    for (std::size_t k = 0; k < c.size(); ++k) r += c[k] * strides[k];
    return r;
  }

  void decode(std::int64_t rank, std::vector<std::int64_t>& out) const {
    out.resize(radix.size());
    for (std::size_t k = 0; k < radix.size(); ++k) {
      out[k] = rank / strides[k];
      rank %= strides[k];
    }
  }
};

}  // namespace

std::vector<MachineConfig> enumerate_configs(std::span<const double> pi,
                                             std::span<const std::int64_t> n,
                                             double cap,
                                             std::int64_t limit) {
  const std::size_t d = pi.size();
  if (n.size() != d) throw std::invalid_argument("pi and n length mismatch");
  for (std::size_t k = 0; k < d; ++k) {
    if (!(pi[k] > 0.0)) throw std::invalid_argument("sizes must be positive");
    if (k + 1 < d && !(pi[k] < pi[k + 1])) {
      throw std::invalid_argument("sizes must be strictly increasing");
    }
    if (n[k] < 0) throw std::invalid_argument("counts must be >= 0");
  }
  if (!(cap >= 0.0)) throw std::invalid_argument("cap must be >= 0");

  const double slack = cap * 1e-12;
  std::vector<MachineConfig> out;
  MachineConfig current(d, 0);

  auto rec = [&](auto&& self, std::size_t k, double load) -> void {
    if (k == d) {
      if (static_cast<std::int64_t>(out.size()) >= limit) {
        throw GuardError("configuration set exceeds the enumeration limit");
      }
      out.push_back(current);
      return;
    }
    for (std::int64_t c = 0; c <= n[k]; ++c) {
      double next = load + static_cast<double>(c) * pi[k];
      if (next > cap + slack) break;
      current[k] = c;
      self(self, k + 1, next);
    }
    current[k] = 0;
  };
  rec(rec, 0, 0.0);
  return out;
}

ConfigModel make_config_model(std::span<const SizeGroup> groups,
                              std::int64_t machines, double cap,
                              std::int64_t config_limit) {
  if (machines < 1) throw std::invalid_argument("machines must be >= 1");
  ConfigModel model;
  model.machines = machines;
  model.cap = cap;
  model.sizes.reserve(groups.size());
  model.counts.reserve(groups.size());
  for (const auto& g : groups) {
    model.sizes.push_back(g.size);
    model.counts.push_back(g.count);
  }
  model.configs = enumerate_configs(model.sizes, model.counts, cap, config_limit);
  return model;
}

IpSolution solve_config_ip(const ConfigModel& model,
                           const std::function<double(double)>& cost,
                           std::int64_t state_limit) {
  const std::size_t d = model.sizes.size();
  const std::int64_t m = model.machines;
  if (m < 1) throw std::invalid_argument("machines must be >= 1");
  if (model.configs.empty()) throw GuardError("infeasible: empty configuration set");

  ProfileSpace space(model.counts);
  if (space.total > state_limit / (m + 1)) {
    throw GuardError("profile space exceeds the state limit");
  }
  const auto profiles = static_cast<std::size_t>(space.total);

  // Cost per configuration, memoised on the (shared) load values.
  std::map<double, double> cost_memo;
  std::vector<double> config_cost(model.configs.size());
  std::vector<std::int64_t> config_rank(model.configs.size());
  for (std::size_t i = 0; i < model.configs.size(); ++i) {
    double load = config_load(model.configs[i], model.sizes);
    auto it = cost_memo.find(load);
    if (it == cost_memo.end()) it = cost_memo.emplace(load, cost(load)).first;
    config_cost[i] = it->second;
    config_rank[i] = space.rank_of(model.configs[i]);
  }

  // Layered over machines used; parents kept for every layer for traceback.
  std::vector<double> prev(profiles, kInf);
  std::vector<double> next(profiles, kInf);
  std::vector<std::vector<std::int32_t>> parent(
      static_cast<std::size_t>(m) + 1,
      std::vector<std::int32_t>(profiles, -1));
  prev[0] = 0.0;

  std::vector<std::int64_t> p(d);
  for (std::int64_t j = 0; j < m; ++j) {
    std::fill(next.begin(), next.end(), kInf);
    for (std::size_t r = 0; r < profiles; ++r) {
      if (prev[r] == kInf) continue;
      space.decode(static_cast<std::int64_t>(r), p);
      for (std::size_t i = 0; i < model.configs.size(); ++i) {
        const MachineConfig& c = model.configs[i];
        bool fits = true;
        for (std::size_t k = 0; k < d; ++k) {
          if (p[k] + c[k] > model.counts[k]) {
            fits = false;
            break;
          }
        }
        if (!fits) continue;
        auto nr = static_cast<std::size_t>(
            static_cast<std::int64_t>(r) + config_rank[i]);
        double value = prev[r] + config_cost[i];
        if (value < next[nr]) {
          next[nr] = value;
          parent[static_cast<std::size_t>(j) + 1][nr] =
              static_cast<std::int32_t>(i);
        }
      }
    }
    std::swap(prev, next);
  }

  const auto full = static_cast<std::size_t>(space.total - 1);
  if (prev[full] == kInf) {
    throw GuardError("infeasible configuration program");
  }

  IpSolution solution;
  solution.objective = prev[full];

  // Walk the parents back from (n, m).
  std::map<std::size_t, std::int64_t> tally;
  std::size_t r = full;
  for (std::int64_t j = m; j > 0; --j) {
    std::int32_t i = parent[static_cast<std::size_t>(j)][r];
    if (i < 0) throw std::logic_error("broken traceback in config DP");
    ++tally[static_cast<std::size_t>(i)];
    r = static_cast<std::size_t>(static_cast<std::int64_t>(r) -
                                 config_rank[static_cast<std::size_t>(i)]);
  }
  if (r != 0) throw std::logic_error("config DP traceback did not close");
  solution.multiplicities.assign(tally.begin(), tally.end());

  // Constraint check on the way out.
  std::vector<std::int64_t> used(d, 0);
  std::int64_t machines_used = 0;
  for (const auto& [i, x] : solution.multiplicities) {
    machines_used += x;
    for (std::size_t k = 0; k < d; ++k) used[k] += x * model.configs[i][k];
  }
  if (machines_used != m || !std::equal(used.begin(), used.end(),
                                        model.counts.begin())) {
    throw std::logic_error("config DP produced an invalid solution");
  }
  return solution;
}

std::vector<MachineConfig> expand_solution(const ConfigModel& model,
                                           const IpSolution& solution) {
  std::vector<MachineConfig> machines;
  machines.reserve(static_cast<std::size_t>(model.machines));
  for (const auto& [i, x] : solution.multiplicities) {
    for (std::int64_t t = 0; t < x; ++t) machines.push_back(model.configs[i]);
  }
  std::sort(machines.begin(), machines.end());
  return machines;
}

Assignment extract_assignment(const ConfigModel& model,
                              const IpSolution& solution,
                              std::span<const double> rounded_sizes) {
  const std::size_t d = model.sizes.size();
  std::vector<std::vector<std::size_t>> by_size(d);
  for (std::size_t idx = 0; idx < rounded_sizes.size(); ++idx) {
    auto it = std::lower_bound(model.sizes.begin(), model.sizes.end(),
                               rounded_sizes[idx]);
    if (it == model.sizes.end() || *it != rounded_sizes[idx]) {
      throw std::invalid_argument("job size absent from the model");
    }
    by_size[static_cast<std::size_t>(it - model.sizes.begin())].push_back(idx);
  }

  auto machines = expand_solution(model, solution);
  std::vector<std::int32_t> mapping(rounded_sizes.size(), -1);
  std::vector<std::size_t> cursor(d, 0);
  for (std::size_t j = 0; j < machines.size(); ++j) {
    for (std::size_t k = 0; k < d; ++k) {
      for (std::int64_t t = 0; t < machines[j][k]; ++t) {
        if (cursor[k] >= by_size[k].size()) {
          throw std::invalid_argument(
              "solution uses more jobs of a size than available");
        }
        mapping[by_size[k][cursor[k]++]] = static_cast<std::int32_t>(j);
      }
    }
  }
  for (std::size_t k = 0; k < d; ++k) {
    if (cursor[k] != by_size[k].size()) {
      throw std::invalid_argument(
          "solution leaves jobs of some size unassigned");
    }
  }
  return make_assignment(rounded_sizes,
                         static_cast<std::int64_t>(machines.size()),
                         std::move(mapping));
}

}  // namespace poisbal
