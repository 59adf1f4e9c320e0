#include "poisbal/ptas.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

#include "poisbal/config_ip.hpp"
#include "poisbal/det_sched.hpp"
#include "poisbal/dp_solver.hpp"
#include "poisbal/errors.hpp"
#include "poisbal/poisson.hpp"

namespace poisbal {

namespace detail {

CaseSolve solve_case2(const RoundedInstance& rounded, std::int64_t m1) {
  auto model = make_config_model(rounded.groups, m1, 4.0 * rounded.mu);
  CaseSolve result;
  result.config_count = static_cast<std::int64_t>(model.configs.size());

  std::map<std::int64_t, double> probed;
  auto probe = [&](std::int64_t t) {
    auto sol = solve_config_ip(
        model, [t](double x) { return survival(x, t + 1); });
    ++result.probes;
    probed[t] = sol.objective;
    return sol.objective < 1.0 / 3.0;
  };

  auto lo = static_cast<std::int64_t>(std::floor(rounded.mu));
  auto hi = static_cast<std::int64_t>(std::ceil(
      100.0 * rounded.mu * std::log(static_cast<double>(m1))));
  if (lo < 0) lo = 0;
  if (hi < lo) hi = lo;
  if (!probe(hi)) {
    throw GuardError("no transition point in the case-2 search range");
  }

  // Smallest t in [lo, hi] whose optimum drops below 1/3; the optimum is
  // nonincreasing in t, so plain bisection applies.
  std::int64_t found = hi;
  if (probe(lo)) {
    found = lo;
  } else {
    std::int64_t bad = lo;  // probe false
    std::int64_t good = hi;
    while (good - bad > 1) {
      std::int64_t mid = bad + (good - bad) / 2;
      if (probe(mid)) {
        good = mid;
      } else {
        bad = mid;
      }
    }
    found = good;
  }

  double last = std::numeric_limits<double>::infinity();
  for (const auto& [t, opt] : probed) {
    if (opt > last + 1e-9) {
      throw std::logic_error("case-2 probe objective is not nonincreasing");
    }
    last = std::min(last, opt);
  }

  auto final_sol = solve_config_ip(
      model, [found](double x) { return survival(x, found + 1); });
  result.machine_configs = expand_solution(model, final_sol);
  result.opt = final_sol.objective;
  result.t2 = found;
  return result;
}

CaseSolve solve_case4(const RoundedInstance& rounded, std::int64_t m1,
                      std::int64_t t4) {
  if (t4 < 1) throw std::invalid_argument("case 4 needs t4 >= 1");
  auto model = make_config_model(rounded.groups, m1, 4.0 * rounded.mu);
  auto sol = solve_config_ip(
      model, [t4](double x) { return -log_cdf(x, t4 - 1); });
  CaseSolve result;
  result.machine_configs = expand_solution(model, sol);
  result.opt = sol.objective;
  result.config_count = static_cast<std::int64_t>(model.configs.size());
  return result;
}

CaseSolve solve_case5(const RoundedInstance& rounded, std::int64_t m1) {
  auto model = make_config_model(rounded.groups, m1, 4.0 * rounded.mu);
  // -ln P[Poi(x) = 0] = x: the objective is the conserved total load, so
  // any feasible solution of the program is optimal.
  auto sol = solve_config_ip(model, [](double x) { return x; });
  CaseSolve result;
  result.machine_configs = expand_solution(model, sol);
  result.opt = sol.objective;
  result.config_count = static_cast<std::int64_t>(model.configs.size());
  return result;
}

}  // namespace detail

namespace {

struct Pipeline {
  PeelResult peel;
  double delta = 0.0;
  RoundedInstance rounded;
  CaseLabel label;
  bool trivial_zero = false;  // remaining jobs exist but carry no load
};

Pipeline classify_pipeline(const JobInstance& instance, double epsilon) {
  if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
    throw std::invalid_argument("epsilon must lie in (0, 1)");
  }
  instance.validate();

  Pipeline p;
  p.peel = peel_big_jobs(instance);
  p.delta = epsilon / 1000.0;
  p.label = CaseLabel{CaseTag::AllPeeled, p.peel.mu, p.peel.m1, p.delta};
  if (p.peel.remaining_indices.empty()) return p;

  if (p.peel.mu == 0.0) {
    p.trivial_zero = true;
    p.label = classify(0.0, p.peel.m1, p.delta);
    return p;
  }
  p.rounded = round_instance(p.peel.remaining_sizes, p.peel.mu, p.delta);
  p.label = classify(p.peel.mu, p.peel.m1, p.delta);
  return p;
}

void fill_report(RunReport& report, const Pipeline& p,
                 const JobInstance& instance) {
  report.branch = p.label.tag;
  report.mu = p.peel.mu;
  report.m1 = p.peel.m1;
  report.big_count = static_cast<std::int64_t>(p.peel.big_indices.size());
  report.delta = p.delta;
  if (p.label.tag == CaseTag::Case4 && p.peel.m1 >= 3) {
    report.transition_kind = "t4";
    report.transition_value =
        static_cast<double>(t4_of(p.peel.m1, p.peel.mu));
  } else if (p.label.tag == CaseTag::Case2) {
    report.transition_kind = "t2";
  }
  (void)instance;
}

}  // namespace

Assignment ptas_solve(const JobInstance& instance, double epsilon,
                      RunReport* report) {
  Pipeline p = classify_pipeline(instance, epsilon);
  RunReport local;
  RunReport& rep = report != nullptr ? *report : local;
  rep = RunReport{};
  fill_report(rep, p, instance);

  const std::size_t n = instance.sizes.size();
  const std::int64_t m1 = p.peel.m1;
  std::vector<std::int32_t> mapping(n, -1);
  for (std::size_t b = 0; b < p.peel.big_indices.size(); ++b) {
    mapping[p.peel.big_indices[b]] =
        static_cast<std::int32_t>(m1 + static_cast<std::int64_t>(b));
  }

  const auto& rem = p.peel.remaining_indices;
  if (!rem.empty()) {
    if (p.trivial_zero) {
      for (std::size_t idx : rem) mapping[idx] = 0;
    } else {
      switch (p.label.tag) {
        case CaseTag::Case1:
        case CaseTag::Case3: {
          // Deterministic scheduling on the un-rounded remaining sizes.
          Assignment det =
              det_schedule(p.peel.remaining_sizes, m1, epsilon / 5.0);
          for (std::size_t i = 0; i < rem.size(); ++i) {
            mapping[rem[i]] = det.machine_of[i];
          }
          break;
        }
        case CaseTag::Case2:
        case CaseTag::Case4:
        case CaseTag::Case5: {
          detail::CaseSolve cs;
          if (p.label.tag == CaseTag::Case2) {
            cs = detail::solve_case2(p.rounded, m1);
            rep.transition_kind = "t2";
            rep.transition_value = static_cast<double>(cs.t2);
          } else if (p.label.tag == CaseTag::Case4) {
            std::int64_t t4 = t4_of(m1, p.peel.mu);
            if (t4 < 2 || static_cast<double>(t4) > 1.0 / p.delta + 1.0) {
              throw std::logic_error("t4 outside its guaranteed range");
            }
            cs = detail::solve_case4(p.rounded, m1, t4);
          } else {
            cs = detail::solve_case5(p.rounded, m1);
          }
          rep.ip_probes = cs.probes;
          rep.config_count = cs.config_count;
          Assignment small = unround_assignment(
              p.rounded, cs.machine_configs, p.peel.remaining_sizes);
          for (std::size_t i = 0; i < rem.size(); ++i) {
            mapping[rem[i]] = small.machine_of[i];
          }
          break;
        }
        case CaseTag::Dp: {
          DpParams params = DpParams::make(p.peel.big_sizes,
                                           p.peel.remaining_sizes,
                                           instance.machines, epsilon);
          Assignment merged = run_dp(params);
          for (std::size_t i = 0; i < rem.size(); ++i) {
            mapping[rem[i]] = merged.machine_of[i];
          }
          break;
        }
        case CaseTag::AllPeeled:
          throw std::logic_error("remaining jobs under an all-peeled label");
      }
    }
  }

  rep.solved = true;
  return make_assignment(instance.sizes, instance.machines,
                         std::move(mapping));
}

RunReport describe_run(const JobInstance& instance, double epsilon) {
  Pipeline p = classify_pipeline(instance, epsilon);
  RunReport report;
  fill_report(report, p, instance);
  return report;
}

}  // namespace poisbal
