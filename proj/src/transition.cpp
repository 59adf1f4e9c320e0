#include "poisbal/transition.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace poisbal {

namespace {

constexpr double kLn2 = std::numbers::ln2;

// log in the threshold base (natural by default, see kThresholdLogBase).
double case_log(double x) {
  if (kThresholdLogBase == std::numbers::e) return std::log(x);
  return std::log(x) / std::log(kThresholdLogBase);
}

// Sum_j P[Poi(mu_j) >= t] over a grouped load multiset.
double survival_sum(std::span<const LoadGroup> groups, std::int64_t t) {
  double s = 0.0;
  for (const auto& g : groups) {
    s += static_cast<double>(g.count) * survival(g.rate, t);
  }
  return s;
}

}  // namespace

std::string to_string(CaseTag tag) {
  switch (tag) {
    case CaseTag::AllPeeled: return "all-peeled";
    case CaseTag::Case1: return "case1";
    case CaseTag::Case2: return "case2";
    case CaseTag::Case3: return "case3";
    case CaseTag::Case4: return "case4";
    case CaseTag::Case5: return "case5";
    case CaseTag::Dp: return "dp";
  }
  return "unknown";
}

CaseLabel classify(double mu, std::int64_t m1, double delta) {
  if (!(delta > 0.0) || delta > 0.1) {
    throw std::invalid_argument("classify needs delta in (0, 1/10]");
  }
  if (m1 < 1) throw std::invalid_argument("classify needs m1 >= 1");
  if (!std::isfinite(mu) || mu < 0.0) {
    throw std::invalid_argument("classify needs mu >= 0");
  }

  const double lm = case_log(static_cast<double>(m1));  // >= 0
  const double llm = lm > 0.0 ? case_log(lm) : -1e300;  // log log m1
  const double lmu = mu > 0.0 ? case_log(mu) : -1e300;

  const double l2 = case_log(2.0);
  CaseLabel label{CaseTag::Dp, mu, m1, delta};

  // mu > (6/delta^2) log m1
  if (mu > (6.0 / (delta * delta)) * lm) {
    label.tag = CaseTag::Case1;
    return label;
  }
  // m1^(-delta) < mu <= (1/2^(1/delta+1)) log m1, m1 >= 2^((2/d) log(2/d))
  if (mu > 0.0 && lmu > -delta * lm &&
      lmu <= (lm > 0.0 ? case_log(lm) : -1e300) - (1.0 / delta + 1.0) * l2 &&
      lm >= (2.0 / delta) * case_log(2.0 / delta) * l2) {
    label.tag = CaseTag::Case3;
    return label;
  }
  // (1/2^(1/delta+1)) log m1 < mu <= (6/delta^2) log m1, m1 >= 2^(2^(2/d))
  if (mu > 0.0 && lmu > llm - (1.0 / delta + 1.0) * l2 &&
      mu <= (6.0 / (delta * delta)) * lm &&
      llm >= (2.0 / delta) * l2 + case_log(l2)) {
    label.tag = CaseTag::Case2;
    return label;
  }
  // 4 log m1 / m1 < mu <= m1^(-delta), m1 >= 2^(100/delta^2)
  if (mu > 4.0 * lm / static_cast<double>(m1) && mu > 0.0 &&
      lmu <= -delta * lm && lm >= (100.0 / (delta * delta)) * l2) {
    label.tag = CaseTag::Case4;
    return label;
  }
  // mu <= 4 log m1 / m1, m1 >= 1000 (1/delta) log^2(1/delta)
  {
    double li = case_log(1.0 / delta);
    if (mu <= 4.0 * lm / static_cast<double>(m1) &&
        static_cast<double>(m1) >= 1000.0 * (1.0 / delta) * li * li) {
      label.tag = CaseTag::Case5;
      return label;
    }
  }
  return label;
}

std::int64_t t2_of(std::span<const LoadGroup> groups) {
  if (groups.empty()) throw std::invalid_argument("t2 of no loads");
  bool all_zero = true;
  for (const auto& g : groups) {
    if (g.rate > 0.0) all_zero = false;
  }
  if (all_zero) return 0;

  auto holds = [&](std::int64_t t) { return survival_sum(groups, t) >= 1.0 / 3.0; };

  // holds(0) is always true; find a failing upper end, then bisect.
  std::int64_t lo = 0;
  std::int64_t hi = 1;
  while (holds(hi)) {
    lo = hi;
    hi *= 2;
  }
  while (hi - lo > 1) {
    std::int64_t mid = lo + (hi - lo) / 2;
    if (holds(mid)) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  if (!holds(lo) || holds(lo + 1)) {
    throw std::logic_error("t2 search lost the predicate boundary");
  }
  return lo;
}

std::int64_t t2_of(std::span<const double> loads) {
  auto groups = group_loads(loads);
  return t2_of(std::span<const LoadGroup>(groups));
}

namespace {

double log_over_loglog(double log_m, double offset, double mu,
                       std::int64_t m_for_msg) {
  if (!(mu > 0.0)) throw std::invalid_argument("transition point needs mu > 0");
  if (m_for_msg < 3) throw std::invalid_argument("transition point needs m >= 3");
  double denom = offset - case_log(mu) + case_log(log_m);
  if (!(denom > 0.0)) {
    throw std::invalid_argument("transition point denominator must be positive");
  }
  return log_m / denom;
}

}  // namespace

double t3_of(std::int64_t m, double mu) {
  return log_over_loglog(case_log(static_cast<double>(m)), 0.0, mu, m);
}

double t3_from_log_m(double log_m, double mu) {
  if (!(log_m > 1.0)) throw std::invalid_argument("t3 needs log m > 1");
  return log_over_loglog(log_m, 0.0, mu, 3);
}

double t3_identity_form(std::int64_t m, double mu) {
  if (!(mu > 0.0) || m < 3) throw std::invalid_argument("bad t3 arguments");
  double big = case_log(static_cast<double>(m)) / mu;  // log of m^(1/mu)
  if (!(case_log(big) > 0.0)) {
    throw std::invalid_argument("transition point denominator must be positive");
  }
  return mu * big / case_log(big);
}

double gamma4_of(std::int64_t m, double mu) {
  return log_over_loglog(case_log(static_cast<double>(m)), case_log(4.0), mu,
                         m);
}

double gamma4_from_log_m(double log_m, double mu) {
  if (!(log_m > 1.0)) throw std::invalid_argument("gamma4 needs log m > 1");
  return log_over_loglog(log_m, case_log(4.0), mu, 3);
}

std::int64_t t4_of(std::int64_t m, double mu) {
  return static_cast<std::int64_t>(std::ceil(gamma4_of(m, mu)));
}

DiscreteDist bernoulli_w_case4(std::span<const LoadGroup> groups,
                               std::int64_t t4) {
  if (t4 < 1) throw std::invalid_argument("t4 must be >= 1");
  double log_p = 0.0;
  for (const auto& g : groups) {
    log_p += static_cast<double>(g.count) * log_cdf(g.rate, t4 - 1);
  }
  double p = std::exp(log_p);
  return DiscreteDist{t4 - 1, {p, 1.0 - p}};
}

DiscreteDist bernoulli_w_case4(std::span<const double> loads, std::int64_t t4) {
  auto groups = group_loads(loads);
  return bernoulli_w_case4(std::span<const LoadGroup>(groups), t4);
}

DiscreteDist bernoulli_w_case5(std::span<const LoadGroup> groups) {
  double total = 0.0;
  for (const auto& g : groups) total += static_cast<double>(g.count) * g.rate;
  double p1 = -std::expm1(-total);
  return DiscreteDist{0, {1.0 - p1, p1}};
}

DiscreteDist bernoulli_w_case5(std::span<const double> loads) {
  auto groups = group_loads(loads);
  return bernoulli_w_case5(std::span<const LoadGroup>(groups));
}

}  // namespace poisbal
