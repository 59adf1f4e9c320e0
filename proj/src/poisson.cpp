#include "poisbal/poisson.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>

namespace poisbal {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

void check_rate(double rate) {
  if (!std::isfinite(rate) || rate < 0.0) {
    throw std::invalid_argument("Poisson rate must be finite and >= 0");
  }
}

// Neumaier-compensated accumulator.
struct Kahan {
  double sum = 0.0;
  double comp = 0.0;
  void add(double v) {
    double t = sum + v;
    if (std::abs(sum) >= std::abs(v)) {
      comp += (sum - t) + v;
    } else {
      comp += (v - t) + sum;
    }
    sum = t;
  }
  double value() const { return sum + comp; }
};

// Direct lower-tail sum P[X <= k] via the pmf recurrence from 0.
double lower_sum(double rate, std::int64_t k) {
  if (k < 0) return 0.0;
  Kahan acc;
  double p = std::exp(-rate);
  acc.add(p);
  for (std::int64_t j = 1; j <= k; ++j) {
    p *= rate / static_cast<double>(j);
    acc.add(p);
  }
  return std::min(1.0, acc.value());
}

// Direct upper-tail sum P[X >= k], with a geometric bound closing off the
// remainder once the term ratio has dropped below 1/2.
double upper_sum(double rate, std::int64_t k) {
  if (k <= 0) return 1.0;
  double p = std::exp(log_pmf(rate, k));
  if (p == 0.0) return 0.0;
  Kahan acc;
  std::int64_t j = k;
  for (;;) {
    acc.add(p);
    double ratio = rate / static_cast<double>(j + 1);
    double next = p * ratio;
    if (static_cast<double>(j + 1) > 2.0 * rate && j >= k + 4 &&
        next <= (acc.value() + 1e-300) * 1e-17) {
      acc.add(next / (1.0 - ratio));
      break;
    }
    p = next;
    ++j;
    if (p == 0.0) break;  // underflowed terms contribute nothing further
  }
  return std::min(1.0, acc.value());
}

// ln P[X <= k] via log-sum-exp of the pmf; rescues the deep lower tail
// where linear-space summation underflows.
double log_lower_sum(double rate, std::int64_t k) {
  if (k < 0) return kNegInf;
  double peak = log_pmf(rate, k);  // terms grow toward k when k < rate
  Kahan acc;
  double lp = peak;
  for (std::int64_t j = k; j >= 0; --j) {
    acc.add(std::exp(lp - peak));
    lp -= std::log(rate) - std::log(static_cast<double>(j));
    if (lp - peak < -45.0) break;
  }
  return peak + std::log(acc.value());
}

}  // namespace

std::vector<LoadGroup> group_loads(std::span<const double> loads) {
  std::map<double, std::int64_t> tally;
  for (double v : loads) {
    check_rate(v);
    ++tally[v];
  }
  std::vector<LoadGroup> groups;
  groups.reserve(tally.size());
  for (const auto& [rate, count] : tally) groups.push_back({rate, count});
  return groups;
}

double log_pmf(double rate, std::int64_t k) {
  check_rate(rate);
  if (k < 0) throw std::invalid_argument("Poisson pmf needs k >= 0");
  if (rate == 0.0) return k == 0 ? 0.0 : kNegInf;
  return -rate + static_cast<double>(k) * std::log(rate) -
         std::lgamma(static_cast<double>(k) + 1.0);
}

double cdf(double rate, std::int64_t k) {
  check_rate(rate);
  if (k < 0) return 0.0;
  if (rate == 0.0) return 1.0;
  if (static_cast<double>(k) < rate) return lower_sum(rate, k);
  return 1.0 - upper_sum(rate, k + 1);
}

double survival(double rate, std::int64_t k) {
  check_rate(rate);
  if (k <= 0) return 1.0;
  if (rate == 0.0) return 0.0;
  if (static_cast<double>(k) > rate) return upper_sum(rate, k);
  return 1.0 - lower_sum(rate, k - 1);
}

double log_cdf(double rate, std::int64_t k) {
  check_rate(rate);
  if (k < 0) return kNegInf;
  if (rate == 0.0) return 0.0;
  if (static_cast<double>(k) >= rate) {
    double s = upper_sum(rate, k + 1);
    return std::log1p(-s);
  }
  double c = lower_sum(rate, k);
  if (c > 0.0) return std::log(c);
  return log_lower_sum(rate, k);
}

double poisson_upper_tail_bound(double mu, double x) {
  check_rate(mu);
  if (!std::isfinite(x) || x <= 0.0) {
    throw std::invalid_argument("tail bound needs x > 0");
  }
  return std::exp(-x * x / (2.0 * (mu + x)));
}

PoissonCdfTable::PoissonCdfTable(double rate, std::int64_t kmax)
    : rate_(rate), kmax_(kmax) {
  check_rate(rate_);
  if (kmax_ < 0) throw std::invalid_argument("table needs kmax >= 0");
  logcdf_.resize(static_cast<std::size_t>(kmax_) + 1, 0.0);
  if (rate_ == 0.0) return;

  std::int64_t top = std::max<std::int64_t>(
      kmax_, static_cast<std::int64_t>(std::ceil(2.0 * rate_)) + 20);

  // Ascending pass while cdf <= 1/2.
  Kahan cd;
  std::int64_t k = 0;
  for (; k <= kmax_; ++k) {
    cd.add(std::exp(log_pmf(rate_, k)));
    double c = cd.value();
    if (c > 0.5) break;
    logcdf_[static_cast<std::size_t>(k)] =
        c > 0.0 ? std::log(c) : log_lower_sum(rate_, k);
  }
  std::int64_t k_half = k;  // first index handled by the survival pass

  // Descending pass: survival(j) for j in (k_half, top+1], then the
  // remainder above `top` bounded by a geometric series (ratio <= 1/2).
  if (k_half <= kmax_) {
    double ratio = rate_ / static_cast<double>(top + 2);
    Kahan sv;
    sv.add(std::exp(log_pmf(rate_, top + 1)) / (1.0 - ratio));
    if (top <= kmax_) {
      logcdf_[static_cast<std::size_t>(top)] =
          std::log1p(-std::min(1.0, sv.value()));
    }
    for (std::int64_t j = top; j > k_half; --j) {
      sv.add(std::exp(log_pmf(rate_, j)));
      if (j - 1 <= kmax_) {
        logcdf_[static_cast<std::size_t>(j - 1)] =
            std::log1p(-std::min(1.0, sv.value()));
      }
    }
  }
}

double PoissonCdfTable::log_cdf(std::int64_t k) const {
  if (k < 0) return kNegInf;
  if (k > kmax_) return 0.0;
  return logcdf_[static_cast<std::size_t>(k)];
}

namespace {

struct GroupedTables {
  std::vector<PoissonCdfTable> tables;
  std::vector<std::int64_t> counts;

  GroupedTables(std::span<const LoadGroup> groups, std::int64_t kmax) {
    tables.reserve(groups.size());
    counts.reserve(groups.size());
    for (const auto& g : groups) {
      tables.emplace_back(g.rate, kmax);
      counts.push_back(g.count);
    }
  }

  // ln P[max <= k]
  double log_max_cdf(std::int64_t k) const {
    Kahan acc;
    for (std::size_t i = 0; i < tables.size(); ++i) {
      double lc = tables[i].log_cdf(k);
      if (lc == kNegInf) return kNegInf;
      acc.add(static_cast<double>(counts[i]) * lc);
    }
    return acc.value();
  }
};

void check_groups(std::span<const LoadGroup> groups) {
  for (const auto& g : groups) {
    check_rate(g.rate);
    if (g.count < 1) throw std::invalid_argument("load multiplicity must be >= 1");
  }
}

double max_rate_of(std::span<const LoadGroup> groups) {
  double mx = 0.0;
  for (const auto& g : groups) mx = std::max(mx, g.rate);
  return mx;
}

// Union bound + geometric series: the tail sum_{k > kmax} P[max >= k] is at
// most sum_j count_j * 2 * P[Poi(rate_j) >= kmax+1], and the survival factor
// is in turn capped by the Chernoff-style bound. Valid once kmax+1 exceeds
// twice every rate.
double certified_tail(std::span<const LoadGroup> groups, std::int64_t kmax) {
  Kahan acc;
  for (const auto& g : groups) {
    if (g.rate == 0.0) continue;
    double x = static_cast<double>(kmax + 1) - g.rate;
    acc.add(2.0 * static_cast<double>(g.count) *
            poisson_upper_tail_bound(g.rate, x));
  }
  return acc.value();
}

std::int64_t truncation_point(std::span<const LoadGroup> groups,
                              double tail_tol, double floor_value) {
  double mx = max_rate_of(groups);
  auto k = static_cast<std::int64_t>(
      std::ceil(std::max(mx + 10.0 * std::sqrt(mx) + 50.0, 2.0 * mx + 10.0)));
  while (certified_tail(groups, k) > tail_tol * (1.0 + floor_value)) {
    k = k + k / 4 + 32;
  }
  return k;
}

}  // namespace

double max_cdf(std::span<const LoadGroup> groups, std::int64_t k) {
  check_groups(groups);
  if (groups.empty()) return k >= 0 ? 1.0 : 0.0;
  if (k < 0) return 0.0;
  Kahan acc;
  for (const auto& g : groups) {
    double lc = log_cdf(g.rate, k);
    if (lc == kNegInf) return 0.0;
    acc.add(static_cast<double>(g.count) * lc);
  }
  return std::exp(acc.value());
}

double max_cdf(std::span<const double> loads, std::int64_t k) {
  auto groups = group_loads(loads);
  return max_cdf(std::span<const LoadGroup>(groups), k);
}

double expected_max(std::span<const LoadGroup> groups, double tail_tol) {
  check_groups(groups);
  if (groups.empty()) throw std::invalid_argument("expected_max of no loads");
  if (!(tail_tol > 0.0) || !(tail_tol < 1.0)) {
    throw std::invalid_argument("tail_tol must lie in (0, 1)");
  }
  double mx = max_rate_of(groups);
  if (mx == 0.0) return 0.0;

  // E[max] >= max_j E[Poi(mu_j)], so mx is a valid floor for the
  // relative-tolerance target.
  std::int64_t kmax = truncation_point(groups, tail_tol, mx);
  GroupedTables tables(groups, kmax);

  Kahan total;
  for (std::int64_t k = 1; k <= kmax; ++k) {
    double ls = tables.log_max_cdf(k - 1);
    double term = -std::expm1(ls);  // P[max >= k]
    if (term <= 0.0) break;         // nonincreasing in k
    total.add(term);
  }
  return total.value();
}

double expected_max(std::span<const double> loads, double tail_tol) {
  auto groups = group_loads(loads);
  return expected_max(std::span<const LoadGroup>(groups), tail_tol);
}

DiscreteDist DiscreteDist::point_mass(std::int64_t x) {
  return DiscreteDist{x, {1.0}};
}

void DiscreteDist::validate() const {
  if (probabilities.empty()) {
    throw std::invalid_argument("empty discrete distribution");
  }
  Kahan acc;
  for (double p : probabilities) {
    if (!std::isfinite(p) || p < 0.0) {
      throw std::invalid_argument("probabilities must be finite and >= 0");
    }
    acc.add(p);
  }
  if (std::abs(acc.value() - 1.0) > 1e-9) {
    throw std::invalid_argument("probabilities must sum to 1 within 1e-9");
  }
}

double DiscreteDist::prob_at(std::int64_t x) const {
  std::int64_t idx = x - support_offset;
  if (idx < 0 || idx >= static_cast<std::int64_t>(probabilities.size())) {
    return 0.0;
  }
  return probabilities[static_cast<std::size_t>(idx)];
}

double DiscreteDist::mean() const {
  Kahan acc;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    acc.add(probabilities[i] *
            static_cast<double>(support_offset + static_cast<std::int64_t>(i)));
  }
  return acc.value();
}

std::int64_t DiscreteDist::support_end() const {
  return support_offset + static_cast<std::int64_t>(probabilities.size()) - 1;
}

std::vector<double> max_pmf_table(std::span<const LoadGroup> groups,
                                  std::int64_t kmax) {
  check_groups(groups);
  if (kmax < 0) throw std::invalid_argument("kmax must be >= 0");
  std::vector<double> pmf(static_cast<std::size_t>(kmax) + 1, 0.0);
  if (groups.empty()) {
    pmf[0] = 1.0;  // max over an empty collection is the constant 0
    return pmf;
  }
  GroupedTables tables(groups, kmax);
  double prev = 0.0;
  for (std::int64_t k = 0; k <= kmax; ++k) {
    double cur = std::exp(tables.log_max_cdf(k));
    pmf[static_cast<std::size_t>(k)] = std::max(0.0, cur - prev);
    prev = cur;
  }
  return pmf;
}

DiscreteDist max_distribution(std::span<const LoadGroup> groups,
                              std::int64_t max_support) {
  check_groups(groups);
  if (max_support < 0) throw std::invalid_argument("max_support must be >= 0");
  if (groups.empty()) return DiscreteDist::point_mass(0);

  std::int64_t kmax =
      std::min(max_support, truncation_point(groups, 1e-15, 0.0));
  DiscreteDist dist;
  dist.support_offset = 0;
  dist.probabilities = max_pmf_table(groups, kmax);
  // Fold whatever mass lies beyond the truncation point into the last bin.
  Kahan acc;
  for (double p : dist.probabilities) acc.add(p);
  dist.probabilities.back() += std::max(0.0, 1.0 - acc.value());
  return dist;
}

DiscreteDist max_distribution(std::span<const double> loads,
                              std::int64_t max_support) {
  auto groups = group_loads(loads);
  return max_distribution(std::span<const LoadGroup>(groups), max_support);
}

std::vector<double> max_survival_table(std::span<const LoadGroup> groups,
                                       std::int64_t u) {
  check_groups(groups);
  if (u < 0) throw std::invalid_argument("u must be >= 0");
  std::vector<double> table(static_cast<std::size_t>(u) + 1, 0.0);
  if (groups.empty()) return table;

  GroupedTables tables(groups, u);
  for (std::int64_t y = 1; y <= u; ++y) {
    double term = -std::expm1(tables.log_max_cdf(y - 1));
    if (term <= 0.0) break;  // nonincreasing; the rest stays 0
    table[static_cast<std::size_t>(y)] = term;
  }
  return table;
}

double mixed_expected_max(const DiscreteDist& extra,
                          std::span<const LoadGroup> groups, std::int64_t u) {
  if (u < 1) throw std::invalid_argument("mixed_expected_max needs u >= 1");
  if (extra.support_offset < 0) {
    throw std::invalid_argument("extra distribution must live on [0, inf)");
  }
  extra.validate();
  check_groups(groups);

  std::vector<double> tail = max_survival_table(groups, u);

  // suffix[x] = sum_{y=x+1}^{u} P[max >= y]
  std::vector<double> suffix(static_cast<std::size_t>(u) + 1, 0.0);
  {
    Kahan acc;
    for (std::int64_t x = u - 1; x >= 0; --x) {
      acc.add(tail[static_cast<std::size_t>(x + 1)]);
      suffix[static_cast<std::size_t>(x)] = acc.value();
    }
  }

  Kahan total;
  std::int64_t hi = std::min<std::int64_t>(u - 1, extra.support_end());
  for (std::int64_t x = extra.support_offset; x <= hi; ++x) {
    double p = extra.prob_at(x);
    if (p == 0.0) continue;
    total.add(p * (static_cast<double>(x) + suffix[static_cast<std::size_t>(x)]));
  }
  return total.value();
}

double mixed_expected_max(const DiscreteDist& extra,
                          std::span<const double> loads, std::int64_t u) {
  auto groups = group_loads(loads);
  return mixed_expected_max(extra, std::span<const LoadGroup>(groups), u);
}

namespace {

std::int64_t sample_poisson_inversion(double rate, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  double u = unif(rng);
  std::int64_t k = 0;
  double p = std::exp(-rate);
  double c = p;
  while (u > c) {
    ++k;
    p *= rate / static_cast<double>(k);
    c += p;
    if (p == 0.0) break;  // numerically exhausted tail
  }
  return k;
}

// Hormann's PTRS transformed-rejection sampler; exact acceptance test via
// the log pmf.
std::int64_t sample_poisson_ptrs(double rate, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double b = 0.931 + 2.53 * std::sqrt(rate);
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_rate = std::log(rate);
  for (;;) {
    double u = unif(rng) - 0.5;
    double v = unif(rng);
    double us = 0.5 - std::abs(u);
    auto k = static_cast<std::int64_t>(
        std::floor((2.0 * a / us + b) * u + rate + 0.43));
    if (us >= 0.07 && v <= v_r) return k;
    if (k < 0 || (us < 0.013 && v > us)) continue;
    double lhs = std::log(v * inv_alpha / (a / (us * us) + b));
    double rhs = -rate + static_cast<double>(k) * log_rate -
                 std::lgamma(static_cast<double>(k) + 1.0);
    if (lhs <= rhs) return k;
  }
}

}  // namespace

std::int64_t sample_poisson(double rate, std::mt19937_64& rng) {
  check_rate(rate);
  if (rate == 0.0) return 0;
  if (rate <= 30.0) return sample_poisson_inversion(rate, rng);
  return sample_poisson_ptrs(rate, rng);
}

std::int64_t sample_max(std::span<const double> loads, std::mt19937_64& rng) {
  std::int64_t mx = 0;
  for (double rate : loads) mx = std::max(mx, sample_poisson(rate, rng));
  return mx;
}

}  // namespace poisbal
