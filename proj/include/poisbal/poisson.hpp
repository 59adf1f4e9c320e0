#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

namespace poisbal {

// A multiset of Poisson rates given as (value, multiplicity) pairs. Large
// collections of machines routinely share a handful of distinct loads, so
// every aggregate below accepts this grouped form as well as a flat span.
struct LoadGroup {
  double rate = 0.0;
  std::int64_t count = 1;
};

std::vector<LoadGroup> group_loads(std::span<const double> loads);

// ln P[Poi(rate) = k], computed in log space via log-gamma.
// Returns -inf for rate == 0, k > 0. Rejects negative rate or k.
double log_pmf(double rate, std::int64_t k);

// P[Poi(rate) <= k]; 0 for k < 0. The sum is taken over whichever tail is
// smaller and complemented otherwise, so neither side loses digits to
// cancellation.
double cdf(double rate, std::int64_t k);

// P[Poi(rate) >= k]; 1 for k <= 0.
double survival(double rate, std::int64_t k);

// ln P[Poi(rate) <= k], accurate both near 0 and deep in the lower tail.
double log_cdf(double rate, std::int64_t k);

// P[Poi(mu) >= mu + x] <= exp(-x^2 / (2 (mu + x))), for x > 0.
double poisson_upper_tail_bound(double mu, double x);

// Precomputed ln P[Poi(rate) <= k] for k in [0, kmax]. The lower half of the
// table accumulates the cdf upward, the upper half accumulates the survival
// downward (with a geometric cap on the mass beyond the table), so both ends
// keep full relative precision. Queries above kmax return 0.
class PoissonCdfTable {
 public:
  PoissonCdfTable(double rate, std::int64_t kmax);
  double log_cdf(std::int64_t k) const;
  double rate() const { return rate_; }
  std::int64_t kmax() const { return kmax_; }

 private:
  double rate_;
  std::int64_t kmax_;
  std::vector<double> logcdf_;
};

// P[max_j Poi(mu_j) <= k], as exp of the compensated sum of log-CDFs.
// An empty collection is the deterministic value 0.
double max_cdf(std::span<const double> loads, std::int64_t k);
double max_cdf(std::span<const LoadGroup> groups, std::int64_t k);

// E[max_j Poi(mu_j)] = sum_{k>=1} P[max >= k], truncated once a
// Chernoff/geometric-series certificate puts the neglected tail below
// tail_tol * (1 + result). Deterministic for fixed inputs.
double expected_max(std::span<const double> loads, double tail_tol = 1e-9);
double expected_max(std::span<const LoadGroup> groups, double tail_tol = 1e-9);

// Finite distribution on {offset, offset+1, ..., offset + probs.size() - 1}.
struct DiscreteDist {
  std::int64_t support_offset = 0;
  std::vector<double> probabilities;

  static DiscreteDist point_mass(std::int64_t x);

  // Probabilities must be finite, nonnegative, and sum to 1 within 1e-9.
  void validate() const;

  double prob_at(std::int64_t x) const;
  double mean() const;
  std::int64_t support_end() const;  // last point of the support
};

// P[max_j Poi(mu_j) = k] for k = 0..kmax, as consecutive max-CDF
// differences. No folding: the mass beyond kmax is simply absent.
std::vector<double> max_pmf_table(std::span<const LoadGroup> groups,
                                  std::int64_t kmax);

// Distribution of max_j Poi(mu_j) truncated to [0, max_support]; upper-tail
// mass beyond the truncation point is folded into the last bin so the result
// remains a probability distribution.
DiscreteDist max_distribution(std::span<const double> loads,
                              std::int64_t max_support);
DiscreteDist max_distribution(std::span<const LoadGroup> groups,
                              std::int64_t max_support);

// T[y] = P[max_j Poi(mu_j) >= y] for y = 1..u (T[0] unused).
std::vector<double> max_survival_table(std::span<const LoadGroup> groups,
                                       std::int64_t u);

// sum_{x=0}^{u-1} P[extra = x] (x + sum_{y=x+1}^{u} P[max_j Poi(mu_j) >= y]).
// Mass of `extra` at or beyond u is ignored here; callers needing the full
// truncated expectation add sum_{x>=u} P[extra = x] x themselves, which does
// not depend on the loads.
double mixed_expected_max(const DiscreteDist& extra,
                          std::span<const double> loads, std::int64_t u);
double mixed_expected_max(const DiscreteDist& extra,
                          std::span<const LoadGroup> groups, std::int64_t u);

// Exact Poisson sampling: sequential-search inversion for rate <= 30,
// transformed rejection (PTRS) above. Reproducible for a fixed seed.
std::int64_t sample_poisson(double rate, std::mt19937_64& rng);
std::int64_t sample_max(std::span<const double> loads, std::mt19937_64& rng);

}  // namespace poisbal
