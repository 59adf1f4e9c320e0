#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <random>
#include <vector>

#include "poisbal/poisson.hpp"

using namespace poisbal;

namespace {

// Independent oracle: direct tail summation of the pmf in extended
// precision, no shared code with the library path.
long double oracle_pmf(double lam, long long k) {
  if (lam == 0.0) return k == 0 ? 1.0L : 0.0L;
  return expl(-static_cast<long double>(lam) +
              static_cast<long double>(k) * logl(lam) -
              lgammal(static_cast<long double>(k) + 1.0L));
}

long double oracle_survival(double lam, long long k, long long top) {
  if (k <= 0) return 1.0L;
  long double s = 0.0L;
  for (long long j = top; j >= k; --j) s += oracle_pmf(lam, j);
  return s;
}

long double oracle_cdf(double lam, long long k) {
  if (k < 0) return 0.0L;
  long double s = 0.0L;
  for (long long j = 0; j <= k; ++j) s += oracle_pmf(lam, j);
  return s;
}

}  // namespace

TEST_CASE("log pmf values") {
  CHECK(log_pmf(0.0, 0) == 0.0);
  CHECK(log_pmf(1.0, 0) == doctest::Approx(-1.0).epsilon(1e-15));
  // -2.5 + 3 ln 2.5 - ln 6, frozen from an arbitrary-precision evaluation
  CHECK(log_pmf(2.5, 3) ==
        doctest::Approx(-1.5428872736055898).epsilon(1e-14));
  CHECK(std::isinf(log_pmf(0.0, 3)));
  CHECK(log_pmf(0.0, 3) < 0.0);
  CHECK_THROWS_AS(log_pmf(-1.0, 0), std::invalid_argument);
  CHECK_THROWS_AS(log_pmf(1.0, -1), std::invalid_argument);
}

TEST_CASE("cdf and survival basics") {
  CHECK(cdf(0.0, 0) == 1.0);
  CHECK(cdf(1.0, -1) == 0.0);
  CHECK(survival(1.0, 0) == 1.0);
  CHECK(survival(1.0, 1) ==
        doctest::Approx(1.0 - std::exp(-1.0)).epsilon(1e-14));
  // frozen: direct summation of pmf(1, k) for k >= 3
  CHECK(survival(1.0, 3) ==
        doctest::Approx(0.08030139707139420).epsilon(1e-13));
  CHECK_THROWS_AS(cdf(-0.5, 1), std::invalid_argument);

  for (double lam : {0.3, 2.0, 7.5, 40.0}) {
    for (long long k : {0LL, 1LL, 3LL, 10LL, 60LL}) {
      double got = survival(lam, k);
      double want = static_cast<double>(oracle_survival(lam, k, 400));
      CHECK(got == doctest::Approx(want).epsilon(1e-12));
    }
  }
}

TEST_CASE("cdf + survival identity on a grid") {
  for (double lam : {0.0, 0.5, 1.0, 3.0, 10.0, 100.0, 1000.0}) {
    for (long long k : {-1LL, 0LL, 1LL, 2LL, 5LL, 9LL, 50LL, 120LL, 1100LL}) {
      CHECK(cdf(lam, k) + survival(lam, k + 1) ==
            doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("pmf normalisation with certified truncation") {
  for (double lam : {0.1, 1.0, 10.0, 100.0}) {
    long long k = static_cast<long long>(std::ceil(2.0 * lam)) + 10;
    while (poisson_upper_tail_bound(lam, static_cast<double>(k + 1) - lam) >
           1e-12) {
      ++k;
    }
    double sum = 0.0;
    for (long long j = 0; j <= k; ++j) sum += std::exp(log_pmf(lam, j));
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
  }
}

TEST_CASE("upper tail bound dominates the true tail") {
  CHECK(poisson_upper_tail_bound(1.0, 1.0) ==
        doctest::Approx(std::exp(-0.25)).epsilon(1e-15));
  CHECK(poisson_upper_tail_bound(10.0, 10.0) ==
        doctest::Approx(std::exp(-2.5)).epsilon(1e-15));
  CHECK(survival(4.0, 12) <= poisson_upper_tail_bound(4.0, 8.0));
  for (double mu : {0.5, 2.0, 9.0, 33.0}) {
    for (double x : {1.0, 3.0, 10.0, 25.0}) {
      auto k = static_cast<long long>(std::ceil(mu + x));
      CHECK(survival(mu, k) <= poisson_upper_tail_bound(mu, x) * (1 + 1e-12));
    }
  }
  CHECK_THROWS_AS(poisson_upper_tail_bound(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("monotonicity and log-concavity of the cdf in the rate") {
  // P[Poi(mu) <= k] decreasing in mu; its log concave in mu.
  for (long long k : {0LL, 2LL, 6LL}) {
    double step = 0.25;
    std::vector<double> logs;
    for (double mu = step; mu <= 12.0; mu += step) {
      logs.push_back(log_cdf(mu, k));
    }
    for (std::size_t i = 1; i < logs.size(); ++i) {
      CHECK(logs[i] <= logs[i - 1] + 1e-12);
    }
    for (std::size_t i = 2; i < logs.size(); ++i) {
      double second = logs[i] - 2.0 * logs[i - 1] + logs[i - 2];
      CHECK(second <= 1e-12);
    }
  }
}

TEST_CASE("max cdf product form") {
  std::vector<double> zeros{0.0, 0.0, 0.0};
  CHECK(max_cdf(std::span<const double>(zeros), 0) == 1.0);
  std::vector<double> one{1.0};
  for (long long k : {0LL, 1LL, 4LL}) {
    CHECK(max_cdf(std::span<const double>(one), k) ==
          doctest::Approx(cdf(1.0, k)).epsilon(1e-14));
  }
  std::vector<double> two{1.0, 1.0};
  double direct = static_cast<double>(oracle_cdf(1.0, 2) * oracle_cdf(1.0, 2));
  CHECK(max_cdf(std::span<const double>(two), 2) ==
        doctest::Approx(direct).epsilon(1e-12));

  // monotone nondecreasing in k
  std::vector<double> loads{0.5, 2.0, 3.5};
  double prev = 0.0;
  for (long long k = -1; k < 30; ++k) {
    double cur = max_cdf(std::span<const double>(loads), k);
    CHECK(cur >= prev - 1e-15);
    prev = cur;
  }
}

TEST_CASE("expected max basics and frozen series values") {
  std::vector<double> zero{0.0};
  CHECK(expected_max(std::span<const double>(zero), 1e-9) == 0.0);
  for (double lam : {1.0, 10.0, 100.0}) {
    std::vector<double> single{lam};
    CHECK(expected_max(std::span<const double>(single), 1e-9) ==
          doctest::Approx(lam).epsilon(1e-8));
  }
  // frozen: sum_{k>=1} (1 - cdf(1,k-1)^2) summed directly
  std::vector<double> pair{1.0, 1.0};
  CHECK(expected_max(std::span<const double>(pair), 1e-9) ==
        doctest::Approx(1.5237776118026087).epsilon(1e-9));
  std::vector<double> empty;
  CHECK_THROWS_AS(expected_max(std::span<const double>(empty), 1e-9),
                  std::invalid_argument);
  CHECK_THROWS_AS(expected_max(std::span<const double>(pair), 0.0),
                  std::invalid_argument);
}

TEST_CASE("expected max agrees with the direct series oracle") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> rate(0.0, 12.0);
  std::uniform_int_distribution<int> count(1, 6);
  for (int trial = 0; trial < 25; ++trial) {
    std::vector<double> loads;
    int c = count(rng);
    for (int i = 0; i < c; ++i) loads.push_back(rate(rng));
    long double series = 0.0L;
    for (long long k = 1; k <= 400; ++k) {
      long double prod = 1.0L;
      for (double v : loads) prod *= oracle_cdf(v, k - 1);
      series += 1.0L - prod;
    }
    CHECK(expected_max(std::span<const double>(loads), 1e-10) ==
          doctest::Approx(static_cast<double>(series)).epsilon(1e-8));
  }
}

TEST_CASE("majorization: spreading loads increases the expected max") {
  // mu1 <= mu1' <= mu2' <= mu2 with equal sums
  for (double total : {2.0, 6.0, 14.0}) {
    for (double inner : {0.0, 0.2, 0.45}) {
      std::vector<double> wide{total * 0.05, total * 0.95};
      std::vector<double> narrow{total * (0.05 + inner),
                                 total * (0.95 - inner)};
      CHECK(expected_max(std::span<const double>(wide), 1e-10) >=
            expected_max(std::span<const double>(narrow), 1e-10) - 1e-9);
      // survival of the max dominates pointwise
      for (long long k = 0; k < 30; ++k) {
        CHECK(max_cdf(std::span<const double>(wide), k) <=
              max_cdf(std::span<const double>(narrow), k) + 1e-12);
      }
    }
  }
}

TEST_CASE("discrete distributions") {
  DiscreteDist pm = DiscreteDist::point_mass(5);
  pm.validate();
  CHECK(pm.mean() == 5.0);
  CHECK(pm.prob_at(5) == 1.0);
  CHECK(pm.prob_at(4) == 0.0);

  DiscreteDist bad{0, {0.5, 0.4}};
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);

  std::vector<double> loads{2.0, 1.0};
  DiscreteDist mx = max_distribution(std::span<const double>(loads), 60);
  mx.validate();
  CHECK(mx.prob_at(0) ==
        doctest::Approx(std::exp(-2.0) * std::exp(-1.0)).epsilon(1e-12));
}

TEST_CASE("mixed expected max") {
  std::vector<double> zero{0.0};
  CHECK(mixed_expected_max(DiscreteDist::point_mass(0),
                           std::span<const double>(zero), 1) == 0.0);
  CHECK(mixed_expected_max(DiscreteDist::point_mass(5),
                           std::span<const double>(zero), 10) == 5.0);
  CHECK_THROWS_AS(mixed_expected_max(DiscreteDist::point_mass(0),
                                     std::span<const double>(zero), 0),
                  std::invalid_argument);

  // max of Poi(3) as the extra part, cross-checked against the merged
  // collection
  std::vector<double> a{3.0};
  std::vector<double> b{1.0, 1.0};
  DiscreteDist x = max_distribution(std::span<const double>(a), 49);
  double split = mixed_expected_max(x, std::span<const double>(b), 50);
  // frozen: E[max{Poi(3), Poi(1), Poi(1)}] by direct series
  CHECK(split == doctest::Approx(3.2312015268862544).epsilon(1e-7));
  std::vector<double> merged{3.0, 1.0, 1.0};
  CHECK(split ==
        doctest::Approx(expected_max(std::span<const double>(merged), 1e-10))
            .epsilon(1e-6));
}

TEST_CASE("grouped and flat forms agree") {
  std::vector<double> flat{2.0, 2.0, 2.0, 0.7, 0.7};
  auto groups = group_loads(std::span<const double>(flat));
  CHECK(groups.size() == 2);
  CHECK(expected_max(std::span<const LoadGroup>(groups), 1e-10) ==
        doctest::Approx(expected_max(std::span<const double>(flat), 1e-10))
            .epsilon(1e-12));
  CHECK(max_cdf(std::span<const LoadGroup>(groups), 3) ==
        doctest::Approx(max_cdf(std::span<const double>(flat), 3))
            .epsilon(1e-12));
}

TEST_CASE("sampling: exactness against the analytic engine") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 100; ++i) CHECK(sample_poisson(0.0, rng) == 0);

  // law of large numbers at rate 5 (inversion path)
  {
    std::mt19937_64 r(1);
    const int n = 200000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      sum += static_cast<double>(sample_poisson(5.0, r));
    }
    double se = std::sqrt(5.0 / n);
    CHECK(std::abs(sum / n - 5.0) < 4.0 * se);
  }
  // tail frequency at rate 50 (rejection path) against survival()
  {
    std::mt19937_64 r(2);
    const int n = 200000;
    int hits = 0;
    for (int i = 0; i < n; ++i) {
      if (sample_poisson(50.0, r) >= 60) ++hits;
    }
    double p = survival(50.0, 60);
    double se = std::sqrt(p * (1 - p) / n);
    CHECK(std::abs(static_cast<double>(hits) / n - p) < 4.0 * se);
  }
  // reproducibility
  {
    std::mt19937_64 r1(9), r2(9);
    std::vector<double> loads{3.0, 40.0};
    for (int i = 0; i < 50; ++i) {
      CHECK(sample_max(std::span<const double>(loads), r1) ==
            sample_max(std::span<const double>(loads), r2));
    }
  }
}
