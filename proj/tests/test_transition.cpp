#include <doctest.h>

#include <stdexcept>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "poisbal/poisson.hpp"
#include "poisbal/transition.hpp"

using namespace poisbal;

TEST_CASE("classify hand examples") {
  CHECK(classify(3000.0, 100, 0.1).tag == CaseTag::Case1);
  CHECK(classify(1e-4, 200000, 0.1).tag == CaseTag::Case5);
  CHECK(classify(1.0, 10, 0.1).tag == CaseTag::Dp);
  CHECK_THROWS_AS(classify(1.0, 10, 0.2), std::invalid_argument);
  CHECK_THROWS_AS(classify(1.0, 0, 0.1), std::invalid_argument);
}

TEST_CASE("classify is total and branch-order faithful") {
  // every (mu, m1) combination yields exactly one tag, and raising mu into
  // the first guard always wins over later ones
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> logmu(-12.0, 9.0);
  std::uniform_int_distribution<std::int64_t> m1(1, 3000000);
  for (int i = 0; i < 2000; ++i) {
    double mu = std::exp(logmu(rng));
    CaseLabel label = classify(mu, m1(rng), 0.1);
    CHECK(label.tag != CaseTag::AllPeeled);
    if (mu > 600.0 * std::log(static_cast<double>(label.m1))) {
      CHECK(label.tag == CaseTag::Case1);
    }
  }
  // case 5 requires the machine-count guard even at tiny mu
  CHECK(classify(1e-9, 100, 0.1).tag == CaseTag::Dp);
}

TEST_CASE("t2 examples and maximality") {
  std::vector<double> ten(10, 1.0);
  CHECK(t2_of(std::span<const double>(ten)) == 3);

  std::vector<double> zeros{0.0, 0.0};
  CHECK(t2_of(std::span<const double>(zeros)) == 0);

  for (double mu1 : {400.0, 1000.0, 5000.0}) {
    std::vector<double> single{mu1};
    CHECK(static_cast<double>(t2_of(std::span<const double>(single))) >= mu1);
  }

  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> rate(0.0, 30.0);
  std::uniform_int_distribution<int> count(1, 12);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<double> loads;
    int c = count(rng);
    bool nonzero = false;
    for (int i = 0; i < c; ++i) {
      loads.push_back(rate(rng));
      if (loads.back() > 0.0) nonzero = true;
    }
    if (!nonzero) loads.push_back(1.0);
    auto t2 = t2_of(std::span<const double>(loads));
    double at = 0.0;
    double after = 0.0;
    for (double v : loads) {
      at += survival(v, t2);
      after += survival(v, t2 + 1);
    }
    CHECK(at >= 1.0 / 3.0);
    CHECK(after < 1.0 / 3.0);

    // scaling all loads by (1 + delta) cannot decrease t2
    std::vector<double> up = loads;
    for (double& v : up) v *= 1.1;
    CHECK(t2_of(std::span<const double>(up)) >= t2);
  }
}

TEST_CASE("t3 closed forms") {
  constexpr double e = std::numbers::e;
  // ln m = e, mu = 1: t3 = e / (0 + 1)
  CHECK(t3_from_log_m(e, 1.0) == doctest::Approx(e).epsilon(1e-15));
  // frozen from an arbitrary-precision plug-in
  CHECK(t3_of(1000000, 0.01) ==
        doctest::Approx(1.9106047530075643).epsilon(1e-14));
  for (std::int64_t m : {100, 4096, 1000000}) {
    for (double mu : {0.003, 0.05, 0.9}) {
      CHECK(t3_of(m, mu) ==
            doctest::Approx(t3_identity_form(m, mu)).epsilon(1e-12));
    }
  }
  CHECK_THROWS_AS(t3_of(2, 0.5), std::invalid_argument);
  CHECK_THROWS_AS(t3_of(1000, 0.0), std::invalid_argument);
}

TEST_CASE("gamma4 and t4") {
  constexpr double e = std::numbers::e;
  // ln m = e, mu = 4: gamma4 = e / (ln 1 + ln e) = e, so t4 = ceil(e) = 3
  CHECK(gamma4_from_log_m(e, 4.0) == doctest::Approx(e).epsilon(1e-15));
  CHECK(static_cast<std::int64_t>(std::ceil(gamma4_from_log_m(e, 4.0))) == 3);
  // frozen from an arbitrary-precision plug-in at m = 1e6, mu = m^-0.3
  CHECK(gamma4_of(1000000, std::pow(1e6, -0.3)) ==
        doctest::Approx(1.6937540612316172).epsilon(1e-14));
  CHECK(t4_of(1000000, std::pow(1e6, -0.3)) == 2);

  // under the case-4 guard (reachable only via the log-m form):
  // 2 <= t4 <= 1/delta + 1, and gamma4 <= 1/delta
  for (double delta : {0.1, 0.05}) {
    double log_m = (100.0 / (delta * delta)) * std::numbers::ln2;
    for (double f : {1.5, 3.0, 10.0}) {
      double mu = std::exp(-delta * log_m) / f;  // below m^-delta
      if (!(mu > 0.0)) continue;
      double g4 = gamma4_from_log_m(log_m, mu);
      CHECK(g4 <= 1.0 / delta + 1e-9);
      auto t4 = static_cast<std::int64_t>(std::ceil(g4));
      CHECK(t4 >= 2);
      CHECK(static_cast<double>(t4) <= 1.0 / delta + 1.0 + 1e-9);
    }
  }
}

TEST_CASE("case-4 two-point variable") {
  std::vector<double> zeros{0.0, 0.0};
  DiscreteDist w = bernoulli_w_case4(std::span<const double>(zeros), 3);
  w.validate();
  CHECK(w.prob_at(2) == doctest::Approx(1.0));
  CHECK(w.prob_at(3) == doctest::Approx(0.0));

  std::vector<double> loads(1000, 0.01);
  DiscreteDist w2 = bernoulli_w_case4(std::span<const double>(loads), 2);
  double direct = std::pow(cdf(0.01, 1), 1000.0);
  CHECK(w2.prob_at(1) == doctest::Approx(direct).epsilon(1e-10));
  CHECK_THROWS_AS(bernoulli_w_case4(std::span<const double>(loads), 0),
                  std::invalid_argument);
}

TEST_CASE("case-5 zero-one variable") {
  std::vector<double> zeros{0.0, 0.0};
  DiscreteDist w0 = bernoulli_w_case5(std::span<const double>(zeros));
  CHECK(w0.prob_at(0) == doctest::Approx(1.0));

  std::vector<double> half{std::log(2.0) / 3.0, std::log(2.0) / 3.0,
                           std::log(2.0) / 3.0};
  DiscreteDist w = bernoulli_w_case5(std::span<const double>(half));
  CHECK(w.prob_at(1) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(w.mean() == doctest::Approx(0.5).epsilon(1e-14));
}
