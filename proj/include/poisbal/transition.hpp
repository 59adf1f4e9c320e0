#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "poisbal/poisson.hpp"

namespace poisbal {

// Base of the "log" appearing in case thresholds and transition points.
// The concentration arguments behind the thresholds are Chernoff-style, so
// the natural log is the consistent choice; everything below reads it from
// this one constant.
inline constexpr double kThresholdLogBase = 2.718281828459045;

enum class CaseTag { AllPeeled, Case1, Case2, Case3, Case4, Case5, Dp };

std::string to_string(CaseTag tag);

struct CaseLabel {
  CaseTag tag = CaseTag::Dp;
  double mu = 0.0;
  std::int64_t m1 = 0;
  double delta = 0.0;
};

// First dispatch branch whose guard holds, evaluated in listing order with
// natural-log thresholds. The doubly-exponential machine-count guards are
// compared in log-log space, so no intermediate quantity can overflow.
// Requires m1 >= 1, delta in (0, 1/10], mu >= 0.
CaseLabel classify(double mu, std::int64_t m1, double delta);

// Largest integer t with sum_j P[Poi(mu_j) >= t] >= 1/3; 0 for all-zero
// loads. Exponential-then-binary search over the nonincreasing predicate.
std::int64_t t2_of(std::span<const double> loads);
std::int64_t t2_of(std::span<const LoadGroup> groups);

// log m / (log(1/mu) + log log m), natural logs.
double t3_of(std::int64_t m, double mu);
// The same value via mu * log(m^(1/mu)) / log log(m^(1/mu)).
double t3_identity_form(std::int64_t m, double mu);
// Variant taking ln(m) directly.
double t3_from_log_m(double log_m, double mu);

// log m / (log(4/mu) + log log m), and its ceiling.
double gamma4_of(std::int64_t m, double mu);
std::int64_t t4_of(std::int64_t m, double mu);
// Variant taking ln(m) directly, for machine counts beyond any integer or
// double (e.g. m = 2^(100/delta^2)).
double gamma4_from_log_m(double log_m, double mu);

// Two-point variable on {t4-1, t4} with
// P[W = t4-1] = prod_j P[Poi(mu_j) <= t4-1], computed in log space.
DiscreteDist bernoulli_w_case4(std::span<const double> loads, std::int64_t t4);
DiscreteDist bernoulli_w_case4(std::span<const LoadGroup> groups,
                               std::int64_t t4);

// 0/1 variable with P[W = 1] = 1 - exp(-sum_j mu_j).
DiscreteDist bernoulli_w_case5(std::span<const double> loads);
DiscreteDist bernoulli_w_case5(std::span<const LoadGroup> groups);

}  // namespace poisbal
