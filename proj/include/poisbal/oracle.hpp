#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "poisbal/instance.hpp"
#include "poisbal/poisson.hpp"

namespace poisbal {

// Canonical assignment enumeration: machine blocks ordered by their smallest
// contained job index (restricted-growth strings), at most max_machines
// blocks. visit() receives the job -> block map.
void enumerate_canonical_assignments(
    std::size_t jobs, std::int64_t max_machines,
    const std::function<void(std::span<const std::int32_t>)>& visit);

struct BruteResult {
  Assignment assignment;
  double value = 0.0;
};

// Exhaustive optimum over assignments up to machine relabelling, each
// evaluated by the exact expected-max engine. Guarded to n <= 12, m <= 4.
BruteResult brute_force_opt(const JobInstance& instance,
                            double tail_tol = 1e-9);

struct MonteCarloResult {
  double estimate = 0.0;
  double std_error = 0.0;
};

// Mean of sample_max over `trials` draws, split across fixed per-worker
// streams so the result depends only on (loads, trials, seed).
MonteCarloResult monte_carlo_emax(std::span<const double> loads,
                                  std::int64_t trials, std::uint64_t seed);

// One CSV row of the verification harness.
struct LemmaReport {
  std::string lemma;
  std::string params;
  double lhs = 0.0;
  double rhs = 0.0;
  double ratio = 0.0;
  bool guard_ok = false;
  bool pass = false;
};

std::string lemma_report_csv(std::span<const LemmaReport> rows);

// Evaluate the concentration/scaling claims of the given case (1..5) on a
// concrete load profile, exactly. Rows carry whether the case's hypotheses
// hold at this (m, mu, delta); callers assert only guard-satisfied rows.
std::vector<LemmaReport> verify_case_lemma(int case_no,
                                           std::span<const LoadGroup> loads,
                                           double delta);

struct AppendixResult {
  double lambda = 0.0;
  double e_balanced = 0.0;   // (m+1)/2 machines with two jobs each
  double e_lopsided = 0.0;   // one machine with two jobs, the rest with one
  double gap = 0.0;          // e_balanced - e_lopsided
};

// m+1 identical jobs of rate beta*log(m-1) on m machines; compares the
// deterministically-balanced split against the lopsided one, exactly.
// m must be odd and >= 3. log_base defaults to natural log.
AppendixResult appendix_counterexample(std::int64_t m, double beta,
                                       double log_base = 2.718281828459045);

// Floor/ceil sandwich for the expected maximum of m i.i.d. Poi(lambda),
// for 1/m <= lambda <= log(m)/16. Like the other appendix quantities, the
// base of "log" is a parameter (natural by default).
LemmaReport proposition_a1_check(std::int64_t m, double lambda, double delta,
                                 double log_base = 2.718281828459045);

// Fixed verification batteries behind `verify --suite ...`. Rows with
// guard_ok set are assertions (their hypotheses are satisfiable at this
// scale); the rest are informational.
std::vector<LemmaReport> identity_battery();
std::vector<LemmaReport> lemma_battery();
std::vector<LemmaReport> appendix_battery();

}  // namespace poisbal
