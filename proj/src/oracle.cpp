#include "poisbal/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "poisbal/errors.hpp"
#include "poisbal/transition.hpp"

namespace poisbal {

namespace {

std::string fmt(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

void enumerate_canonical_assignments(
    std::size_t jobs, std::int64_t max_machines,
    const std::function<void(std::span<const std::int32_t>)>& visit) {
  if (jobs == 0) {
    std::vector<std::int32_t> empty;
    visit(empty);
    return;
  }
  std::vector<std::int32_t> label(jobs, 0);
  auto rec = [&](auto&& self, std::size_t i, std::int32_t used) -> void {
    if (i == jobs) {
      visit(label);
      return;
    }
    std::int32_t limit = std::min<std::int32_t>(
        used + 1, static_cast<std::int32_t>(max_machines));
    for (std::int32_t b = 0; b < limit; ++b) {
      label[i] = b;
      self(self, i + 1, std::max<std::int32_t>(used, b + 1));
    }
  };
  rec(rec, 0, 0);
}

BruteResult brute_force_opt(const JobInstance& instance, double tail_tol) {
  instance.validate();
  const std::size_t n = instance.sizes.size();
  if (n > 12 || instance.machines > 4) {
    throw GuardError("brute force is guarded to n <= 12, m <= 4");
  }
  if (n == 0) {
    return BruteResult{make_assignment(instance.sizes, instance.machines, {}),
                       0.0};
  }

  // Shared truncation point for every load that can arise (all loads are
  // bounded by the total size), so per-rate CDF tables are built once.
  double total = 0.0;
  for (double s : instance.sizes) total += s;
  auto kmax = static_cast<std::int64_t>(std::ceil(
      std::max(total + 10.0 * std::sqrt(total) + 50.0, 2.0 * total + 10.0)));
  while (total > 0.0 &&
         2.0 * static_cast<double>(instance.machines) *
                 poisson_upper_tail_bound(
                     total, static_cast<double>(kmax + 1) - total) >
             tail_tol) {
    kmax = kmax + kmax / 4 + 32;
  }

  std::map<double, PoissonCdfTable> tables;
  auto table_of = [&](double load) -> const PoissonCdfTable& {
    auto it = tables.find(load);
    if (it == tables.end()) {
      it = tables.emplace(load, PoissonCdfTable(load, kmax)).first;
    }
    return it->second;
  };

  auto evaluate = [&](const std::vector<double>& loads) {
    std::vector<const PoissonCdfTable*> t;
    t.reserve(loads.size());
    for (double v : loads) {
      if (v > 0.0) t.push_back(&table_of(v));
    }
    if (t.empty()) return 0.0;
    double sum = 0.0;
    for (std::int64_t k = 1; k <= kmax; ++k) {
      double ls = 0.0;
      for (const auto* tab : t) ls += tab->log_cdf(k - 1);
      double term = -std::expm1(ls);
      if (term <= 0.0) break;
      sum += term;
    }
    return sum;
  };

  std::map<std::vector<double>, double> value_memo;
  BruteResult best;
  bool have_best = false;

  enumerate_canonical_assignments(
      n, instance.machines, [&](std::span<const std::int32_t> mapping) {
        std::vector<double> loads(static_cast<std::size_t>(instance.machines),
                                  0.0);
        for (std::size_t i = 0; i < n; ++i) {
          loads[static_cast<std::size_t>(mapping[i])] += instance.sizes[i];
        }
        std::vector<double> key = loads;
        std::sort(key.begin(), key.end());
        auto it = value_memo.find(key);
        if (it == value_memo.end()) {
          it = value_memo.emplace(key, evaluate(key)).first;
        }
        if (!have_best || it->second < best.value) {
          have_best = true;
          best.value = it->second;
          best.assignment.machine_of.assign(mapping.begin(), mapping.end());
          best.assignment.loads = loads;
        }
      });

  return best;
}

MonteCarloResult monte_carlo_emax(std::span<const double> loads,
                                  std::int64_t trials, std::uint64_t seed) {
  if (trials < 1) throw std::invalid_argument("need trials >= 1");
  constexpr int kStreams = 16;

  struct StreamSums {
    double sum = 0.0;
    double sum_sq = 0.0;
  };
  std::vector<StreamSums> sums(kStreams);
  std::vector<double> sizes(loads.begin(), loads.end());

  auto run_stream = [&](int s) {
    std::int64_t count = trials / kStreams + (s < trials % kStreams ? 1 : 0);
    std::seed_seq seq{static_cast<std::uint64_t>(seed),
                      static_cast<std::uint64_t>(s) + 1};
    std::mt19937_64 rng(seq);
    double sum = 0.0;
    double sq = 0.0;
    for (std::int64_t t = 0; t < count; ++t) {
      auto v = static_cast<double>(
          sample_max(std::span<const double>(sizes), rng));
      sum += v;
      sq += v * v;
    }
    sums[static_cast<std::size_t>(s)] = {sum, sq};
  };

  unsigned workers = std::max(1u, std::min(static_cast<unsigned>(kStreams),
                                           std::thread::hardware_concurrency()));
  if (workers == 1 || trials < 10000) {
    for (int s = 0; s < kStreams; ++s) run_stream(s);
  } else {
    std::vector<std::thread> pool;
    std::int64_t next = 0;
    // Static stream partition keeps the result independent of thread count.
    for (unsigned w = 0; w < workers; ++w) {
      std::int64_t lo = next;
      std::int64_t hi = lo + kStreams / workers +
                        (w < kStreams % workers ? 1 : 0);
      next = hi;
      pool.emplace_back([&, lo, hi] {
        for (std::int64_t s = lo; s < hi; ++s) {
          run_stream(static_cast<int>(s));
        }
      });
    }
    for (auto& t : pool) t.join();
  }

  double sum = 0.0;
  double sq = 0.0;
  for (const auto& s : sums) {
    sum += s.sum;
    sq += s.sum_sq;
  }
  auto nd = static_cast<double>(trials);
  double mean = sum / nd;
  MonteCarloResult result{mean, 0.0};
  if (trials > 1) {
    double var = std::max(0.0, (sq - nd * mean * mean) / (nd - 1.0));
    result.std_error = std::sqrt(var / nd);
  }
  return result;
}

std::string lemma_report_csv(std::span<const LemmaReport> rows) {
  std::ostringstream out;
  out << "lemma,params,lhs,rhs,ratio,guard_ok,pass\n";
  for (const auto& r : rows) {
    out << r.lemma << ',' << r.params << ',' << fmt(r.lhs) << ','
        << fmt(r.rhs) << ',' << fmt(r.ratio) << ',' << (r.guard_ok ? 1 : 0)
        << ',' << (r.pass ? 1 : 0) << '\n';
  }
  return out.str();
}

namespace {

struct ProfileFacts {
  std::int64_t m = 0;
  double mu = 0.0;
  double mu1 = 0.0;
  double total = 0.0;
  bool spread_ok = true;  // all loads within [mu/4, 4 mu]
};

ProfileFacts facts_of(std::span<const LoadGroup> loads) {
  ProfileFacts f;
  for (const auto& g : loads) {
    f.m += g.count;
    f.total += static_cast<double>(g.count) * g.rate;
    f.mu1 = std::max(f.mu1, g.rate);
  }
  if (f.m == 0) throw std::invalid_argument("empty load profile");
  f.mu = f.total / static_cast<double>(f.m);
  for (const auto& g : loads) {
    if (g.rate < f.mu / 4.0 - 1e-15 || g.rate > 4.0 * f.mu + 1e-15) {
      f.spread_ok = false;
    }
  }
  return f;
}

std::vector<LoadGroup> scaled(std::span<const LoadGroup> loads,
                              double factor) {
  std::vector<LoadGroup> out(loads.begin(), loads.end());
  for (auto& g : out) g.rate *= factor;
  return out;
}

// sum_{k >= from} P[max >= k], summed until the terms die.
double tail_sum_from(std::span<const LoadGroup> loads, std::int64_t from) {
  double mx = 0.0;
  for (const auto& g : loads) mx = std::max(mx, g.rate);
  auto hi = static_cast<std::int64_t>(
      std::ceil(mx + 14.0 * std::sqrt(mx) + 80.0));
  std::vector<double> tail =
      max_survival_table(loads, std::max(from + 4, hi));
  double sum = 0.0;
  for (std::size_t y = static_cast<std::size_t>(std::max<std::int64_t>(from, 1));
       y < tail.size(); ++y) {
    sum += tail[y];
  }
  return sum;
}

std::string params_of(const ProfileFacts& f, double delta) {
  std::ostringstream out;
  out.precision(12);
  out << "m=" << f.m << ";mu=" << f.mu << ";mu1=" << f.mu1
      << ";delta=" << delta;
  return out.str();
}

LemmaReport row(const std::string& lemma, const std::string& params,
                double lhs, double rhs, bool guard_ok) {
  LemmaReport r;
  r.lemma = lemma;
  r.params = params;
  r.lhs = lhs;
  r.rhs = rhs;
  r.ratio = rhs != 0.0 ? lhs / rhs : 0.0;
  r.guard_ok = guard_ok;
  r.pass = lhs <= rhs * (1.0 + 1e-12) + 1e-12;
  return r;
}

}  // namespace

std::vector<LemmaReport> verify_case_lemma(int case_no,
                                           std::span<const LoadGroup> loads,
                                           double delta) {
  if (!(delta > 0.0) || delta > 0.1) {
    throw std::invalid_argument("delta must lie in (0, 1/10]");
  }
  ProfileFacts f = facts_of(loads);
  const std::string params = params_of(f, delta);
  const double lm = std::log(static_cast<double>(f.m));
  const double llm = lm > 0.0 ? std::log(lm) : -1e300;

  const double e_max = expected_max(loads);
  const double e_scaled = expected_max(
      std::vector<LoadGroup>(scaled(loads, 1.0 + delta)));

  std::vector<LemmaReport> rows;
  switch (case_no) {
    case 1: {
      bool guard = f.mu > (6.0 / (delta * delta)) * lm;
      rows.push_back(row("case1.lower", params, f.mu1, e_max, guard));
      rows.push_back(row("case1.upper", params, e_max,
                         (1.0 + 5.0 * delta) * f.mu1, guard));
      break;
    }
    case 2: {
      bool guard =
          f.mu > 0.0 &&
          std::log(f.mu) > llm - (1.0 / delta + 1.0) * std::log(2.0) &&
          f.mu <= (6.0 / (delta * delta)) * lm &&
          llm >= (2.0 / delta) * std::log(2.0) + std::log(std::log(2.0));
      auto t2 = t2_of(loads);
      auto t2d = static_cast<double>(t2);
      rows.push_back(
          row("case2.lower", params, (1.0 - 6.0 * delta) * t2d, e_max, guard));
      rows.push_back(
          row("case2.upper", params, e_max, (1.0 + 10.0 * delta) * t2d, guard));
      rows.push_back(row("case2.scaling", params, e_scaled,
                         (1.0 + 16.0 * delta) * e_max, guard));

      bool guard_lr = f.mu1 >= 6.0 * std::log(1.0 / delta) / (delta * delta);
      auto ell = static_cast<std::int64_t>(
          std::floor((1.0 - 4.0 * delta) * t2d));
      auto r = static_cast<std::int64_t>(
          std::ceil((1.0 + 8.0 * delta) * t2d));
      auto up = scaled(loads, 1.0 + delta);
      rows.push_back(row("case2.r_point", params,
                         1.0 - max_cdf(std::span<const LoadGroup>(up), r - 1),
                         delta * delta, guard_lr));
      rows.push_back(row("case2.r_tail", params,
                         tail_sum_from(up, r), delta, guard_lr));
      rows.push_back(row("case2.ell", params, 1.0 - delta,
                         1.0 - max_cdf(loads, ell - 1), guard_lr));
      break;
    }
    case 3: {
      bool guard =
          f.mu > 0.0 && std::log(f.mu) > -delta * lm &&
          std::log(f.mu) <= llm - (1.0 / delta + 1.0) * std::log(2.0) &&
          lm >= (2.0 / delta) * std::log(2.0 / delta) * std::log(2.0);
      double t3 = lm / (std::log(1.0 / f.mu) + llm);
      // The case-3 claims are about m i.i.d. Poi(mu).
      std::vector<LoadGroup> iid{{f.mu, f.m}};
      std::vector<LoadGroup> iid4{{4.0 * f.mu, f.m}};
      double e_iid = expected_max(std::span<const LoadGroup>(iid));
      double e_iid4 = expected_max(std::span<const LoadGroup>(iid4));
      rows.push_back(
          row("case3.lower", params, (1.0 - 4.0 * delta) * t3, e_iid, guard));
      rows.push_back(
          row("case3.upper", params, e_iid, (1.0 + 14.0 * delta) * t3, guard));
      rows.push_back(row("case3.scaling", params, e_iid4,
                         (1.0 + 20.0 * delta) * e_iid, guard));
      break;
    }
    case 4: {
      bool guard = f.mu > 4.0 * lm / static_cast<double>(f.m) && f.mu > 0.0 &&
                   std::log(f.mu) <= -delta * lm &&
                   lm >= (100.0 / (delta * delta)) * std::log(2.0) &&
                   f.spread_ok;
      double gamma4 = lm / (std::log(4.0 / f.mu) + llm);
      auto t4 = static_cast<std::int64_t>(std::ceil(gamma4));
      if (t4 < 1) t4 = 1;
      DiscreteDist w = bernoulli_w_case4(loads, t4);
      double ew = w.mean();
      rows.push_back(
          row("case4.lower", params, (1.0 - 5.0 * delta) * ew, e_max, guard));
      rows.push_back(
          row("case4.upper", params, e_max, (1.0 + 16.0 * delta) * ew, guard));
      rows.push_back(row("case4.scaling", params, e_scaled,
                         (1.0 + 16.0 * delta) * e_max, guard));
      // Mass of the max on {t4-1, t4}; reported, not a bound.
      double focus = max_cdf(loads, t4) - max_cdf(loads, t4 - 2);
      rows.push_back(row("case4.focus", params, focus, 1.0, guard));
      break;
    }
    case 5: {
      double li = std::log(1.0 / delta);
      bool guard = f.mu <= 4.0 * lm / static_cast<double>(f.m) &&
                   static_cast<double>(f.m) >=
                       1000.0 * (1.0 / delta) * li * li &&
                   f.spread_ok;
      DiscreteDist w = bernoulli_w_case5(loads);
      double ew = w.mean();
      rows.push_back(row("case5.lower", params, ew, e_max, guard));
      rows.push_back(
          row("case5.upper", params, e_max, (1.0 + 10.0 * delta) * ew, guard));
      rows.push_back(
          row("case5.two_plus", params, tail_sum_from(loads, 2), delta, guard));
      rows.push_back(row("case5.scaling", params, e_scaled,
                         (1.0 + 10.0 * delta) * e_max, guard));
      break;
    }
    default:
      throw std::invalid_argument("case_no must be 1..5");
  }
  return rows;
}

AppendixResult appendix_counterexample(std::int64_t m, double beta,
                                       double log_base) {
  if (m < 3 || m % 2 == 0) {
    throw std::invalid_argument("m must be odd and >= 3");
  }
  if (!(beta > 0.0) || !(log_base > 1.0)) {
    throw std::invalid_argument("need beta > 0 and log_base > 1");
  }
  AppendixResult result;
  result.lambda =
      beta * std::log(static_cast<double>(m - 1)) / std::log(log_base);

  std::vector<LoadGroup> balanced{{2.0 * result.lambda, (m + 1) / 2}};
  std::vector<LoadGroup> lopsided{{2.0 * result.lambda, 1},
                                  {result.lambda, m - 1}};
  result.e_balanced = expected_max(std::span<const LoadGroup>(balanced));
  result.e_lopsided = expected_max(std::span<const LoadGroup>(lopsided));
  result.gap = result.e_balanced - result.e_lopsided;
  return result;
}

LemmaReport proposition_a1_check(std::int64_t m, double lambda, double delta,
                                 double log_base) {
  if (m < 3) throw std::invalid_argument("m must be >= 3");
  if (!(log_base > 1.0)) throw std::invalid_argument("log_base must be > 1");
  const double lb = std::log(log_base);
  double lm = std::log(static_cast<double>(m)) / lb;
  if (lambda < 1.0 / static_cast<double>(m) || lambda > lm / 16.0) {
    throw std::invalid_argument("lambda outside [1/m, log(m)/16]");
  }
  std::vector<LoadGroup> iid{{lambda, m}};
  double e = expected_max(std::span<const LoadGroup>(iid));
  double base = lm / (std::log(1.0 / lambda) / lb + std::log(lm) / lb);
  double lhs = (1.0 - delta) * std::floor(base);
  double rhs = std::ceil((1.0 + delta) * base);

  LemmaReport r;
  r.lemma = "propA1";
  std::ostringstream params;
  params.precision(12);
  params << "m=" << m << ";lambda=" << lambda << ";delta=" << delta;
  r.params = params.str();
  r.lhs = lhs;
  r.rhs = rhs;
  r.ratio = base != 0.0 ? e / base : 0.0;
  // The claim only holds above an unspecified m0(delta), so a single point
  // is never an assertion, only a report.
  r.guard_ok = false;
  r.pass = lhs <= e + 1e-12 && e <= rhs + 1e-12;
  return r;
}

namespace {

LemmaReport value_row(const std::string& lemma, const std::string& params,
                      double lhs, double rhs, bool asserted, bool pass) {
  LemmaReport r;
  r.lemma = lemma;
  r.params = params;
  r.lhs = lhs;
  r.rhs = rhs;
  r.ratio = rhs != 0.0 ? lhs / rhs : 0.0;
  r.guard_ok = asserted;
  r.pass = pass;
  return r;
}

void append(std::vector<LemmaReport>& out, std::vector<LemmaReport> rows) {
  for (auto& r : rows) out.push_back(std::move(r));
}

}  // namespace

std::vector<LemmaReport> identity_battery() {
  std::vector<LemmaReport> rows;

  // pmf normalisation, truncated where the upper tail bound is below 1e-12.
  for (double lam : {0.1, 1.0, 10.0, 100.0}) {
    auto k = static_cast<std::int64_t>(std::ceil(2.0 * lam)) + 10;
    while (poisson_upper_tail_bound(lam, static_cast<double>(k + 1) - lam) >
           1e-12) {
      ++k;
    }
    double sum = 0.0;
    for (std::int64_t j = 0; j <= k; ++j) sum += std::exp(log_pmf(lam, j));
    rows.push_back(value_row("identity.pmf_norm", "lambda=" + fmt(lam),
                             std::abs(sum - 1.0), 1e-9, true,
                             std::abs(sum - 1.0) <= 1e-9));
  }

  // cdf(k) + survival(k+1) = 1 on a grid.
  {
    double worst = 0.0;
    for (double lam : {0.0, 0.5, 1.0, 3.0, 10.0, 100.0, 1000.0}) {
      for (std::int64_t k : {-1, 0, 1, 2, 5, 9, 50, 120, 1100}) {
        worst = std::max(worst,
                         std::abs(cdf(lam, k) + survival(lam, k + 1) - 1.0));
      }
    }
    rows.push_back(value_row("identity.cdf_survival", "grid", worst, 1e-12,
                             true, worst <= 1e-12));
  }

  // Expected max via the mixed split: E[max(A u B)] equals the truncated
  // mixed objective plus the loads-independent remainder of the extra part.
  {
    struct Split {
      std::vector<double> a, b;
    };
    for (const auto& sp : {Split{{3.0}, {1.0, 1.0}},
                           Split{{2.0, 1.0}, {0.5, 0.5, 1.0}}}) {
      std::int64_t u = 80;
      DiscreteDist x = max_distribution(std::span<const double>(sp.a), u - 1);
      double mixed = mixed_expected_max(x, std::span<const double>(sp.b), u);
      std::vector<double> all = sp.a;
      all.insert(all.end(), sp.b.begin(), sp.b.end());
      double whole = expected_max(std::span<const double>(all), 1e-12);
      double diff = std::abs(mixed - whole);
      rows.push_back(value_row("identity.mixed_split", "u=80", diff, 1e-6,
                               true, diff <= 1e-6));
    }
  }

  // Both closed forms of the middle-range transition point agree.
  {
    double worst = 0.0;
    for (std::int64_t m : {100, 100000, 1000000}) {
      for (double mu : {0.01, 0.1, 0.6}) {
        worst = std::max(
            worst, std::abs(t3_of(m, mu) - t3_identity_form(m, mu)));
      }
    }
    rows.push_back(value_row("identity.t3_forms", "grid", worst, 1e-12, true,
                             worst <= 1e-12));
  }
  return rows;
}

std::vector<LemmaReport> lemma_battery() {
  std::vector<LemmaReport> rows;
  std::mt19937_64 rng(20240525);

  // t2 >= mu1 whenever mu1 >= 400, over randomized profiles.
  {
    std::uniform_real_distribution<double> frac(0.05, 1.0);
    std::uniform_int_distribution<int> tail_count(1, 40);
    const double tops[] = {400.0, 1000.0, 5000.0};
    for (int i = 0; i < 50; ++i) {
      double mu1 = tops[i % 3];
      std::vector<LoadGroup> loads{{mu1, 1}};
      int extra = tail_count(rng);
      for (int t = 0; t < extra; ++t) {
        loads.push_back({mu1 * frac(rng), 1});
      }
      auto t2 = t2_of(std::span<const LoadGroup>(loads));
      rows.push_back(value_row(
          "t2_vs_mu1", "mu1=" + fmt(mu1) + ";m=" + fmt(1.0 + extra), mu1,
          static_cast<double>(t2), true, mu1 <= static_cast<double>(t2)));
    }
  }

  // Case 1, asserted: the flat profile plus perturbed ones inside the guard.
  {
    std::vector<LoadGroup> flat{{3000.0, 100}};
    append(rows, verify_case_lemma(1, flat, 0.1));
    std::uniform_real_distribution<double> jitter(2800.0, 3200.0);
    for (int i = 0; i < 10; ++i) {
      std::vector<LoadGroup> prof;
      for (int j = 0; j < 100; ++j) prof.push_back({jitter(rng), 1});
      append(rows, verify_case_lemma(1, prof, 0.1));
    }
  }

  // Case 5, asserted: the guard is satisfiable at desk scale.
  {
    std::vector<LoadGroup> flat{{1e-4, 200000}};
    append(rows, verify_case_lemma(5, flat, 0.1));
    std::uniform_real_distribution<double> spread(0.5, 2.0);
    for (int i = 0; i < 20; ++i) {
      double mu = 3e-4;
      std::vector<LoadGroup> prof{{mu * spread(rng), 20000},
                                  {mu * spread(rng), 20000},
                                  {mu * spread(rng), 20000}};
      append(rows, verify_case_lemma(5, prof, 0.1));
    }
  }

  // Cases 2, 3, 4: hypotheses need astronomically many machines, so the
  // conclusions are evaluated and reported on desk-scale stand-ins.
  {
    std::uniform_real_distribution<double> spread(0.5, 2.0);
    for (int i = 0; i < 20; ++i) {
      double mu2 = 8.0;  // Theta(log m) regime stand-in
      std::vector<LoadGroup> prof2{{mu2 * spread(rng), 400},
                                   {mu2 * spread(rng), 400},
                                   {mu2 * spread(rng), 200}};
      append(rows, verify_case_lemma(2, prof2, 0.1));

      double mu4 = 0.02;  // below 1/m^delta at this m
      std::vector<LoadGroup> prof4{{mu4 * spread(rng), 5000},
                                   {mu4 * spread(rng), 5000}};
      append(rows, verify_case_lemma(4, prof4, 0.1));
    }
    std::vector<LoadGroup> prof3{{0.05, 20000}};
    append(rows, verify_case_lemma(3, prof3, 0.1));
  }
  return rows;
}

std::vector<LemmaReport> appendix_battery() {
  std::vector<LemmaReport> rows;

  for (std::int64_t m : {1001, 10001, 100001, 1000001}) {
    AppendixResult r = appendix_counterexample(m, 1.0 / 1024.0);
    rows.push_back(value_row("appendixA.direction", "m=" + fmt(double(m)),
                             r.e_lopsided, r.e_balanced, m >= 100001,
                             r.e_lopsided < r.e_balanced));
  }
  {
    // The appendix's own arithmetic is cleanest in base 2; informational.
    AppendixResult r = appendix_counterexample(100001, 1.0 / 1024.0, 2.0);
    rows.push_back(value_row("appendixA.direction_log2", "m=100001",
                             r.e_lopsided, r.e_balanced, false,
                             r.e_lopsided < r.e_balanced));
  }

  std::vector<double> fractions;
  for (std::int64_t m : {1000, 10000, 100000, 1000000}) {
    double lo = 1.0 / static_cast<double>(m);
    double hi = std::log(static_cast<double>(m)) / 16.0;
    int passed = 0;
    const int points = 10;
    for (int i = 0; i < points; ++i) {
      double s = static_cast<double>(i + 1) / (points + 1);
      double lambda = std::pow(lo, 1.0 - s) * std::pow(hi, s);
      LemmaReport r = proposition_a1_check(m, lambda, 0.5);
      if (r.pass) ++passed;
      rows.push_back(r);
    }
    fractions.push_back(static_cast<double>(passed) / points);
  }
  double worst_drop = 0.0;
  for (std::size_t i = 0; i + 1 < fractions.size(); ++i) {
    worst_drop = std::max(worst_drop, fractions[i] - fractions[i + 1]);
  }
  rows.push_back(value_row("appendixA.fraction_trend", "m=1e3..1e6",
                           worst_drop, 0.0, true, worst_drop <= 0.0));
  return rows;
}

}  // namespace poisbal

