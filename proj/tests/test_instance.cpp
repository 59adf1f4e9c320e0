#include <doctest.h>

#include <stdexcept>

#include <algorithm>
#include <map>
#include <vector>

#include "poisbal/errors.hpp"
#include "poisbal/instance.hpp"
#include "poisbal/oracle.hpp"
#include "poisbal/poisson.hpp"

using namespace poisbal;

TEST_CASE("peeling follows the strict while-rule") {
  {
    JobInstance inst{3, {10.0, 1.0, 1.0, 1.0}};
    PeelResult p = peel_big_jobs(inst);
    REQUIRE(p.big_indices.size() == 1);
    CHECK(p.big_sizes[0] == 10.0);
    CHECK(p.m1 == 2);
    CHECK(p.mu == doctest::Approx(1.5));
  }
  {
    // 8 peels first (mu = 6), then 7 (mu = 5), then 1 <= 3 stops.
    JobInstance inst{3, {8.0, 7.0, 1.0, 1.0, 1.0}};
    PeelResult p = peel_big_jobs(inst);
    REQUIRE(p.big_sizes.size() == 2);
    CHECK(p.big_sizes[0] == 8.0);
    CHECK(p.big_sizes[1] == 7.0);
    CHECK(p.m1 == 1);
    CHECK(p.mu == doctest::Approx(3.0));
  }
  {
    // n = m with equal sizes: lambda = mu, and ties are not peeled
    JobInstance inst{3, {2.0, 2.0, 2.0}};
    PeelResult p = peel_big_jobs(inst);
    CHECK(p.big_indices.empty());
    CHECK(p.m1 == 3);
  }
}

TEST_CASE("peeling is idempotent") {
  JobInstance inst{4, {9.0, 4.0, 2.0, 1.0, 1.0, 0.5}};
  PeelResult p = peel_big_jobs(inst);
  JobInstance rest{p.m1, p.remaining_sizes};
  PeelResult q = peel_big_jobs(rest);
  CHECK(q.big_indices.empty());
  CHECK(q.mu == doctest::Approx(p.mu));
}

TEST_CASE("loads and exact expected max of an assignment") {
  {
    JobInstance inst{2, {}};
    Assignment a = make_assignment(inst.sizes, inst.machines, {});
    CHECK(exact_expected_max_of(a) == 0.0);
  }
  {
    std::vector<double> sizes{2.0, 3.0, 0.5};
    Assignment a = make_assignment(sizes, 3, {0, 1, 2});
    CHECK(a.loads == std::vector<double>{2.0, 3.0, 0.5});
  }
  {
    std::vector<double> sizes{1.0, 1.0, 1.0, 1.0};
    Assignment a = make_assignment(sizes, 2, {0, 0, 1, 1});
    std::vector<double> two{2.0, 2.0};
    CHECK(exact_expected_max_of(a) ==
          doctest::Approx(expected_max(std::span<const double>(two), 1e-9))
              .epsilon(1e-12));
  }
  std::vector<double> sizes{1.0};
  CHECK_THROWS_AS(make_assignment(sizes, 2, {2}), std::invalid_argument);
  CHECK_THROWS_AS(make_assignment(sizes, 2, {0, 1}), std::invalid_argument);
}

TEST_CASE("instance and assignment documents round-trip") {
  JobInstance inst = JobInstance::from_json_text(
      R"({"machines": 4, "jobs": [1.5, 2.0, 0.25]})");
  CHECK(inst.machines == 4);
  CHECK(inst.sizes == std::vector<double>{1.5, 2.0, 0.25});

  JobInstance back = JobInstance::from_json_text(inst.to_json_text());
  CHECK(back.machines == inst.machines);
  CHECK(back.sizes == inst.sizes);

  Assignment a = make_assignment(inst.sizes, inst.machines, {1, 0, 1});
  std::string doc = assignment_to_json_text(a, 2.5, "greedy", 0.5);
  Assignment parsed = assignment_from_json_text(doc, inst.sizes,
                                                inst.machines);
  CHECK(parsed.machine_of == a.machine_of);
  CHECK(parsed.loads == a.loads);

  CHECK_THROWS_AS(JobInstance::from_json_text("{"), ParseError);
  CHECK_THROWS_AS(JobInstance::from_json_text(R"({"machines": 0, "jobs": []})"),
                  ParseError);
  CHECK_THROWS_AS(
      JobInstance::from_json_text(R"({"machines": 1, "jobs": [-2.0]})"),
      ParseError);
  CHECK_THROWS_AS(JobInstance::load_file("/nonexistent/instance.json"),
                  ParseError);
}

TEST_CASE("an optimal assignment keeps peeled jobs alone") {
  // Exhaustive over small instances: some brute-force optimum must place
  // every peeled job on its own machine.
  const std::vector<double> palette{0.5, 1.0, 2.0, 5.0, 10.0};
  std::vector<std::size_t> pick;
  std::int64_t checked = 0;

  auto run_instance = [&](const std::vector<double>& sizes, std::int64_t m) {
    JobInstance inst{m, sizes};
    PeelResult peel = peel_big_jobs(inst);
    if (peel.big_indices.empty()) return;
    ++checked;

    std::map<std::vector<double>, double> memo;
    double best = 0.0;
    bool first = true;
    std::vector<std::pair<std::vector<std::int32_t>, double>> all;
    enumerate_canonical_assignments(
        sizes.size(), m, [&](std::span<const std::int32_t> mp) {
          std::vector<double> loads(static_cast<std::size_t>(m), 0.0);
          for (std::size_t i = 0; i < sizes.size(); ++i) {
            loads[static_cast<std::size_t>(mp[i])] += sizes[i];
          }
          std::sort(loads.begin(), loads.end());
          auto it = memo.find(loads);
          if (it == memo.end()) {
            it = memo
                     .emplace(loads, expected_max(
                                         std::span<const double>(loads), 1e-9))
                     .first;
          }
          all.emplace_back(std::vector<std::int32_t>(mp.begin(), mp.end()),
                           it->second);
          if (first || it->second < best) {
            best = it->second;
            first = false;
          }
        });

    bool found = false;
    for (const auto& [mp, value] : all) {
      if (value > best + 1e-9 * (1.0 + best)) continue;
      bool alone = true;
      for (std::size_t big : peel.big_indices) {
        for (std::size_t i = 0; i < sizes.size(); ++i) {
          if (i != big && mp[i] == mp[big]) alone = false;
        }
      }
      if (alone) {
        found = true;
        break;
      }
    }
    CHECK_MESSAGE(found, "no optimum isolates the peeled jobs");
  };

  auto rec = [&](auto&& self, std::size_t start, std::size_t left) -> void {
    if (left == 0) {
      std::vector<double> sizes;
      for (std::size_t i : pick) sizes.push_back(palette[i]);
      for (std::int64_t m = 2; m <= 3; ++m) run_instance(sizes, m);
      return;
    }
    for (std::size_t i = start; i < palette.size(); ++i) {
      pick.push_back(i);
      self(self, i, left - 1);
      pick.pop_back();
    }
  };
  for (std::size_t n = 2; n <= 7; ++n) rec(rec, 0, n);
  CHECK(checked > 100);  // the family actually exercises peeling
}
