#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace poisbal {

// n jobs with Poisson rates (sizes) and m identical machines.
struct JobInstance {
  std::int64_t machines = 1;
  std::vector<double> sizes;

  void validate() const;  // machines >= 1, sizes finite and >= 0

  // Text format: {"machines": 4, "jobs": [1.5, 2.0, 0.25]}
  static JobInstance from_json_text(const std::string& text);
  static JobInstance load_file(const std::filesystem::path& path);
  std::string to_json_text() const;
};

// job -> machine map (0-based) plus the derived per-machine load vector.
struct Assignment {
  std::vector<std::int32_t> machine_of;
  std::vector<double> loads;
};

std::vector<double> loads_of(std::span<const double> sizes,
                             std::int64_t machines,
                             std::span<const std::int32_t> mapping);

Assignment make_assignment(std::span<const double> sizes,
                           std::int64_t machines,
                           std::vector<std::int32_t> mapping);

double exact_expected_max_of(const Assignment& assignment,
                             double tail_tol = 1e-9);

// Output document for a solved instance.
std::string assignment_to_json_text(const Assignment& assignment,
                                    double expected_max,
                                    const std::string& algorithm,
                                    double epsilon);
Assignment assignment_from_json_text(const std::string& text,
                                     std::span<const double> sizes,
                                     std::int64_t machines);

// Big-job peeling: repeatedly pull the largest size while it strictly
// exceeds the current remaining average load, reserving one machine per
// pulled job.
struct PeelResult {
  std::vector<std::size_t> big_indices;        // descending size order
  std::vector<double> big_sizes;
  std::vector<std::size_t> remaining_indices;  // ascending size order
  std::vector<double> remaining_sizes;
  std::int64_t m1 = 0;  // machines left for the remaining jobs
  double mu = 0.0;      // remaining average load
};

PeelResult peel_big_jobs(const JobInstance& instance);

}  // namespace poisbal
