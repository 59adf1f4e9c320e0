#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "poisbal/instance.hpp"

namespace poisbal {

struct SizeGroup {
  double size = 0.0;
  std::int64_t count = 0;
};

// Counts per distinct rounded size, indexed like RoundedInstance::groups.
using MachineConfig = std::vector<std::int64_t>;

// Geometric-then-arithmetic rounding of the jobs at or above delta*mu, with
// the jobs below delta*mu melted into bundle jobs of size exactly delta*mu.
struct RoundedInstance {
  double delta = 0.0;
  double mu = 0.0;
  double bundle_size = 0.0;        // delta * mu
  std::int64_t bundle_count = 0;   // number of bundle jobs created
  double small_total = 0.0;        // S, the melted mass

  // Parallel to the input sizes: rounded value for regular jobs, the bundle
  // marker (quiet NaN) for sub-threshold jobs.
  std::vector<double> rounded_of;
  std::vector<std::size_t> regular_jobs;  // input indices with size >= delta*mu
  std::vector<std::size_t> small_jobs;    // input indices with size < delta*mu

  // Distinct rounded sizes ascending, bundle jobs included in the counts.
  std::vector<SizeGroup> groups;

  std::int64_t rounded_count() const;  // n' = regular + bundle jobs
  std::size_t group_index_of(double size) const;

  // Flat multiset of rounded sizes: regular jobs in input order, then the
  // bundle jobs. Guarded against absurd bundle counts.
  std::vector<double> flat_sizes(std::int64_t limit = 10'000'000) const;
};

// Requires all sizes <= mu (up to fp slack) and delta in (0,1). mu == 0 is
// the all-zero instance and yields an empty rounding.
RoundedInstance round_instance(std::span<const double> sizes, double mu,
                               double delta);

// Convert an assignment of the rounded jobs (one config per machine) back to
// an assignment of the original jobs. Regular jobs follow their own rounded
// size; the sub-threshold originals are poured into the machines holding
// bundle jobs, overflowing each machine's bundle capacity by less than one
// small job. Fails loudly if some machine ends above (1+5*delta) times its
// rounded load.
Assignment unround_assignment(const RoundedInstance& rounded,
                              std::span<const MachineConfig> machine_configs,
                              std::span<const double> original_sizes);

// Same, for a flat job->machine assignment over the rounded jobs in
// flat_sizes() order.
Assignment unround_assignment(const RoundedInstance& rounded,
                              const Assignment& rounded_assignment,
                              std::span<const double> original_sizes);

}  // namespace poisbal
