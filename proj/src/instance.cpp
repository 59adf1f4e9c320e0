#include "poisbal/instance.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include <json.hpp>

#include "poisbal/errors.hpp"
#include "poisbal/poisson.hpp"

namespace poisbal {

void JobInstance::validate() const {
  if (machines < 1) throw std::invalid_argument("machines must be >= 1");
  for (double s : sizes) {
    if (!std::isfinite(s) || s < 0.0) {
      throw std::invalid_argument("job sizes must be finite and >= 0");
    }
  }
}

JobInstance JobInstance::from_json_text(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid instance JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("machines") || !doc.contains("jobs")) {
    throw ParseError("instance document needs 'machines' and 'jobs' fields");
  }
  JobInstance inst;
  try {
    inst.machines = doc.at("machines").get<std::int64_t>();
    inst.sizes = doc.at("jobs").get<std::vector<double>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid instance fields: ") + e.what());
  }
  if (inst.machines < 1) throw ParseError("'machines' must be a positive integer");
  for (double s : inst.sizes) {
    if (std::isnan(s) || std::isinf(s) || s < 0.0) {
      throw ParseError("job rates must be finite, non-negative decimals");
    }
  }
  return inst;
}

JobInstance JobInstance::load_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open instance file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_json_text(buf.str());
}

std::string JobInstance::to_json_text() const {
  nlohmann::json doc;
  doc["machines"] = machines;
  doc["jobs"] = sizes;
  return doc.dump();
}

std::vector<double> loads_of(std::span<const double> sizes,
                             std::int64_t machines,
                             std::span<const std::int32_t> mapping) {
  if (mapping.size() != sizes.size()) {
    throw std::invalid_argument("mapping length must equal job count");
  }
  std::vector<double> loads(static_cast<std::size_t>(machines), 0.0);
  for (std::size_t i = 0; i < mapping.size(); ++i) {
    std::int32_t j = mapping[i];
    if (j < 0 || j >= machines) {
      throw std::invalid_argument("machine index out of range");
    }
    loads[static_cast<std::size_t>(j)] += sizes[i];
  }
  return loads;
}

Assignment make_assignment(std::span<const double> sizes,
                           std::int64_t machines,
                           std::vector<std::int32_t> mapping) {
  Assignment a;
  a.loads = loads_of(sizes, machines, mapping);
  a.machine_of = std::move(mapping);
  return a;
}

double exact_expected_max_of(const Assignment& assignment, double tail_tol) {
  if (assignment.loads.empty()) return 0.0;
  return expected_max(std::span<const double>(assignment.loads), tail_tol);
}

std::string assignment_to_json_text(const Assignment& assignment,
                                    double expected_max_value,
                                    const std::string& algorithm,
                                    double epsilon) {
  nlohmann::json doc;
  doc["assignment"] = assignment.machine_of;
  doc["loads"] = assignment.loads;
  doc["expected_max"] = expected_max_value;
  doc["algorithm"] = algorithm;
  doc["epsilon"] = epsilon;
  return doc.dump();
}

Assignment assignment_from_json_text(const std::string& text,
                                     std::span<const double> sizes,
                                     std::int64_t machines) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid assignment JSON: ") + e.what());
  }
  std::vector<std::int32_t> mapping;
  try {
    mapping = doc.at("assignment").get<std::vector<std::int32_t>>();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("invalid assignment field: ") + e.what());
  }
  Assignment a = make_assignment(sizes, machines, std::move(mapping));
  if (doc.contains("loads")) {
    auto stored = doc.at("loads").get<std::vector<double>>();
    if (stored.size() != a.loads.size()) {
      throw ParseError("stored load vector has the wrong length");
    }
    for (std::size_t j = 0; j < stored.size(); ++j) {
      if (std::abs(stored[j] - a.loads[j]) > 1e-12 * (1.0 + a.loads[j])) {
        throw ParseError("stored loads disagree with the recomputed loads");
      }
    }
  }
  return a;
}

PeelResult peel_big_jobs(const JobInstance& instance) {
  instance.validate();
  const std::size_t n = instance.sizes.size();

  // Sort once; peel from the top. Stable on (size, original index).
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (instance.sizes[a] != instance.sizes[b]) {
      return instance.sizes[a] < instance.sizes[b];
    }
    return a < b;
  });

  // Compensated sums: with many equal sizes, naive accumulation error is
  // large enough to flip the strict tie rule below.
  double total = 0.0;
  double comp = 0.0;
  for (double s : instance.sizes) {
    double t = total + s;
    comp += std::abs(total) >= std::abs(s) ? (total - t) + s : (s - t) + total;
    total = t;
  }
  total += comp;

  PeelResult result;
  result.m1 = instance.machines;
  std::size_t top = n;  // order[0..top) are still unpeeled
  double peeled = 0.0;
  while (top > 0) {
    double remaining = total - peeled;
    double mu = remaining / static_cast<double>(result.m1);
    double largest = instance.sizes[order[top - 1]];
    // Strict inequality: ties stay. The relative slack keeps fp noise in the
    // running average from peeling a job exactly equal to it.
    if (!(largest > mu * (1.0 + 1e-12))) break;
    if (result.m1 == 1) {
      // One job exceeding the whole remaining total is impossible, so this
      // is unreachable for valid inputs; guard anyway.
      throw GuardError("peeling would consume all machines");
    }
    --top;
    result.big_indices.push_back(order[top]);
    result.big_sizes.push_back(largest);
    peeled += largest;
    --result.m1;
  }

  result.mu = top > 0 ? (total - peeled) / static_cast<double>(result.m1) : 0.0;
  result.remaining_indices.assign(order.begin(), order.begin() + top);
  result.remaining_sizes.reserve(top);
  for (std::size_t i = 0; i < top; ++i) {
    result.remaining_sizes.push_back(instance.sizes[result.remaining_indices[i]]);
  }
  return result;
}

}  // namespace poisbal
