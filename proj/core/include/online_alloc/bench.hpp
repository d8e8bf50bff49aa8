#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "online_alloc/algorithms.hpp"
#include "online_alloc/generators.hpp"
#include "online_alloc/model.hpp"

namespace online_alloc {

/// Where a benchmark column's instances come from: a generator spec (one
/// fresh instance per instance index) or a JSON file (always one instance).
struct InstanceSource {
  std::string label;
  std::optional<WorstCaseSpec> generator;
  std::optional<std::string> path;

  static InstanceSource from_generator(const std::string& text);
  static InstanceSource from_file(const std::string& path);
};

struct BenchConfig {
  std::vector<InstanceSource> sources;
  std::vector<AlgorithmSpec> algorithms;
  std::vector<double> eps;
  std::size_t perms = 100;
  std::size_t instances = 1;
  std::uint64_t seed = 0;
  std::size_t threads = 0;  // 0: hardware concurrency
  bool timing = true;       // false writes 0 for every time
  std::optional<double> gamma;  // default: 1/c for generated, measured for files
  RunOptions options;

  /// Throws std::invalid_argument on an empty list, perms == 0,
  /// instances == 0 or eps outside (0, 1).
  void validate() const;
};

/// One (source, algorithm, eps) cell aggregated over instances and orders.
struct BenchRow {
  std::string instance;
  std::string algorithm;
  std::optional<double> eps;  // empty for algorithms without eps
  double mean_cr = 0.0;
  double std_cr = 0.0;
  double mean_time_s = 0.0;
  std::size_t perms = 0;       // per instance
  std::size_t runs = 0;        // perms * instances
  std::size_t infeasible = 0;  // runs whose consumption exceeded b
  double max_cr = 0.0;
};

struct BenchReport {
  std::vector<BenchRow> rows;
};

/// Instance j of a generated source uses generator seed splitmix64(seed + j);
/// order p of instance j uses permutation_seed(seed + j, p).
BenchReport run_bench(const BenchConfig& config);

void write_csv(std::ostream& out, const BenchReport& report);
void write_markdown(std::ostream& out, const BenchReport& report);

}  // namespace online_alloc
