#pragma once

#include <cstdint>
#include <vector>

namespace lg {

struct SplitMasks {
  std::vector<int> train;
  std::vector<int> valid;
  std::vector<int> test;
};

struct SplitSpec {
  enum class Mode { PerClassCounts, Fraction, Fixed };

  Mode mode = Mode::PerClassCounts;
  int train_per_class = 20;
  int valid_per_class = 30;     // PerClassCounts; remainder goes to test
  double train_fraction = 0.05;  // Fraction; remainder goes to test, no valid
  SplitMasks fixed;              // Fixed
  int n_splits = 1;
  std::uint64_t base_seed = 0;

  static SplitSpec per_class(int train_per_class, int valid_per_class, int n_splits,
                             std::uint64_t base_seed);
  static SplitSpec fraction(double train_fraction, int n_splits, std::uint64_t base_seed);
  static SplitSpec fixed_split(SplitMasks masks);
};

// Disjoint masks, exact per-class counts, reproducible from base_seed.
std::vector<SplitMasks> generate_splits(const std::vector<int>& labels, int n_classes,
                                        const SplitSpec& spec);

struct AggregatedMetric {
  double mean = 0.0;
  double ci95_halfwidth = 0.0;
  int n_runs = 0;
  std::vector<double> per_run;
};

// Normal-approximation CI at n >= 30, Student t below.
AggregatedMetric aggregate(const std::vector<double>& per_run);

}  // namespace lg
