#include "latentgraph/splits.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "latentgraph/rng.hpp"

namespace lg {

SplitSpec SplitSpec::per_class(int train_per_class, int valid_per_class, int n_splits,
                               std::uint64_t base_seed) {
  SplitSpec s;
  s.mode = Mode::PerClassCounts;
  s.train_per_class = train_per_class;
  s.valid_per_class = valid_per_class;
  s.n_splits = n_splits;
  s.base_seed = base_seed;
  return s;
}

SplitSpec SplitSpec::fraction(double train_fraction, int n_splits, std::uint64_t base_seed) {
  SplitSpec s;
  s.mode = Mode::Fraction;
  s.train_fraction = train_fraction;
  s.n_splits = n_splits;
  s.base_seed = base_seed;
  return s;
}

SplitSpec SplitSpec::fixed_split(SplitMasks masks) {
  SplitSpec s;
  s.mode = Mode::Fixed;
  s.fixed = std::move(masks);
  s.n_splits = 1;
  return s;
}

std::vector<SplitMasks> generate_splits(const std::vector<int>& labels, int n_classes,
                                        const SplitSpec& spec) {
  const int n = static_cast<int>(labels.size());
  if (spec.mode == SplitSpec::Mode::Fixed) {
    return {spec.fixed};
  }
  if (spec.n_splits < 1) throw std::invalid_argument("generate_splits: n_splits must be >= 1");

  std::vector<std::vector<int>> by_class(n_classes);
  for (int i = 0; i < n; ++i) {
    if (labels[i] < 0 || labels[i] >= n_classes) {
      throw std::invalid_argument("generate_splits: label " + std::to_string(labels[i]) +
                                  " outside [0, " + std::to_string(n_classes) + ")");
    }
    by_class[labels[i]].push_back(i);
  }

  std::vector<SplitMasks> out;
  out.reserve(spec.n_splits);
  for (int s = 0; s < spec.n_splits; ++s) {
    Rng rng(Rng::derive_key(spec.base_seed, static_cast<std::uint64_t>(s)));
    SplitMasks masks;
    if (spec.mode == SplitSpec::Mode::PerClassCounts) {
      for (int c = 0; c < n_classes; ++c) {
        const auto& members = by_class[c];
        const int need = spec.train_per_class + spec.valid_per_class;
        if (static_cast<int>(members.size()) < need) {
          throw std::invalid_argument("generate_splits: class " + std::to_string(c) + " has " +
                                      std::to_string(members.size()) + " samples, needs " +
                                      std::to_string(need));
        }
        const std::vector<int> perm = rng.permutation(static_cast<int>(members.size()));
        for (int i = 0; i < static_cast<int>(members.size()); ++i) {
          const int idx = members[perm[i]];
          if (i < spec.train_per_class) masks.train.push_back(idx);
          else if (i < need) masks.valid.push_back(idx);
          else masks.test.push_back(idx);
        }
      }
    } else {
      if (spec.train_fraction <= 0.0 || spec.train_fraction >= 1.0) {
        throw std::invalid_argument("generate_splits: train_fraction must lie in (0, 1)");
      }
      const std::vector<int> perm = rng.permutation(n);
      const int n_train = std::max(1, static_cast<int>(std::llround(spec.train_fraction * n)));
      for (int i = 0; i < n; ++i) {
        if (i < n_train) masks.train.push_back(perm[i]);
        else masks.test.push_back(perm[i]);
      }
    }
    std::sort(masks.train.begin(), masks.train.end());
    std::sort(masks.valid.begin(), masks.valid.end());
    std::sort(masks.test.begin(), masks.test.end());
    out.push_back(std::move(masks));
  }
  return out;
}

namespace {

// Two-sided 97.5% Student t quantiles for df 1..29; 1.96 beyond.
constexpr double kT975[] = {
    12.706, 4.303, 3.182, 2.776, 2.571, 2.447, 2.365, 2.306, 2.262, 2.228,
    2.201,  2.179, 2.160, 2.145, 2.131, 2.120, 2.110, 2.101, 2.093, 2.086,
    2.080,  2.074, 2.069, 2.064, 2.060, 2.056, 2.052, 2.048, 2.045};

double ci_factor(int n) {
  if (n >= 30) return 1.96;
  if (n < 2) return 0.0;
  return kT975[n - 2];
}

}  // namespace

AggregatedMetric aggregate(const std::vector<double>& per_run) {
  if (per_run.empty()) throw std::invalid_argument("aggregate: no runs");
  AggregatedMetric m;
  m.per_run = per_run;
  m.n_runs = static_cast<int>(per_run.size());
  double sum = 0.0;
  for (double v : per_run) sum += v;
  m.mean = sum / m.n_runs;
  if (m.n_runs > 1) {
    double ss = 0.0;
    for (double v : per_run) ss += (v - m.mean) * (v - m.mean);
    const double stddev = std::sqrt(ss / (m.n_runs - 1));
    m.ci95_halfwidth = ci_factor(m.n_runs) * stddev / std::sqrt(static_cast<double>(m.n_runs));
  }
  return m;
}

}  // namespace lg
