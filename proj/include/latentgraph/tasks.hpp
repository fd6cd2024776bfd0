#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "latentgraph/filters.hpp"
#include "latentgraph/graph.hpp"
#include "latentgraph/learners.hpp"
#include "latentgraph/splits.hpp"

namespace lg {

// Unsupervised clustering of vertices: spectral projection on eigenvectors
// 2..c+1 of the built graph's Laplacian, k-means, AMI against ground truth.
double task_ucv(const Matrix& features, const std::vector<int>& labels,
                const GraphBuildConfig& config, int n_classes, std::uint64_t seed);

// Label propagation: one diffusion of the masked label-indicator matrix by
// exp(S), computed through the eigendecomposition of the symmetric operator.
// Returns accuracy over the rows outside the train mask.
double task_sscv_label_propagation(const Matrix& s, const std::vector<int>& labels, int n_classes,
                                   const SplitMasks& split);

// SGC-style pipeline: x_hat = S^power X, then logistic regression on the
// train rows; accuracy over the rows outside the train mask.
double task_sscv_sgc(const Matrix& features, const std::vector<int>& labels, int n_classes,
                     const Matrix& s, int power, const SplitMasks& split,
                     const LogisticConfig& config, std::uint64_t seed);

struct DenoiseResult {
  double best_tau = 0.0;
  double best_snr_db = 0.0;
};

double snr_db(const Matrix& clean, const Matrix& estimate);

// Simoncelli tau sweep over the noisy signal; returns the best (tau, SNR).
DenoiseResult task_dgs(const Matrix& clean, const Matrix& noisy, const Graph& g,
                       const std::vector<double>& tau_sweep);

std::vector<double> default_tau_sweep();  // 0 to 1 in increments of 0.025

struct FilterCompareCombo {
  SpectralResponseFilter filter;
  Placement placement = Placement::Pre;
  double input_dropout = 0.0;
  double edge_dropout = 0.0;
  AggregatedMetric valid;
  AggregatedMetric test;
};

struct FilterCompareRun {
  int combo_index = 0;
  int split_id = 0;
  std::uint64_t seed = 0;
  double valid_acc = 0.0;
  double test_acc = 0.0;
  int epochs = 0;
};

struct RelaxedGridConfig {
  std::vector<SpectralResponseFilter> filters;
  std::vector<Placement> placements = {Placement::Pre, Placement::Post, Placement::Both};
  std::vector<double> input_dropouts = {0.0, 0.25, 0.5, 0.75};
  std::vector<double> edge_dropouts = {0.0, 0.25, 0.5, 0.75};
  SplitSpec split;
  int seeds_per_split = 1;
  OneHiddenConfig model;
};

struct FilterComparison {
  std::vector<FilterCompareCombo> ranked;  // by mean validation accuracy, descending
  std::vector<FilterCompareRun> runs;      // ordered by (combo, split, seed)
};

// One training run per combination x split x seed; diffusion operators are
// compiled once per filter. n_workers > 1 parallelizes over runs.
FilterComparison relaxed_filter_comparison(const Matrix& features, const std::vector<int>& labels,
                                           int n_classes, const Graph& g,
                                           const RelaxedGridConfig& config, int n_workers = 1);

const char* placement_name(Placement p);
Placement placement_from_name(const std::string& name);

}  // namespace lg
