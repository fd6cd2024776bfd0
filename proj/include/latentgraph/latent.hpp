#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "latentgraph/filters.hpp"
#include "latentgraph/graph.hpp"
#include "latentgraph/rng.hpp"

namespace lg {

struct LayerFeatures {
  std::string name;
  Matrix features;  // n x F_layer, rows aligned across layers
};

// Spectral filtering of each class's rows over its own cosine k-NN graph;
// k <= 0 or k >= class size builds the fully connected class graph (the
// few-shot regime). Other classes' rows are untouched while class c is
// filtered; singleton classes pass through with a warning.
Matrix per_class_filter(const Matrix& features, const std::vector<int>& labels,
                        const SpectralResponseFilter& filter, int k);

enum class FewshotClassifier { OneNN, Ncm, Lr, ConcatLr };

FewshotClassifier fewshot_classifier_from_name(const std::string& name);

// Accuracy of one episode: the support is filtered per class (fully connected
// class graphs), queries stay raw. ConcatLr trains on [filtered || raw]
// support rows and classifies [raw || raw] queries.
double fewshot_episode(const Matrix& support, const std::vector<int>& support_labels,
                       const Matrix& query, const std::vector<int>& query_labels,
                       const SpectralResponseFilter& filter, FewshotClassifier classifier,
                       int ways = 5, int shots = 5);

struct FewshotEpisodeIndices {
  std::vector<int> classes;          // sampled class ids, one per way
  std::vector<int> support_rows;     // ways * shots rows
  std::vector<int> support_labels;   // relabeled 0..ways-1
  std::vector<int> query_rows;
  std::vector<int> query_labels;
};

FewshotEpisodeIndices sample_fewshot_episode(const std::vector<int>& labels, int n_classes,
                                             int ways, int shots, int queries_per_class, Rng& rng);

struct SmoothnessGapReport {
  std::vector<std::pair<std::string, double>> per_layer_smoothness;  // normalized sigma
  double gap = 0.0;                 // |sigma_last - sigma_penultimate|
  double normalization_bound = 0.0;  // 2 M C k
};

// Label-signal smoothness of each layer over cosine k-NN graphs built on
// M-per-class resamples, normalized by 2MCk and averaged over resamples.
SmoothnessGapReport smoothness_gap(const std::vector<LayerFeatures>& layers,
                                   const std::vector<int>& labels, int samples_per_class,
                                   int n_classes, int k, int n_resamples, std::uint64_t seed);

std::vector<std::pair<std::string, double>> smoothness_evolution(
    const std::vector<LayerFeatures>& layers, const std::vector<int>& labels,
    int samples_per_class, int n_classes, int k, int n_resamples, std::uint64_t seed);

}  // namespace lg
