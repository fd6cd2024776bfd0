#pragma once

#include <optional>
#include <utility>
#include <vector>

#include "latentgraph/graph.hpp"

namespace lg {

struct RetrievalItem {
  Vector feature;
  std::optional<std::pair<double, double>> gps;  // (lat, lon), or planar (x, y)
  std::optional<int> sequence_id;
  std::optional<int> frame_index;
  std::optional<int> class_id;
};

struct VblGraphParams {
  double gamma = 0.1;
  double max_distance = 25.0;  // meters
  std::vector<double> betas = {0.75, 0.0625, 0.015};  // beta_1..beta_kmax
  double alpha_sim = 0.66;
  double filter_a = 0.1;
  int filter_m = 20;
  bool planar = false;          // planar Euclidean instead of haversine
  bool class_distance = false;  // IR datasets: dist channel is 1 iff same class
  bool use_dist = true;
  bool use_seq = true;
  bool use_latent_sim = true;
};

double haversine_m(double lat1, double lon1, double lat2, double lon2);

struct VblChannels {
  Matrix dist;
  Matrix seq;
  Matrix latent_sim;
};

// The three source matrices, honoring the channel toggles. The latent channel
// is gated on dist or seq being nonzero for the pair.
VblChannels build_vbl_channels(const std::vector<RetrievalItem>& items,
                               const VblGraphParams& params);

// A = A_dist + A_seq + A_latent_sim.
Graph build_vbl_adjacency(const std::vector<RetrievalItem>& items, const VblGraphParams& params);

// m applications of (I - a L_sym); isolated vertices pass through untouched.
Matrix smooth_features(const Matrix& features, const Graph& g, double a = 0.1, int m = 20);

// Cosine ranking, descending, ties broken by support index.
std::vector<std::vector<int>> retrieve(const Matrix& query_features,
                                       const Matrix& support_features, int top_k);

// Queries with an empty relevance set are disregarded.
double mean_average_precision(const std::vector<std::vector<int>>& rankings,
                              const std::vector<std::vector<int>>& relevance_sets);

double average_precision(const std::vector<int>& ranking, const std::vector<int>& relevant);

struct LocalizationMetrics {
  double median_error_m = 0.0;
  double fraction_under_25m = 0.0;
};

LocalizationMetrics localization_metrics(
    const std::vector<std::pair<double, double>>& query_gps,
    const std::vector<std::pair<double, double>>& retrieved_gps, bool planar = false);

}  // namespace lg
