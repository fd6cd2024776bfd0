#include "latentgraph/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace lg {

double haversine_m(double lat1, double lon1, double lat2, double lon2) {
  constexpr double earth_radius_m = 6371000.0;
  const double to_rad = std::numbers::pi / 180.0;
  const double dlat = (lat2 - lat1) * to_rad;
  const double dlon = (lon2 - lon1) * to_rad;
  const double a = std::sin(dlat / 2) * std::sin(dlat / 2) +
                   std::cos(lat1 * to_rad) * std::cos(lat2 * to_rad) * std::sin(dlon / 2) *
                       std::sin(dlon / 2);
  return 2.0 * earth_radius_m * std::asin(std::min(1.0, std::sqrt(a)));
}

namespace {

double pair_distance(const RetrievalItem& a, const RetrievalItem& b, bool planar) {
  if (planar) {
    const double dx = a.gps->first - b.gps->first;
    const double dy = a.gps->second - b.gps->second;
    return std::sqrt(dx * dx + dy * dy);
  }
  return haversine_m(a.gps->first, a.gps->second, b.gps->first, b.gps->second);
}

Matrix unit_rows(const Matrix& m, const char* what) {
  Vector norms = m.rowwise().norm();
  for (int i = 0; i < m.rows(); ++i) {
    if (norms(i) == 0.0) {
      throw std::invalid_argument(std::string(what) + ": zero feature row " + std::to_string(i));
    }
  }
  return norms.cwiseInverse().asDiagonal() * m;
}

}  // namespace

VblChannels build_vbl_channels(const std::vector<RetrievalItem>& items,
                               const VblGraphParams& params) {
  const int n = static_cast<int>(items.size());
  if (n < 2) throw std::invalid_argument("build_vbl_adjacency: need at least 2 items");
  if (!params.use_dist && !params.use_seq && !params.use_latent_sim) {
    throw std::invalid_argument("build_vbl_adjacency: no channel enabled");
  }
  const int k_max = static_cast<int>(params.betas.size());
  for (double b : params.betas) {
    if (b < 0.0) throw std::invalid_argument("build_vbl_adjacency: betas must be nonnegative");
  }

  for (int i = 0; i < n; ++i) {
    if (params.use_dist && !params.class_distance && !items[i].gps.has_value()) {
      throw std::invalid_argument("build_vbl_adjacency: item " + std::to_string(i) +
                                  " lacks GPS for the dist channel");
    }
    if (params.use_dist && params.class_distance && !items[i].class_id.has_value()) {
      throw std::invalid_argument("build_vbl_adjacency: item " + std::to_string(i) +
                                  " lacks class_id for the dist channel");
    }
  }

  Matrix a_dist = Matrix::Zero(n, n);
  Matrix a_seq = Matrix::Zero(n, n);
  Matrix a_latent = Matrix::Zero(n, n);

  Matrix unit;
  if (params.use_latent_sim) {
    Matrix feats(n, items[0].feature.size());
    for (int i = 0; i < n; ++i) feats.row(i) = items[i].feature.transpose();
    unit = unit_rows(feats, "build_vbl_adjacency");
  }

  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (params.use_dist) {
        if (params.class_distance) {
          if (*items[i].class_id == *items[j].class_id) a_dist(i, j) = 1.0;
        } else {
          const double d = pair_distance(items[i], items[j], params.planar);
          if (d < params.max_distance) a_dist(i, j) = std::exp(-params.gamma * d);
        }
      }
      if (params.use_seq && items[i].sequence_id.has_value() && items[j].sequence_id.has_value() &&
          *items[i].sequence_id == *items[j].sequence_id && items[i].frame_index.has_value() &&
          items[j].frame_index.has_value()) {
        const int gap = std::abs(*items[i].frame_index - *items[j].frame_index);
        if (gap >= 1 && gap <= k_max) a_seq(i, j) = params.betas[gap - 1];
      }
      if (params.use_latent_sim && (a_dist(i, j) > 0.0 || a_seq(i, j) > 0.0)) {
        const double sim = unit.row(i).dot(unit.row(j));
        if (sim > 0.0) a_latent(i, j) = params.alpha_sim * sim;
      }
    }
  }

  auto mirror = [](Matrix& m) {
    m = Matrix(m.template selfadjointView<Eigen::Upper>());
    m.diagonal().setZero();
  };
  mirror(a_dist);
  mirror(a_seq);
  mirror(a_latent);
  return {std::move(a_dist), std::move(a_seq), std::move(a_latent)};
}

Graph build_vbl_adjacency(const std::vector<RetrievalItem>& items, const VblGraphParams& params) {
  const VblChannels channels = build_vbl_channels(items, params);
  return Graph::from_adjacency(channels.dist + channels.seq + channels.latent_sim);
}

Matrix smooth_features(const Matrix& features, const Graph& g, double a, int m) {
  if (a <= 0.0 || a > 0.5) throw std::invalid_argument("smooth_features: a must lie in (0, 0.5]");
  if (m < 0) throw std::invalid_argument("smooth_features: m must be >= 0");
  if (features.rows() != g.n_vertices) {
    throw std::invalid_argument("smooth_features: feature rows must match vertex count");
  }
  const int n = g.n_vertices;

  // Normalized Laplacian with zero rows for isolated vertices, so they are
  // fixed points of the smoothing.
  Vector dinv_sqrt(n);
  for (int i = 0; i < n; ++i) dinv_sqrt(i) = g.degree(i) > 0.0 ? 1.0 / std::sqrt(g.degree(i)) : 0.0;
  Matrix lap = -(dinv_sqrt.asDiagonal() * g.adjacency * dinv_sqrt.asDiagonal());
  for (int i = 0; i < n; ++i) {
    if (g.degree(i) > 0.0) lap(i, i) += 1.0;
  }

  Matrix out = features;
  for (int step = 0; step < m; ++step) out = out - a * (lap * out);
  return out;
}

std::vector<std::vector<int>> retrieve(const Matrix& query_features,
                                       const Matrix& support_features, int top_k) {
  if (support_features.rows() == 0) throw std::invalid_argument("retrieve: empty support");
  const int n = static_cast<int>(support_features.rows());
  if (top_k < 1) throw std::invalid_argument("retrieve: top_k must be >= 1");
  top_k = std::min(top_k, n);

  const Matrix sim = unit_rows(query_features, "retrieve") *
                     unit_rows(support_features, "retrieve").transpose();
  std::vector<std::vector<int>> out(query_features.rows());
  std::vector<int> order(n);
  for (int q = 0; q < query_features.rows(); ++q) {
    for (int i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int x, int y) { return sim(q, x) > sim(q, y); });
    out[q].assign(order.begin(), order.begin() + top_k);
  }
  return out;
}

double average_precision(const std::vector<int>& ranking, const std::vector<int>& relevant) {
  if (relevant.empty()) throw std::invalid_argument("average_precision: empty relevance set");
  std::vector<int> rel_sorted = relevant;
  std::sort(rel_sorted.begin(), rel_sorted.end());
  double ap = 0.0;
  int hits = 0;
  for (std::size_t k = 0; k < ranking.size(); ++k) {
    const bool is_rel = std::binary_search(rel_sorted.begin(), rel_sorted.end(), ranking[k]);
    if (is_rel) {
      ++hits;
      ap += static_cast<double>(hits) / static_cast<double>(k + 1);
    }
  }
  return ap / relevant.size();
}

double mean_average_precision(const std::vector<std::vector<int>>& rankings,
                              const std::vector<std::vector<int>>& relevance_sets) {
  if (rankings.empty()) throw std::invalid_argument("mean_average_precision: empty query set");
  if (rankings.size() != relevance_sets.size()) {
    throw std::invalid_argument("mean_average_precision: rankings/relevance size mismatch");
  }
  double sum = 0.0;
  int counted = 0;
  for (std::size_t q = 0; q < rankings.size(); ++q) {
    if (relevance_sets[q].empty()) continue;  // disregarded query
    sum += average_precision(rankings[q], relevance_sets[q]);
    ++counted;
  }
  if (counted == 0) throw std::invalid_argument("mean_average_precision: all queries disregarded");
  return sum / counted;
}

LocalizationMetrics localization_metrics(
    const std::vector<std::pair<double, double>>& query_gps,
    const std::vector<std::pair<double, double>>& retrieved_gps, bool planar) {
  if (query_gps.empty() || query_gps.size() != retrieved_gps.size()) {
    throw std::invalid_argument("localization_metrics: need equal nonempty GPS lists");
  }
  std::vector<double> errors(query_gps.size());
  int under = 0;
  for (std::size_t i = 0; i < query_gps.size(); ++i) {
    double e;
    if (planar) {
      const double dx = query_gps[i].first - retrieved_gps[i].first;
      const double dy = query_gps[i].second - retrieved_gps[i].second;
      e = std::sqrt(dx * dx + dy * dy);
    } else {
      e = haversine_m(query_gps[i].first, query_gps[i].second, retrieved_gps[i].first,
                      retrieved_gps[i].second);
    }
    errors[i] = e;
    if (e < 25.0) ++under;  // strict inequality at the 25m boundary
  }
  std::sort(errors.begin(), errors.end());
  const std::size_t n = errors.size();
  const double median =
      n % 2 == 1 ? errors[n / 2] : (errors[n / 2 - 1] + errors[n / 2]) / 2.0;
  return {median, static_cast<double>(under) / n};
}

}  // namespace lg
