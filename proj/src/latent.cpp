#include "latentgraph/latent.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>

#include "latentgraph/learners.hpp"
#include "latentgraph/spectral.hpp"

namespace lg {

Matrix per_class_filter(const Matrix& features, const std::vector<int>& labels,
                        const SpectralResponseFilter& filter, int k) {
  const int n = static_cast<int>(features.rows());
  if (static_cast<int>(labels.size()) != n) {
    throw std::invalid_argument("per_class_filter: labels/features size mismatch");
  }
  const int n_classes = n ? *std::max_element(labels.begin(), labels.end()) + 1 : 0;

  Matrix out = features;
  for (int c = 0; c < n_classes; ++c) {
    std::vector<int> rows;
    for (int i = 0; i < n; ++i) {
      if (labels[i] == c) rows.push_back(i);
    }
    if (rows.empty()) continue;
    if (rows.size() == 1) {
      std::cerr << "per_class_filter: warning: class " << c << " is a singleton, passthrough\n";
      continue;
    }
    Matrix block(rows.size(), features.cols());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      block.row(static_cast<Eigen::Index>(i)) = features.row(rows[i]);
    }

    const Matrix sim = similarity_matrix(block, SimilarityMeasure::cosine());
    const int class_size = static_cast<int>(rows.size());
    const Graph g = (k <= 0 || k >= class_size - 1)
                        ? dense_graph_from_similarity(sim, 0.0)
                        : knn_sparsify_symmetrize(sim, k, 0.0);
    const LaplacianKind kind =
        filter.expected_laplacian().value_or(LaplacianKind::SymmetricNormalized);
    const SpectralDecomposition dec = eigendecompose(g, kind);
    const Matrix filtered = apply_spectral(filter, block, dec);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      out.row(rows[i]) = filtered.row(static_cast<Eigen::Index>(i));
    }
  }
  return out;
}

FewshotClassifier fewshot_classifier_from_name(const std::string& name) {
  if (name == "1nn") return FewshotClassifier::OneNN;
  if (name == "ncm") return FewshotClassifier::Ncm;
  if (name == "lr") return FewshotClassifier::Lr;
  if (name == "concat_lr") return FewshotClassifier::ConcatLr;
  throw std::invalid_argument("unknown few-shot classifier '" + name + "'");
}

namespace {

LogisticConfig fewshot_lr_config(int n_support) {
  LogisticConfig cfg;
  cfg.l2 = 0.5 / n_support;  // inverse regularization strength 1.0
  cfg.learning_rate = 0.1;
  cfg.epochs = 200;
  cfg.optimizer = Optimizer::Adam;
  return cfg;
}

}  // namespace

double fewshot_episode(const Matrix& support, const std::vector<int>& support_labels,
                       const Matrix& query, const std::vector<int>& query_labels,
                       const SpectralResponseFilter& filter, FewshotClassifier classifier,
                       int ways, int shots) {
  if (support.rows() != static_cast<Eigen::Index>(support_labels.size()) ||
      query.rows() != static_cast<Eigen::Index>(query_labels.size())) {
    throw std::invalid_argument("fewshot_episode: label/feature size mismatch");
  }
  if (support.rows() != static_cast<Eigen::Index>(ways) * shots) {
    throw std::invalid_argument("fewshot_episode: support must hold ways*shots rows");
  }
  std::vector<int> counts(ways, 0);
  for (int y : support_labels) {
    if (y < 0 || y >= ways) throw std::invalid_argument("fewshot_episode: bad support label");
    ++counts[y];
  }
  for (int c = 0; c < ways; ++c) {
    if (counts[c] != shots) {
      throw std::invalid_argument("fewshot_episode: class " + std::to_string(c) + " has " +
                                  std::to_string(counts[c]) + " shots, expected " +
                                  std::to_string(shots));
    }
  }

  // Fully connected class graphs in the few-shot regime (k = class size - 1).
  const Matrix filtered = per_class_filter(support, support_labels, filter, 0);

  switch (classifier) {
    case FewshotClassifier::OneNN:
      return accuracy(knn_classify(filtered, support_labels, query, 1), query_labels);
    case FewshotClassifier::Ncm:
      return accuracy(ncm_classify(filtered, support_labels, query), query_labels);
    case FewshotClassifier::Lr: {
      const LogisticRegressionModel model = train_logistic(
          filtered, support_labels, ways, fewshot_lr_config(static_cast<int>(support.rows())), 0);
      return accuracy(model.predict(query), query_labels);
    }
    case FewshotClassifier::ConcatLr: {
      Matrix train(support.rows(), support.cols() * 2);
      train << filtered, support;
      Matrix q(query.rows(), query.cols() * 2);
      q << query, query;
      const LogisticRegressionModel model = train_logistic(
          train, support_labels, ways, fewshot_lr_config(static_cast<int>(support.rows())), 0);
      return accuracy(model.predict(q), query_labels);
    }
  }
  throw std::logic_error("fewshot_episode: unknown classifier");
}

FewshotEpisodeIndices sample_fewshot_episode(const std::vector<int>& labels, int n_classes,
                                             int ways, int shots, int queries_per_class,
                                             Rng& rng) {
  if (ways > n_classes) throw std::invalid_argument("sample_fewshot_episode: ways > classes");
  std::vector<std::vector<int>> by_class(n_classes);
  for (int i = 0; i < static_cast<int>(labels.size()); ++i) by_class[labels[i]].push_back(i);

  FewshotEpisodeIndices ep;
  ep.classes = rng.sample_without_replacement(n_classes, ways);
  for (int w = 0; w < ways; ++w) {
    const auto& members = by_class[ep.classes[w]];
    const int need = shots + queries_per_class;
    if (static_cast<int>(members.size()) < need) {
      throw std::invalid_argument("sample_fewshot_episode: class " +
                                  std::to_string(ep.classes[w]) + " has too few samples");
    }
    const std::vector<int> picks = rng.sample_without_replacement(
        static_cast<int>(members.size()), need);
    for (int i = 0; i < shots; ++i) {
      ep.support_rows.push_back(members[picks[i]]);
      ep.support_labels.push_back(w);
    }
    for (int i = shots; i < need; ++i) {
      ep.query_rows.push_back(members[picks[i]]);
      ep.query_labels.push_back(w);
    }
  }
  return ep;
}

namespace {

// Label-signal smoothness of one sampled subset on one layer, normalized by
// the 2MCk edge-mass bound.
double layer_normalized_smoothness(const Matrix& features, const std::vector<int>& labels,
                                   const std::vector<int>& rows, int n_classes, int k) {
  const int m = static_cast<int>(rows.size());
  Matrix block(m, features.cols());
  for (int i = 0; i < m; ++i) block.row(i) = features.row(rows[i]);

  const Matrix sim = similarity_matrix(block, SimilarityMeasure::cosine());
  const Graph g = k < m - 1 ? knn_sparsify_symmetrize(sim, k, 0.0)
                            : dense_graph_from_similarity(sim, 0.0);
  const Matrix lap = laplacian(g, LaplacianKind::Combinatorial);

  Matrix indicator = Matrix::Zero(m, n_classes);
  for (int i = 0; i < m; ++i) indicator(i, labels[rows[i]]) = 1.0;

  // 2MCk, with k capped at the fully connected degree. m == M * C here.
  const double bound = 2.0 * m * std::min(k, m - 1);
  const double normalized = smoothness_total(indicator, lap) / bound;
  if (normalized < -1e-9 || normalized > 1.0 + 1e-9) {
    throw std::logic_error("layer smoothness outside the 2MCk normalization bound");
  }
  return std::clamp(normalized, 0.0, 1.0);
}

std::vector<std::vector<int>> resample_rows(const std::vector<int>& labels, int n_classes,
                                            int samples_per_class, int n_resamples,
                                            std::uint64_t seed) {
  std::vector<std::vector<int>> by_class(n_classes);
  for (int i = 0; i < static_cast<int>(labels.size()); ++i) {
    if (labels[i] < 0 || labels[i] >= n_classes) {
      throw std::invalid_argument("smoothness_gap: label outside [0, C)");
    }
    by_class[labels[i]].push_back(i);
  }
  for (int c = 0; c < n_classes; ++c) {
    if (static_cast<int>(by_class[c].size()) < samples_per_class) {
      throw std::invalid_argument("smoothness_gap: class " + std::to_string(c) +
                                  " has fewer than M samples");
    }
  }
  std::vector<std::vector<int>> out;
  for (int r = 0; r < n_resamples; ++r) {
    Rng rng(Rng::derive_key(seed, static_cast<std::uint64_t>(r)));
    std::vector<int> rows;
    for (int c = 0; c < n_classes; ++c) {
      const std::vector<int> picks = rng.sample_without_replacement(
          static_cast<int>(by_class[c].size()), samples_per_class);
      for (int p : picks) rows.push_back(by_class[c][p]);
    }
    std::sort(rows.begin(), rows.end());
    out.push_back(std::move(rows));
  }
  return out;
}

}  // namespace

std::vector<std::pair<std::string, double>> smoothness_evolution(
    const std::vector<LayerFeatures>& layers, const std::vector<int>& labels,
    int samples_per_class, int n_classes, int k, int n_resamples, std::uint64_t seed) {
  if (layers.empty()) throw std::invalid_argument("smoothness_evolution: no layers");
  if (n_resamples < 1) throw std::invalid_argument("smoothness_evolution: need >= 1 resample");
  if (k < 1) throw std::invalid_argument("smoothness_evolution: k must be >= 1");
  for (const auto& layer : layers) {
    if (layer.features.rows() != static_cast<Eigen::Index>(labels.size())) {
      throw std::invalid_argument("smoothness_evolution: layer '" + layer.name +
                                  "' row count differs from labels");
    }
  }

  const auto resamples = resample_rows(labels, n_classes, samples_per_class, n_resamples, seed);
  std::vector<std::pair<std::string, double>> curve;
  for (const auto& layer : layers) {
    double acc = 0.0;
    for (const auto& rows : resamples) {
      acc += layer_normalized_smoothness(layer.features, labels, rows, n_classes, k);
    }
    curve.emplace_back(layer.name, acc / n_resamples);
  }
  return curve;
}

SmoothnessGapReport smoothness_gap(const std::vector<LayerFeatures>& layers,
                                   const std::vector<int>& labels, int samples_per_class,
                                   int n_classes, int k, int n_resamples, std::uint64_t seed) {
  if (layers.size() < 2) throw std::invalid_argument("smoothness_gap: need at least 2 layers");
  SmoothnessGapReport report;
  report.per_layer_smoothness =
      smoothness_evolution(layers, labels, samples_per_class, n_classes, k, n_resamples, seed);
  const double last = report.per_layer_smoothness.back().second;
  const double penultimate =
      report.per_layer_smoothness[report.per_layer_smoothness.size() - 2].second;
  report.gap = std::abs(last - penultimate);
  report.normalization_bound = 2.0 * samples_per_class * n_classes * k;
  return report;
}

}  // namespace lg
