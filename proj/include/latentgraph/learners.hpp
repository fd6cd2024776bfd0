#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "latentgraph/graph.hpp"
#include "latentgraph/rng.hpp"
#include "latentgraph/splits.hpp"

namespace lg {

struct TrainReport {
  double best_validation_accuracy = 0.0;
  double test_accuracy_at_best = 0.0;
  int epochs_run = 0;
  std::uint64_t seed = 0;
};

enum class Optimizer { Sgd, Adam };

struct LogisticConfig {
  double l2 = 0.0;
  double learning_rate = 0.001;
  int epochs = 100;
  Optimizer optimizer = Optimizer::Adam;
};

struct LogisticRegressionModel {
  Matrix weights;  // F x C
  Vector bias;     // C

  Matrix logits(const Matrix& x) const;
  // Row-stochastic softmax scores; argmax is invariant to temperature > 0.
  Matrix predict_proba(const Matrix& x, double temperature = 1.0) const;
  std::vector<int> predict(const Matrix& x) const;
};

// Mean cross-entropy + l2 * ||W||_F^2 and its analytic gradient. Exposed so
// tests can check the gradient against central finite differences.
double logistic_loss_and_grad(const Matrix& x, const std::vector<int>& labels, int n_classes,
                              const Matrix& weights, const Vector& bias, double l2,
                              Matrix* grad_weights = nullptr, Vector* grad_bias = nullptr);

LogisticRegressionModel train_logistic(const Matrix& x, const std::vector<int>& labels,
                                       int n_classes, const LogisticConfig& config,
                                       std::uint64_t seed, TrainReport* report = nullptr);

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth);

enum class Placement { None, Pre, Post, Both };

struct OneHiddenConfig {
  int hidden_size = 64;
  double input_dropout = 0.0;
  double edge_dropout = 0.0;
  double l2_hidden = 0.005;
  double learning_rate = 0.01;
  int max_epochs = 10000;
  int patience = 100;
};

struct OneHiddenLayerModel {
  Matrix w1;  // F x hidden
  Vector b1;
  Matrix w2;  // hidden x C
  Vector b2;

  // Dropout-free forward pass.
  Matrix logits(const Matrix& x, const std::optional<Matrix>& s, Placement placement) const;
  std::vector<int> predict(const Matrix& x, const std::optional<Matrix>& s,
                           Placement placement) const;
};

struct OneHiddenGrads {
  Matrix w1;
  Vector b1;
  Matrix w2;
  Vector b2;
};

// Loss and gradient for a fixed forward configuration (dropout already folded
// into x / s by the caller). Loss is averaged over train_rows.
double one_hidden_loss_and_grad(const Matrix& x, const std::vector<int>& labels, int n_classes,
                                const std::vector<int>& train_rows,
                                const std::optional<Matrix>& s, Placement placement,
                                const OneHiddenLayerModel& model, double l2_hidden,
                                OneHiddenGrads* grads = nullptr);

TrainReport train_one_hidden(const Matrix& x, const std::vector<int>& labels, int n_classes,
                             const std::optional<Matrix>& s, Placement placement,
                             const OneHiddenConfig& config, const SplitMasks& masks,
                             std::uint64_t seed, OneHiddenLayerModel* out_model = nullptr);

// Majority vote over the k nearest supports by cosine distance; vote ties go
// to the smallest class index, distance ties to the smallest support index.
std::vector<int> knn_classify(const Matrix& support, const std::vector<int>& support_labels,
                              const Matrix& query, int k);

std::vector<int> ncm_classify(const Matrix& support, const std::vector<int>& support_labels,
                              const Matrix& query);

struct KMeansResult {
  std::vector<int> assignment;
  double inertia = 0.0;
};

KMeansResult kmeans(const Matrix& points, int c, std::uint64_t seed, int max_iter = 300);

double adjusted_mutual_information(const std::vector<int>& labels_a,
                                   const std::vector<int>& labels_b);

}  // namespace lg
