#include "latentgraph/learners.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <stdexcept>
#include <string>

namespace lg {

namespace {

Matrix softmax_rows(const Matrix& logits, double temperature = 1.0) {
  if (temperature <= 0.0) throw std::invalid_argument("softmax: temperature must be > 0");
  Matrix scaled = logits / temperature;
  Matrix out(scaled.rows(), scaled.cols());
  for (int i = 0; i < scaled.rows(); ++i) {
    const double mx = scaled.row(i).maxCoeff();
    Eigen::RowVectorXd e = (scaled.row(i).array() - mx).exp();
    out.row(i) = e / e.sum();
  }
  return out;
}

std::vector<int> argmax_rows(const Matrix& scores) {
  std::vector<int> out(scores.rows());
  for (int i = 0; i < scores.rows(); ++i) {
    int arg = 0;
    scores.row(i).maxCoeff(&arg);
    out[i] = arg;
  }
  return out;
}

void check_labels(const std::vector<int>& labels, int n_classes, Eigen::Index n_rows,
                  const char* what) {
  if (static_cast<Eigen::Index>(labels.size()) != n_rows) {
    throw std::invalid_argument(std::string(what) + ": labels/features size mismatch");
  }
  for (int y : labels) {
    if (y < 0 || y >= n_classes) {
      throw std::invalid_argument(std::string(what) + ": label " + std::to_string(y) +
                                  " outside [0, " + std::to_string(n_classes) + ")");
    }
  }
}

void check_every_class_present(const std::vector<int>& labels, const std::vector<int>& rows,
                               int n_classes, const char* what) {
  std::vector<int> count(n_classes, 0);
  for (int r : rows) ++count[labels[r]];
  for (int c = 0; c < n_classes; ++c) {
    if (count[c] == 0) {
      throw std::invalid_argument(std::string(what) + ": class " + std::to_string(c) +
                                  " has no training example");
    }
  }
}

// Cosine similarity of query rows against support rows; zero rows rejected.
Matrix cosine_cross(const Matrix& query, const Matrix& support, const char* what) {
  auto unit_rows = [&](const Matrix& m) {
    Vector norms = m.rowwise().norm();
    for (int i = 0; i < m.rows(); ++i) {
      if (norms(i) == 0.0) {
        throw std::invalid_argument(std::string(what) + ": zero feature row " + std::to_string(i));
      }
    }
    return Matrix(norms.cwiseInverse().asDiagonal() * m);
  };
  return unit_rows(query) * unit_rows(support).transpose();
}

struct AdamState {
  Matrix mw, vw;
  Vector mb, vb;
  int t = 0;

  void init(Eigen::Index rows, Eigen::Index cols) {
    mw = Matrix::Zero(rows, cols);
    vw = Matrix::Zero(rows, cols);
    mb = Vector::Zero(cols);
    vb = Vector::Zero(cols);
  }

  void step(Matrix& w, Vector& b, const Matrix& gw, const Vector& gb, double lr) {
    constexpr double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    ++t;
    mw = beta1 * mw + (1 - beta1) * gw;
    vw = beta2 * vw + (1 - beta2) * gw.cwiseProduct(gw);
    mb = beta1 * mb + (1 - beta1) * gb;
    vb = beta2 * vb + (1 - beta2) * gb.cwiseProduct(gb);
    const double c1 = 1.0 - std::pow(beta1, t);
    const double c2 = 1.0 - std::pow(beta2, t);
    w -= lr * ((mw / c1).array() / ((vw / c2).array().sqrt() + eps)).matrix();
    b -= lr * ((mb / c1).array() / ((vb / c2).array().sqrt() + eps)).matrix();
  }
};

}  // namespace

Matrix LogisticRegressionModel::logits(const Matrix& x) const {
  return (x * weights).rowwise() + bias.transpose();
}

Matrix LogisticRegressionModel::predict_proba(const Matrix& x, double temperature) const {
  return softmax_rows(logits(x), temperature);
}

std::vector<int> LogisticRegressionModel::predict(const Matrix& x) const {
  return argmax_rows(logits(x));
}

double logistic_loss_and_grad(const Matrix& x, const std::vector<int>& labels, int n_classes,
                              const Matrix& weights, const Vector& bias, double l2,
                              Matrix* grad_weights, Vector* grad_bias) {
  const int n = static_cast<int>(x.rows());
  check_labels(labels, n_classes, x.rows(), "logistic_loss_and_grad");
  const Matrix p = softmax_rows((x * weights).rowwise() + bias.transpose());

  double loss = 0.0;
  Matrix delta = p;  // p - y
  for (int i = 0; i < n; ++i) {
    loss -= std::log(std::max(p(i, labels[i]), 1e-300));
    delta(i, labels[i]) -= 1.0;
  }
  loss = loss / n + l2 * weights.squaredNorm();

  if (grad_weights) *grad_weights = x.transpose() * delta / n + 2.0 * l2 * weights;
  if (grad_bias) *grad_bias = delta.colwise().sum().transpose() / n;
  return loss;
}

LogisticRegressionModel train_logistic(const Matrix& x, const std::vector<int>& labels,
                                       int n_classes, const LogisticConfig& config,
                                       std::uint64_t seed, TrainReport* report) {
  check_labels(labels, n_classes, x.rows(), "train_logistic");
  std::vector<int> all_rows(labels.size());
  for (int i = 0; i < static_cast<int>(labels.size()); ++i) all_rows[i] = i;
  check_every_class_present(labels, all_rows, n_classes, "train_logistic");

  LogisticRegressionModel model;
  model.weights = Matrix::Zero(x.cols(), n_classes);
  model.bias = Vector::Zero(n_classes);

  AdamState adam;
  if (config.optimizer == Optimizer::Adam) adam.init(x.cols(), n_classes);

  Matrix gw;
  Vector gb;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    logistic_loss_and_grad(x, labels, n_classes, model.weights, model.bias, config.l2, &gw, &gb);
    if (config.optimizer == Optimizer::Adam) {
      adam.step(model.weights, model.bias, gw, gb, config.learning_rate);
    } else {
      model.weights -= config.learning_rate * gw;
      model.bias -= config.learning_rate * gb;
    }
  }

  if (report) {
    report->epochs_run = config.epochs;
    report->seed = seed;
    report->best_validation_accuracy = accuracy(model.predict(x), labels);
    report->test_accuracy_at_best = report->best_validation_accuracy;
  }
  return model;
}

double accuracy(const std::vector<int>& predicted, const std::vector<int>& truth) {
  if (predicted.size() != truth.size()) throw std::invalid_argument("accuracy: size mismatch");
  if (predicted.empty()) throw std::invalid_argument("accuracy: empty inputs");
  int hits = 0;
  for (std::size_t i = 0; i < predicted.size(); ++i) hits += predicted[i] == truth[i];
  return static_cast<double>(hits) / predicted.size();
}

Matrix OneHiddenLayerModel::logits(const Matrix& x, const std::optional<Matrix>& s,
                                   Placement placement) const {
  if (placement != Placement::None && !s.has_value()) {
    throw std::invalid_argument("OneHiddenLayerModel: placement requires a diffusion operator");
  }
  Matrix xw = x * w1;
  if (placement == Placement::Pre || placement == Placement::Both) xw = *s * xw;
  Matrix hidden = (xw.rowwise() + b1.transpose()).cwiseMax(0.0);
  Matrix out = (hidden * w2).rowwise() + b2.transpose();
  if (placement == Placement::Post || placement == Placement::Both) out = *s * out;
  return out;
}

std::vector<int> OneHiddenLayerModel::predict(const Matrix& x, const std::optional<Matrix>& s,
                                              Placement placement) const {
  return argmax_rows(logits(x, s, placement));
}

double one_hidden_loss_and_grad(const Matrix& x, const std::vector<int>& labels, int n_classes,
                                const std::vector<int>& train_rows,
                                const std::optional<Matrix>& s, Placement placement,
                                const OneHiddenLayerModel& model, double l2_hidden,
                                OneHiddenGrads* grads) {
  if (placement != Placement::None && !s.has_value()) {
    throw std::invalid_argument("one_hidden_loss_and_grad: placement requires S");
  }
  if (train_rows.empty()) throw std::invalid_argument("one_hidden_loss_and_grad: no train rows");
  check_labels(labels, n_classes, x.rows(), "one_hidden_loss_and_grad");

  const bool pre = placement == Placement::Pre || placement == Placement::Both;
  const bool post = placement == Placement::Post || placement == Placement::Both;

  // (S X) W1 regrouped as S (X W1): the hidden width is far smaller than the
  // feature count, so this avoids the n^2 F product on every step.
  const Matrix xw = x * model.w1;
  const Matrix pre_act = (pre ? Matrix(*s * xw) : xw).rowwise() + model.b1.transpose();
  const Matrix hidden = pre_act.cwiseMax(0.0);
  const Matrix scores = (hidden * model.w2).rowwise() + model.b2.transpose();
  const Matrix out = post ? Matrix(*s * scores) : scores;

  // Softmax cross-entropy on train rows only.
  const int nt = static_cast<int>(train_rows.size());
  Matrix dout = Matrix::Zero(out.rows(), out.cols());
  double loss = 0.0;
  for (int r : train_rows) {
    Eigen::RowVectorXd row = out.row(r);
    const double mx = row.maxCoeff();
    Eigen::RowVectorXd e = (row.array() - mx).exp();
    Eigen::RowVectorXd p = e / e.sum();
    loss -= std::log(std::max(p(labels[r]), 1e-300));
    dout.row(r) = p / nt;
    dout(r, labels[r]) -= 1.0 / nt;
  }
  loss = loss / nt + l2_hidden * model.w1.squaredNorm();

  if (grads) {
    const Matrix dscores = post ? Matrix(s->transpose() * dout) : dout;
    grads->w2 = hidden.transpose() * dscores;
    grads->b2 = dscores.colwise().sum().transpose();
    Matrix dpre = dscores * model.w2.transpose();
    dpre = (pre_act.array() > 0.0).select(dpre, 0.0);
    grads->w1 = x.transpose() * (pre ? Matrix(s->transpose() * dpre) : dpre) +
                2.0 * l2_hidden * model.w1;
    grads->b1 = dpre.colwise().sum().transpose();
  }
  return loss;
}

namespace {

Matrix dropout_matrix(const Matrix& m, double p, Rng& rng) {
  if (p <= 0.0) return m;
  const double scale = 1.0 / (1.0 - p);
  Matrix out = m;
  for (int i = 0; i < out.rows(); ++i) {
    for (int j = 0; j < out.cols(); ++j) {
      out(i, j) = rng.next_double() < p ? 0.0 : out(i, j) * scale;
    }
  }
  return out;
}

// Inverted dropout over the nonzero entries of a diffusion operator.
Matrix edge_dropout_matrix(const Matrix& s, double p, Rng& rng) {
  if (p <= 0.0) return s;
  const double scale = 1.0 / (1.0 - p);
  Matrix out = s;
  for (int i = 0; i < out.rows(); ++i) {
    for (int j = 0; j < out.cols(); ++j) {
      if (out(i, j) != 0.0) out(i, j) = rng.next_double() < p ? 0.0 : out(i, j) * scale;
    }
  }
  return out;
}

double subset_accuracy(const std::vector<int>& pred, const std::vector<int>& labels,
                       const std::vector<int>& rows) {
  if (rows.empty()) return 0.0;
  int hits = 0;
  for (int r : rows) hits += pred[r] == labels[r];
  return static_cast<double>(hits) / rows.size();
}

}  // namespace

TrainReport train_one_hidden(const Matrix& x, const std::vector<int>& labels, int n_classes,
                             const std::optional<Matrix>& s, Placement placement,
                             const OneHiddenConfig& config, const SplitMasks& masks,
                             std::uint64_t seed, OneHiddenLayerModel* out_model) {
  if (placement != Placement::None && !s.has_value()) {
    throw std::invalid_argument("train_one_hidden: placement requires a diffusion operator");
  }
  if (config.input_dropout < 0.0 || config.input_dropout >= 1.0 || config.edge_dropout < 0.0 ||
      config.edge_dropout >= 1.0) {
    throw std::invalid_argument("train_one_hidden: dropout rates must lie in [0, 1)");
  }
  if (masks.train.empty()) throw std::invalid_argument("train_one_hidden: empty train mask");
  check_labels(labels, n_classes, x.rows(), "train_one_hidden");
  check_every_class_present(labels, masks.train, n_classes, "train_one_hidden");

  Rng rng(seed);
  const int f = static_cast<int>(x.cols());
  OneHiddenLayerModel model;
  model.w1 = Matrix::Zero(f, config.hidden_size);
  model.b1 = Vector::Zero(config.hidden_size);
  model.w2 = Matrix::Zero(config.hidden_size, n_classes);
  model.b2 = Vector::Zero(n_classes);
  const double scale1 = std::sqrt(2.0 / (f + config.hidden_size));
  const double scale2 = std::sqrt(2.0 / (config.hidden_size + n_classes));
  for (int i = 0; i < f; ++i)
    for (int j = 0; j < config.hidden_size; ++j) model.w1(i, j) = scale1 * rng.next_gaussian();
  for (int i = 0; i < config.hidden_size; ++i)
    for (int j = 0; j < n_classes; ++j) model.w2(i, j) = scale2 * rng.next_gaussian();

  const bool needs_s = placement != Placement::None;
  OneHiddenLayerModel best = model;
  TrainReport report;
  report.seed = seed;
  double best_valid = -1.0;
  int best_epoch = -1;
  int since_best = 0;

  OneHiddenGrads g;
  for (int epoch = 0; epoch < config.max_epochs; ++epoch) {
    // Masks are resampled every step and disabled at evaluation time.
    const Matrix x_step =
        config.input_dropout > 0.0 ? dropout_matrix(x, config.input_dropout, rng) : x;
    std::optional<Matrix> s_step;
    if (needs_s) {
      s_step = config.edge_dropout > 0.0 ? edge_dropout_matrix(*s, config.edge_dropout, rng) : *s;
    }
    one_hidden_loss_and_grad(x_step, labels, n_classes, masks.train, s_step, placement, model,
                             config.l2_hidden, &g);
    model.w1 -= config.learning_rate * g.w1;
    model.b1 -= config.learning_rate * g.b1;
    model.w2 -= config.learning_rate * g.w2;
    model.b2 -= config.learning_rate * g.b2;
    report.epochs_run = epoch + 1;

    const std::vector<int> pred = model.predict(x, s, placement);
    const double valid_acc =
        masks.valid.empty() ? subset_accuracy(pred, labels, masks.train)
                            : subset_accuracy(pred, labels, masks.valid);
    if (valid_acc > best_valid) {
      best_valid = valid_acc;
      best = model;
      best_epoch = epoch;
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }

  const std::vector<int> best_pred = best.predict(x, s, placement);
  report.best_validation_accuracy = best_valid;
  report.test_accuracy_at_best = subset_accuracy(best_pred, labels, masks.test);
  (void)best_epoch;
  if (out_model) *out_model = best;
  return report;
}

std::vector<int> knn_classify(const Matrix& support, const std::vector<int>& support_labels,
                              const Matrix& query, int k) {
  const int n = static_cast<int>(support.rows());
  if (n == 0) throw std::invalid_argument("knn_classify: empty support");
  if (static_cast<int>(support_labels.size()) != n) {
    throw std::invalid_argument("knn_classify: labels/support size mismatch");
  }
  if (k < 1 || k > n) throw std::invalid_argument("knn_classify: k must lie in [1, support size]");

  const Matrix sim = cosine_cross(query, support, "knn_classify");
  std::vector<int> out(query.rows());
  std::vector<int> order(n);
  for (int q = 0; q < query.rows(); ++q) {
    for (int i = 0; i < n; ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return sim(q, a) > sim(q, b); });
    std::map<int, int> votes;
    for (int i = 0; i < k; ++i) ++votes[support_labels[order[i]]];
    int best_class = -1, best_count = -1;
    for (const auto& [cls, count] : votes) {
      if (count > best_count) {  // map iterates classes ascending: ties keep the smaller
        best_class = cls;
        best_count = count;
      }
    }
    out[q] = best_class;
  }
  return out;
}

std::vector<int> ncm_classify(const Matrix& support, const std::vector<int>& support_labels,
                              const Matrix& query) {
  const int n = static_cast<int>(support.rows());
  if (n == 0) throw std::invalid_argument("ncm_classify: empty support");
  if (static_cast<int>(support_labels.size()) != n) {
    throw std::invalid_argument("ncm_classify: labels/support size mismatch");
  }
  const int n_classes = *std::max_element(support_labels.begin(), support_labels.end()) + 1;
  Matrix centroids = Matrix::Zero(n_classes, support.cols());
  std::vector<int> counts(n_classes, 0);
  for (int i = 0; i < n; ++i) {
    centroids.row(support_labels[i]) += support.row(i);
    ++counts[support_labels[i]];
  }
  for (int c = 0; c < n_classes; ++c) {
    if (counts[c] == 0) {
      throw std::invalid_argument("ncm_classify: class " + std::to_string(c) + " is empty");
    }
    centroids.row(c) /= counts[c];
  }
  const Matrix sim = cosine_cross(query, centroids, "ncm_classify");
  return argmax_rows(sim);
}

KMeansResult kmeans(const Matrix& points, int c, std::uint64_t seed, int max_iter) {
  const int n = static_cast<int>(points.rows());
  if (c < 1 || c > n) throw std::invalid_argument("kmeans: need 1 <= c <= n");

  Rng rng(seed);
  // k-means++ seeding.
  Matrix centers(c, points.cols());
  std::vector<double> d2(n, std::numeric_limits<double>::infinity());
  centers.row(0) = points.row(static_cast<int>(rng.next_below(n)));
  for (int j = 1; j < c; ++j) {
    double total = 0.0;
    for (int i = 0; i < n; ++i) {
      const double d = (points.row(i) - centers.row(j - 1)).squaredNorm();
      d2[i] = std::min(d2[i], d);
      total += d2[i];
    }
    int chosen = 0;
    if (total > 0.0) {
      double target = rng.next_double() * total;
      for (int i = 0; i < n; ++i) {
        target -= d2[i];
        if (target <= 0.0) {
          chosen = i;
          break;
        }
      }
    } else {
      chosen = static_cast<int>(rng.next_below(n));
    }
    centers.row(j) = points.row(chosen);
  }

  std::vector<int> assignment(n, 0);
  for (int iter = 0; iter < max_iter; ++iter) {
    bool changed = false;
    for (int i = 0; i < n; ++i) {
      int best = 0;
      double best_d = (points.row(i) - centers.row(0)).squaredNorm();
      for (int j = 1; j < c; ++j) {
        const double d = (points.row(i) - centers.row(j)).squaredNorm();
        if (d < best_d) {
          best_d = d;
          best = j;
        }
      }
      if (assignment[i] != best) {
        assignment[i] = best;
        changed = true;
      }
    }
    Matrix sums = Matrix::Zero(c, points.cols());
    std::vector<int> counts(c, 0);
    for (int i = 0; i < n; ++i) {
      sums.row(assignment[i]) += points.row(i);
      ++counts[assignment[i]];
    }
    for (int j = 0; j < c; ++j) {
      if (counts[j] > 0) {
        centers.row(j) = sums.row(j) / counts[j];
      } else {
        // Re-seed an empty cluster with the point farthest from its center.
        int far = 0;
        double far_d = -1.0;
        for (int i = 0; i < n; ++i) {
          const double d = (points.row(i) - centers.row(assignment[i])).squaredNorm();
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        centers.row(j) = points.row(far);
        assignment[far] = j;
        changed = true;
      }
    }
    if (!changed && iter > 0) break;
  }

  double inertia = 0.0;
  for (int i = 0; i < n; ++i) inertia += (points.row(i) - centers.row(assignment[i])).squaredNorm();
  return {assignment, inertia};
}

double adjusted_mutual_information(const std::vector<int>& labels_a,
                                   const std::vector<int>& labels_b) {
  if (labels_a.empty() || labels_a.size() != labels_b.size()) {
    throw std::invalid_argument("adjusted_mutual_information: need equal nonempty inputs");
  }
  const int n = static_cast<int>(labels_a.size());

  std::map<int, int> ida, idb;
  for (int v : labels_a) ida.emplace(v, static_cast<int>(ida.size()));
  for (int v : labels_b) idb.emplace(v, static_cast<int>(idb.size()));
  const int ra = static_cast<int>(ida.size());
  const int rb = static_cast<int>(idb.size());
  if (ra == 1 && rb == 1) return 1.0;  // both trivial partitions agree completely

  Matrix cont = Matrix::Zero(ra, rb);
  for (int i = 0; i < n; ++i) cont(ida[labels_a[i]], idb[labels_b[i]]) += 1.0;
  Vector a = cont.rowwise().sum();
  Vector b = cont.colwise().sum().transpose();

  double mi = 0.0;
  for (int i = 0; i < ra; ++i) {
    for (int j = 0; j < rb; ++j) {
      const double nij = cont(i, j);
      if (nij > 0.0) mi += nij / n * std::log(n * nij / (a(i) * b(j)));
    }
  }
  double ha = 0.0, hb = 0.0;
  for (int i = 0; i < ra; ++i) ha -= a(i) / n * std::log(a(i) / n);
  for (int j = 0; j < rb; ++j) hb -= b(j) / n * std::log(b(j) / n);

  // Expected MI under the hypergeometric permutation model.
  auto lg = [](double v) { return std::lgamma(v + 1.0); };
  double emi = 0.0;
  for (int i = 0; i < ra; ++i) {
    for (int j = 0; j < rb; ++j) {
      const int lo = std::max(1, static_cast<int>(a(i) + b(j)) - n);
      const int hi = static_cast<int>(std::min(a(i), b(j)));
      for (int nij = lo; nij <= hi; ++nij) {
        const double log_term = lg(a(i)) + lg(b(j)) + lg(n - a(i)) + lg(n - b(j)) - lg(n) -
                                lg(nij) - lg(a(i) - nij) - lg(b(j) - nij) -
                                lg(n - a(i) - b(j) + nij);
        emi += nij / static_cast<double>(n) * std::log(n * nij / (a(i) * b(j))) *
               std::exp(log_term);
      }
    }
  }

  const double normalizer = 0.5 * (ha + hb);
  double denominator = normalizer - emi;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (denominator < 0.0) denominator = std::min(denominator, -eps);
  else denominator = std::max(denominator, eps);
  return (mi - emi) / denominator;
}

}  // namespace lg
