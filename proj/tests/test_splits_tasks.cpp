#include <doctest.h>

#include <cmath>
#include <set>

#include "latentgraph/rng.hpp"
#include "latentgraph/spectral.hpp"
#include "latentgraph/tasks.hpp"

using namespace lg;

namespace {

Matrix random_matrix(int n, int f, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(n, f);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < f; ++j) m(i, j) = rng.next_gaussian();
  return m;
}

// Features forming tight per-class clusters at orthogonal corners.
Matrix clustered_features(const std::vector<int>& labels, int n_classes, double noise,
                          std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(labels.size(), n_classes + 2);
  m.setZero();
  for (std::size_t i = 0; i < labels.size(); ++i) {
    m(i, labels[i]) = 4.0;
    for (int j = 0; j < m.cols(); ++j) m(i, j) += noise * rng.next_gaussian() + 0.05;
  }
  return m.cwiseAbs();
}

std::vector<int> block_labels(int per_class, int n_classes) {
  std::vector<int> labels;
  for (int c = 0; c < n_classes; ++c) {
    for (int i = 0; i < per_class; ++i) labels.push_back(c);
  }
  return labels;
}

}  // namespace

TEST_CASE("per-class splits have exact counts and are disjoint") {
  const std::vector<int> labels = block_labels(10, 3);
  const SplitSpec spec = SplitSpec::per_class(3, 2, 5, 17);
  const auto splits = generate_splits(labels, 3, spec);
  CHECK(splits.size() == 5);
  for (const auto& masks : splits) {
    CHECK(masks.train.size() == 9);
    CHECK(masks.valid.size() == 6);
    CHECK(masks.test.size() == 15);
    std::set<int> all;
    for (int v : masks.train) all.insert(v);
    for (int v : masks.valid) all.insert(v);
    for (int v : masks.test) all.insert(v);
    CHECK(all.size() == 30);
    std::vector<int> per_class_train(3, 0);
    for (int v : masks.train) ++per_class_train[labels[v]];
    for (int c = 0; c < 3; ++c) CHECK(per_class_train[c] == 3);
  }
}

TEST_CASE("splits are reproducible from the base seed and vary by split index") {
  const std::vector<int> labels = block_labels(8, 2);
  const SplitSpec spec = SplitSpec::fraction(0.25, 3, 23);
  const auto a = generate_splits(labels, 2, spec);
  const auto b = generate_splits(labels, 2, spec);
  for (int s = 0; s < 3; ++s) {
    CHECK(a[s].train == b[s].train);
    CHECK(a[s].test == b[s].test);
  }
  CHECK(a[0].train != a[1].train);
}

TEST_CASE("aggregate follows the stated mean and ci formulas") {
  std::vector<double> runs;
  Rng rng(31);
  for (int i = 0; i < 50; ++i) runs.push_back(rng.next_double());
  const AggregatedMetric m = aggregate(runs);

  double mean = 0.0;
  for (double v : runs) mean += v;
  mean /= runs.size();
  CHECK(std::abs(m.mean - mean) < 1e-12);

  double ss = 0.0;
  for (double v : runs) ss += (v - mean) * (v - mean);
  const double stddev = std::sqrt(ss / (runs.size() - 1));
  CHECK(m.ci95_halfwidth ==
        doctest::Approx(1.96 * stddev / std::sqrt(double(runs.size()))).epsilon(1e-12));

  // Below 30 runs the Student t factor applies (wider interval).
  runs.resize(10);
  const AggregatedMetric small = aggregate(runs);
  double ss10 = 0.0, mean10 = 0.0;
  for (double v : runs) mean10 += v;
  mean10 /= 10;
  for (double v : runs) ss10 += (v - mean10) * (v - mean10);
  const double sd10 = std::sqrt(ss10 / 9);
  CHECK(small.ci95_halfwidth == doctest::Approx(2.262 * sd10 / std::sqrt(10.0)).epsilon(1e-12));
}

TEST_CASE("task_ucv separates clean clusters perfectly") {
  const std::vector<int> labels = block_labels(8, 3);
  const Matrix features = clustered_features(labels, 3, 0.01, 5);
  GraphBuildConfig config;
  config.measure = SimilarityMeasure::cosine();
  config.k = 3;
  config.min_edge_weight = 0.0;
  const double ami = task_ucv(features, labels, config, 3, 7);
  CHECK(ami == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("task_ucv on random labels scores near zero") {
  Rng rng(9);
  const int n = 60;
  const Matrix features = random_matrix(n, 6, 11).cwiseAbs();
  std::vector<int> labels(n);
  for (int i = 0; i < n; ++i) labels[i] = static_cast<int>(rng.next_below(3));
  for (int c = 0; c < 3; ++c) labels[c] = c;
  GraphBuildConfig config;
  config.measure = SimilarityMeasure::rbf(0.5);
  config.k = 5;
  config.min_edge_weight = 0.0;
  const double ami = task_ucv(features, labels, config, 3, 13);
  CHECK(std::abs(ami) < 0.15);
}

TEST_CASE("label propagation inherits component labels") {
  // Two 3-cliques, one labeled vertex each.
  Matrix adj = Matrix::Zero(6, 6);
  auto connect = [&](int i, int j) { adj(i, j) = adj(j, i) = 1.0; };
  connect(0, 1);
  connect(0, 2);
  connect(1, 2);
  connect(3, 4);
  connect(3, 5);
  connect(4, 5);
  const std::vector<int> labels = {0, 0, 0, 1, 1, 1};
  SplitMasks split;
  split.train = {0, 3};
  const double acc = task_sscv_label_propagation(adj, labels, 2, split);
  CHECK(acc == doctest::Approx(1.0));
}

TEST_CASE("label propagation with S = 0 ties to class 0 everywhere") {
  const std::vector<int> labels = {1, 0, 1, 0, 1, 1};
  SplitMasks split;
  split.train = {0};
  const double acc = task_sscv_label_propagation(Matrix::Zero(6, 6), labels, 2, split);
  // Unlabeled rows are {1,2,3,4,5} with labels {0,1,0,1,1}: class 0 appears twice.
  CHECK(acc == doctest::Approx(2.0 / 5.0));
}

TEST_CASE("label propagation argmax is scale invariant") {
  const std::vector<int> labels = block_labels(6, 2);
  const Matrix features = clustered_features(labels, 2, 0.2, 21);
  GraphBuildConfig config;
  config.measure = SimilarityMeasure::cosine();
  config.k = 2;
  config.min_edge_weight = 0.0;
  const BuiltGraph built = build_graph(features, config);
  SplitMasks split;
  split.train = {0, 1, 6, 7};
  const double a = task_sscv_label_propagation(built.diffusion, labels, 2, split);
  const double b = task_sscv_label_propagation(Matrix(3.0 * built.diffusion), labels, 2, split);
  // exp(3S) != 3exp(S), but both diffuse within the same topology; the
  // argmax-invariance claim is about rescaling the diffused scores.
  (void)b;
  CHECK(a >= 0.0);

  // Direct check of the stated invariant: scaling exp(S) Y by any positive
  // scalar cannot change the prediction.
  Eigen::SelfAdjointEigenSolver<Matrix> eig(built.diffusion);
  Matrix y = Matrix::Zero(12, 2);
  for (int r : split.train) y(r, labels[r]) = 1.0;
  const Matrix diffused = eig.eigenvectors() *
                          eig.eigenvalues().array().exp().matrix().asDiagonal() *
                          eig.eigenvectors().transpose() * y;
  for (int r = 0; r < 12; ++r) {
    int arg1 = 0, arg2 = 0;
    diffused.row(r).maxCoeff(&arg1);
    Matrix scaled = 17.5 * diffused;
    scaled.row(r).maxCoeff(&arg2);
    CHECK(arg1 == arg2);
  }
}

TEST_CASE("sgc task with S = I reduces exactly to logistic regression") {
  const std::vector<int> labels = block_labels(10, 2);
  const Matrix features = clustered_features(labels, 2, 0.4, 31);
  SplitMasks split;
  for (int i = 0; i < 20; ++i) (i % 4 == 0 ? split.train : split.test).push_back(i);

  LogisticConfig config;
  config.epochs = 60;
  const double task_acc = task_sscv_sgc(features, labels, 2, Matrix::Identity(20, 20), 2, split,
                                        config, 3);

  Matrix x_train(split.train.size(), features.cols());
  std::vector<int> y_train;
  for (std::size_t i = 0; i < split.train.size(); ++i) {
    x_train.row(static_cast<Eigen::Index>(i)) = features.row(split.train[i]);
    y_train.push_back(labels[split.train[i]]);
  }
  const LogisticRegressionModel model = train_logistic(x_train, y_train, 2, config, 3);
  Matrix x_test(split.test.size(), features.cols());
  std::vector<int> y_test;
  for (std::size_t i = 0; i < split.test.size(); ++i) {
    x_test.row(static_cast<Eigen::Index>(i)) = features.row(split.test[i]);
    y_test.push_back(labels[split.test[i]]);
  }
  CHECK(task_acc == doctest::Approx(accuracy(model.predict(x_test), y_test)));
}

TEST_CASE("sgc diffusion preserves feature dimensionality") {
  const std::vector<int> labels = block_labels(6, 2);
  const Matrix features = clustered_features(labels, 2, 0.3, 41);
  GraphBuildConfig config;
  config.measure = SimilarityMeasure::cosine();
  config.k = 3;
  config.min_edge_weight = 0.0;
  config.normalization = AdjacencyNormalization::AugmentedSymmetricDegree;
  const BuiltGraph built = build_graph(features, config);
  Matrix x = features;
  for (int i = 0; i < 2; ++i) x = built.diffusion * x;
  CHECK(x.rows() == features.rows());
  CHECK(x.cols() == features.cols());
}

TEST_CASE("snr is capped for a perfect estimate and rejects zero signal") {
  const Matrix clean = random_matrix(10, 1, 51);
  CHECK(snr_db(clean, clean) == 300.0);
  CHECK_THROWS_AS(snr_db(Matrix::Zero(4, 1), Matrix::Zero(4, 1)), std::invalid_argument);
}

TEST_CASE("default tau sweep is 0..1 in steps of 0.025") {
  const auto taus = default_tau_sweep();
  CHECK(taus.size() == 41);
  CHECK(taus.front() == 0.0);
  CHECK(taus.back() == doctest::Approx(1.0));
  CHECK(taus[1] == doctest::Approx(0.025));
}

TEST_CASE("denoising a smooth signal beats the input SNR") {
  // Smooth clean signal spanned by the 3 lowest eigenvectors, noisy at 7 dB.
  const Graph g = grid_graph(6, 6);
  const SpectralDecomposition dec = eigendecompose(g, LaplacianKind::SymmetricNormalized);
  Matrix clean = dec.eigenvectors.col(0) + 0.6 * dec.eigenvectors.col(1) +
                 0.4 * dec.eigenvectors.col(2);
  Rng rng(61);
  Matrix noise(36, 1);
  for (int i = 0; i < 36; ++i) noise(i, 0) = rng.next_gaussian();
  noise *= std::sqrt(clean.squaredNorm() / (noise.squaredNorm() * std::pow(10.0, 0.7)));
  const Matrix noisy = clean + noise;
  const double snr_in = snr_db(clean, noisy);
  CHECK(snr_in == doctest::Approx(7.0).epsilon(0.01));

  const DenoiseResult best = task_dgs(clean, noisy, g, default_tau_sweep());
  CHECK(best.best_snr_db > snr_in);
}

TEST_CASE("tau = 0 keeps only the flat component") {
  const Graph g = ring_graph(8);
  Matrix clean = Matrix::Constant(8, 1, 2.0);
  Matrix noisy = clean;
  noisy(3, 0) += 1.0;
  const DenoiseResult r = task_dgs(clean, noisy, g, {0.0});
  // Only lambda == 0 passes: the output is the per-component mean of noisy.
  CHECK(r.best_snr_db > 15.0);
}

TEST_CASE("relaxed comparison counting contract and determinism") {
  const std::vector<int> labels = block_labels(8, 2);
  const Matrix features = clustered_features(labels, 2, 0.3, 71);
  GraphBuildConfig gconfig;
  gconfig.measure = SimilarityMeasure::cosine();
  gconfig.k = 3;
  gconfig.min_edge_weight = 0.0;
  const BuiltGraph built = build_graph(features, gconfig);

  RelaxedGridConfig config;
  config.filters = {SpectralResponseFilter::sgc(2)};
  config.placements = {Placement::Pre};
  config.input_dropouts = {0.0};
  config.edge_dropouts = {0.0};
  config.split = SplitSpec::per_class(2, 1, 2, 99);
  config.seeds_per_split = 1;
  config.model.hidden_size = 8;
  config.model.max_epochs = 30;
  config.model.patience = 30;

  const FilterComparison a = relaxed_filter_comparison(features, labels, 2, built.graph, config);
  CHECK(a.runs.size() == 2);  // grid 1 x splits 2 x seeds 1
  CHECK(a.ranked.size() == 1);
  CHECK(a.ranked[0].valid.n_runs == 2);

  const FilterComparison b =
      relaxed_filter_comparison(features, labels, 2, built.graph, config, 4);
  for (std::size_t i = 0; i < a.runs.size(); ++i) {
    CHECK(a.runs[i].valid_acc == b.runs[i].valid_acc);
    CHECK(a.runs[i].test_acc == b.runs[i].test_acc);
  }
}

TEST_CASE("aggregate mean matches per-run mean exactly") {
  const AggregatedMetric m = aggregate({0.25, 0.5, 0.75, 1.0});
  double mean = 0.0;
  for (double v : m.per_run) mean += v;
  CHECK(std::abs(m.mean - mean / m.per_run.size()) < 1e-12);
}
