#include "latentgraph/tasks.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <iostream>
#include <limits>
#include <stdexcept>
#include <thread>

#include "latentgraph/spectral.hpp"

namespace lg {

double task_ucv(const Matrix& features, const std::vector<int>& labels,
                const GraphBuildConfig& config, int n_classes, std::uint64_t seed) {
  if (n_classes < 2) throw std::invalid_argument("task_ucv: need at least 2 classes");
  const BuiltGraph built = build_graph(features, config);
  const Graph affinity = Graph::from_adjacency(built.diffusion.cwiseMax(0.0));
  const SpectralDecomposition dec = eigendecompose(affinity, LaplacianKind::SymmetricNormalized);
  if (affinity.n_vertices < n_classes + 1) {
    throw std::invalid_argument("task_ucv: graph too small for the class count");
  }
  // Eigenvectors 2..c+1, skipping the very first. The skip targets the
  // uninformative constant eigenvector, which only exists as such when the
  // zero eigenvalue is simple; with several components the whole zero
  // eigenspace carries the component indicators and is kept.
  const double zero_tol = 1e-8 * std::max(1.0, dec.lambda_max());
  int zero_multiplicity = 0;
  while (zero_multiplicity < dec.eigenvalues.size() &&
         dec.eigenvalues(zero_multiplicity) <= zero_tol) {
    ++zero_multiplicity;
  }
  const int start = zero_multiplicity <= 1 ? 1 : 0;
  const Matrix proj = dec.eigenvectors.middleCols(start, n_classes);

  // Best of several k-means restarts by inertia, the usual toolbox default.
  KMeansResult best;
  best.inertia = std::numeric_limits<double>::infinity();
  for (int restart = 0; restart < 10; ++restart) {
    KMeansResult run = kmeans(proj, n_classes, Rng::derive_key(seed, restart));
    if (run.inertia < best.inertia) best = std::move(run);
  }
  return adjusted_mutual_information(best.assignment, labels);
}

namespace {

std::vector<int> complement_rows(int n, const std::vector<int>& train) {
  std::vector<bool> is_train(n, false);
  for (int r : train) is_train[r] = true;
  std::vector<int> out;
  for (int i = 0; i < n; ++i) {
    if (!is_train[i]) out.push_back(i);
  }
  return out;
}

void warn_unlabeled_components(const Matrix& s, const std::vector<int>& train) {
  const int n = static_cast<int>(s.rows());
  std::vector<int> comp(n, -1);
  int n_comp = 0;
  for (int i = 0; i < n; ++i) {
    if (comp[i] >= 0) continue;
    std::vector<int> stack = {i};
    comp[i] = n_comp;
    while (!stack.empty()) {
      const int v = stack.back();
      stack.pop_back();
      for (int j = 0; j < n; ++j) {
        if (comp[j] < 0 && s(v, j) != 0.0) {
          comp[j] = n_comp;
          stack.push_back(j);
        }
      }
    }
    ++n_comp;
  }
  std::vector<bool> has_label(n_comp, false);
  for (int r : train) has_label[comp[r]] = true;
  int dark = 0;
  for (int c = 0; c < n_comp; ++c) dark += !has_label[c];
  if (dark > 0) {
    std::cerr << "task_sscv_label_propagation: warning: " << dark
              << " connected component(s) contain no labeled vertex\n";
  }
}

}  // namespace

double task_sscv_label_propagation(const Matrix& s, const std::vector<int>& labels, int n_classes,
                                   const SplitMasks& split) {
  const int n = static_cast<int>(s.rows());
  if (static_cast<int>(labels.size()) != n) {
    throw std::invalid_argument("task_sscv_label_propagation: labels/operator size mismatch");
  }
  if (split.train.empty()) {
    throw std::invalid_argument("task_sscv_label_propagation: empty labeled set");
  }
  warn_unlabeled_components(s, split.train);

  Matrix y = Matrix::Zero(n, n_classes);
  for (int r : split.train) y(r, labels[r]) = 1.0;

  // exp(S) through the eigendecomposition of the symmetric operator.
  Eigen::SelfAdjointEigenSolver<Matrix> eig((s + s.transpose()) / 2.0);
  if (eig.info() != Eigen::Success) {
    throw std::runtime_error("task_sscv_label_propagation: eigendecomposition failed");
  }
  const Vector expv = eig.eigenvalues().array().exp();
  const Matrix diffused =
      eig.eigenvectors() * (expv.asDiagonal() * (eig.eigenvectors().transpose() * y));

  const std::vector<int> eval_rows = complement_rows(n, split.train);
  if (eval_rows.empty()) {
    throw std::invalid_argument("task_sscv_label_propagation: nothing to evaluate");
  }
  int hits = 0;
  for (int r : eval_rows) {
    int arg = 0;
    diffused.row(r).maxCoeff(&arg);
    hits += arg == labels[r];
  }
  return static_cast<double>(hits) / eval_rows.size();
}

double task_sscv_sgc(const Matrix& features, const std::vector<int>& labels, int n_classes,
                     const Matrix& s, int power, const SplitMasks& split,
                     const LogisticConfig& config, std::uint64_t seed) {
  if (power < 0) throw std::invalid_argument("task_sscv_sgc: power must be >= 0");
  if (split.train.empty()) throw std::invalid_argument("task_sscv_sgc: empty labeled set");

  Matrix x = features;
  for (int i = 0; i < power; ++i) x = s * x;

  Matrix x_train(split.train.size(), x.cols());
  std::vector<int> y_train(split.train.size());
  for (std::size_t i = 0; i < split.train.size(); ++i) {
    x_train.row(static_cast<Eigen::Index>(i)) = x.row(split.train[i]);
    y_train[i] = labels[split.train[i]];
  }
  const LogisticRegressionModel model = train_logistic(x_train, y_train, n_classes, config, seed);

  const std::vector<int> eval_rows = complement_rows(static_cast<int>(x.rows()), split.train);
  if (eval_rows.empty()) throw std::invalid_argument("task_sscv_sgc: nothing to evaluate");
  Matrix x_eval(eval_rows.size(), x.cols());
  std::vector<int> y_eval(eval_rows.size());
  for (std::size_t i = 0; i < eval_rows.size(); ++i) {
    x_eval.row(static_cast<Eigen::Index>(i)) = x.row(eval_rows[i]);
    y_eval[i] = labels[eval_rows[i]];
  }
  return accuracy(model.predict(x_eval), y_eval);
}

double snr_db(const Matrix& clean, const Matrix& estimate) {
  const double signal = clean.squaredNorm();
  if (signal == 0.0) throw std::invalid_argument("snr_db: zero clean signal");
  const double residual = (clean - estimate).squaredNorm();
  if (residual == 0.0) return 300.0;  // sentinel cap for a perfect estimate
  return std::min(300.0, 10.0 * std::log10(signal / residual));
}

std::vector<double> default_tau_sweep() {
  std::vector<double> taus;
  for (int i = 0; i <= 40; ++i) taus.push_back(i * 0.025);
  return taus;
}

DenoiseResult task_dgs(const Matrix& clean, const Matrix& noisy, const Graph& g,
                       const std::vector<double>& tau_sweep) {
  if (clean.rows() != g.n_vertices || noisy.rows() != g.n_vertices) {
    throw std::invalid_argument("task_dgs: signal length must match vertex count");
  }
  if (clean.squaredNorm() == 0.0) throw std::invalid_argument("task_dgs: zero clean signal");
  if (tau_sweep.empty()) throw std::invalid_argument("task_dgs: empty tau sweep");

  const SpectralDecomposition dec = eigendecompose(g, LaplacianKind::SymmetricNormalized);
  DenoiseResult best{0.0, -std::numeric_limits<double>::infinity()};
  for (double tau : tau_sweep) {
    Matrix estimate;
    if (tau <= 0.0) {
      // Degenerate cutoff: only the exact zero frequencies pass.
      Vector h = (dec.eigenvalues.array() <= 1e-12 * std::max(1.0, dec.lambda_max()))
                     .select(Vector::Ones(dec.eigenvalues.size()), Vector::Zero(dec.eigenvalues.size()));
      estimate = dec.eigenvectors * (h.asDiagonal() * (dec.eigenvectors.transpose() * noisy));
    } else {
      estimate = apply_spectral(SpectralResponseFilter::simoncelli(tau), noisy, dec);
    }
    const double snr = snr_db(clean, estimate);
    if (snr > best.best_snr_db) best = {tau, snr};
  }
  return best;
}

const char* placement_name(Placement p) {
  switch (p) {
    case Placement::None: return "none";
    case Placement::Pre: return "pre";
    case Placement::Post: return "post";
    case Placement::Both: return "both";
  }
  return "?";
}

Placement placement_from_name(const std::string& name) {
  if (name == "none") return Placement::None;
  if (name == "pre") return Placement::Pre;
  if (name == "post") return Placement::Post;
  if (name == "both") return Placement::Both;
  throw std::invalid_argument("unknown placement '" + name + "'");
}

FilterComparison relaxed_filter_comparison(const Matrix& features, const std::vector<int>& labels,
                                           int n_classes, const Graph& g,
                                           const RelaxedGridConfig& config, int n_workers) {
  if (config.filters.empty() || config.placements.empty() || config.input_dropouts.empty() ||
      config.edge_dropouts.empty()) {
    throw std::invalid_argument("relaxed_filter_comparison: empty grid dimension");
  }
  if (config.seeds_per_split < 1) {
    throw std::invalid_argument("relaxed_filter_comparison: seeds_per_split must be >= 1");
  }

  // Diffusion operators are frozen per filter before any training run.
  std::vector<Matrix> compiled;
  compiled.reserve(config.filters.size());
  for (const auto& f : config.filters) compiled.push_back(compile_diffusion(f, g));

  const std::vector<SplitMasks> splits = generate_splits(labels, n_classes, config.split);

  struct ComboKey {
    int filter_idx;
    Placement placement;
    double d_in;
    double d_edge;
  };
  std::vector<ComboKey> combos;
  for (int fi = 0; fi < static_cast<int>(config.filters.size()); ++fi) {
    for (Placement p : config.placements) {
      for (double di : config.input_dropouts) {
        for (double de : config.edge_dropouts) combos.push_back({fi, p, di, de});
      }
    }
  }

  struct RunSlot {
    int combo_index;
    int split_id;
    int seed_id;
  };
  std::vector<RunSlot> slots;
  for (int ci = 0; ci < static_cast<int>(combos.size()); ++ci) {
    for (int si = 0; si < static_cast<int>(splits.size()); ++si) {
      for (int ri = 0; ri < config.seeds_per_split; ++ri) slots.push_back({ci, si, ri});
    }
  }

  std::vector<FilterCompareRun> runs(slots.size());
  std::atomic<std::size_t> cursor{0};
  auto worker = [&]() {
    while (true) {
      const std::size_t idx = cursor.fetch_add(1);
      if (idx >= slots.size()) break;
      const RunSlot& slot = slots[idx];
      const ComboKey& combo = combos[slot.combo_index];
      OneHiddenConfig model_cfg = config.model;
      model_cfg.input_dropout = combo.d_in;
      model_cfg.edge_dropout = combo.d_edge;
      // Stream depends on the run's coordinates, not on scheduling order.
      const std::uint64_t run_index =
          (static_cast<std::uint64_t>(slot.combo_index) << 32) ^
          (static_cast<std::uint64_t>(slot.split_id) << 8) ^ static_cast<std::uint64_t>(slot.seed_id);
      const std::uint64_t seed = Rng::derive_key(config.split.base_seed, run_index);
      const TrainReport report =
          train_one_hidden(features, labels, n_classes, compiled[combo.filter_idx],
                           combo.placement, model_cfg, splits[slot.split_id], seed);
      runs[idx] = {slot.combo_index, slot.split_id, seed, report.best_validation_accuracy,
                   report.test_accuracy_at_best, report.epochs_run};
    }
  };

  n_workers = std::max(1, n_workers);
  if (n_workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  FilterComparison out;
  out.runs = runs;
  for (int ci = 0; ci < static_cast<int>(combos.size()); ++ci) {
    std::vector<double> valid_accs, test_accs;
    for (std::size_t i = 0; i < slots.size(); ++i) {
      if (slots[i].combo_index != ci) continue;
      valid_accs.push_back(runs[i].valid_acc);
      test_accs.push_back(runs[i].test_acc);
    }
    FilterCompareCombo entry;
    entry.filter = config.filters[combos[ci].filter_idx];
    entry.placement = combos[ci].placement;
    entry.input_dropout = combos[ci].d_in;
    entry.edge_dropout = combos[ci].d_edge;
    entry.valid = aggregate(valid_accs);
    entry.test = aggregate(test_accs);
    out.ranked.push_back(std::move(entry));
  }
  std::stable_sort(out.ranked.begin(), out.ranked.end(),
                   [](const FilterCompareCombo& a, const FilterCompareCombo& b) {
                     return a.valid.mean > b.valid.mean;
                   });
  return out;
}

}  // namespace lg
