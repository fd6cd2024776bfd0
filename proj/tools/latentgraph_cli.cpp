// Command-line harness: dataset ingestion, benchmark orchestration, seeding
// and results persistence. Subcommands mirror the library tasks; every run
// writes a per-run CSV, an aggregate CSV and a JSON manifest so that a rerun
// with the same config and seed reproduces the numbers byte for byte.

#include <CLI11.hpp>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>

#include "latentgraph/dataset.hpp"
#include "latentgraph/filters.hpp"
#include "latentgraph/graph.hpp"
#include "latentgraph/latent.hpp"
#include "latentgraph/learners.hpp"
#include "latentgraph/retrieval.hpp"
#include "latentgraph/rng.hpp"
#include "latentgraph/spectral.hpp"
#include "latentgraph/splits.hpp"
#include "latentgraph/structure.hpp"
#include "latentgraph/tasks.hpp"

namespace fs = std::filesystem;
using json = nlohmann::json;
using namespace lg;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt(double v) {
  std::ostringstream os;
  os << std::setprecision(10) << v;
  return os.str();
}

struct RunContext {
  json config;
  std::string config_text;
  std::string out_dir = "results";
  std::uint64_t base_seed = 0;
  int workers = 1;
  std::chrono::steady_clock::time_point started = std::chrono::steady_clock::now();

  fs::path out(const std::string& name) const { return fs::path(out_dir) / name; }

  void write_manifest(const std::string& task, const json& extra = json::object()) const {
    json manifest;
    manifest["task"] = task;
    manifest["config_hash"] = config_hash(config_text);
    manifest["base_seed"] = base_seed;
    manifest["artifact_version"] = kVersion;
    manifest["wall_time_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
    for (auto& [key, value] : extra.items()) manifest[key] = value;
    std::ofstream out(this->out("manifest.json"));
    out << manifest.dump(2) << "\n";
  }
};

RunContext make_context(const std::string& config_path, std::optional<std::uint64_t> seed_flag,
                        std::optional<std::string> out_flag, std::optional<int> workers_flag) {
  RunContext ctx;
  std::ifstream in(config_path);
  if (!in) throw std::runtime_error("config file not found: " + config_path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  ctx.config_text = buffer.str();
  try {
    ctx.config = json::parse(ctx.config_text);
  } catch (const json::parse_error& e) {
    throw std::runtime_error(config_path + ": " + e.what());
  }
  ctx.base_seed = ctx.config.value("seed", 0ULL);
  if (seed_flag) ctx.base_seed = *seed_flag;
  ctx.out_dir = ctx.config.value("out", std::string("results"));
  if (out_flag) ctx.out_dir = *out_flag;

  int workers = 0;
  if (const char* env = std::getenv("LATENTGRAPH_WORKERS")) workers = std::atoi(env);
  if (workers_flag) workers = *workers_flag;
  if (workers <= 0) workers = static_cast<int>(std::thread::hardware_concurrency());
  ctx.workers = std::max(1, workers);
  fs::create_directories(ctx.out_dir);
  return ctx;
}

void run_parallel(int n_items, int n_workers, const std::function<void(int)>& fn) {
  if (n_workers <= 1 || n_items <= 1) {
    for (int i = 0; i < n_items; ++i) fn(i);
    return;
  }
  std::atomic<int> cursor{0};
  auto worker = [&]() {
    while (true) {
      const int i = cursor.fetch_add(1);
      if (i >= n_items) break;
      fn(i);
    }
  };
  std::vector<std::thread> pool;
  for (int i = 0; i < std::min(n_workers, n_items); ++i) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
}

SimilarityMeasure measure_from_json(const json& graph) {
  const std::string name = graph.value("measure", std::string("cosine"));
  if (name == "cosine") return SimilarityMeasure::cosine();
  if (name == "covariance") return SimilarityMeasure::covariance();
  if (name == "rbf") return SimilarityMeasure::rbf(graph.value("gamma", 1.0));
  throw std::runtime_error("unknown similarity measure '" + name + "'");
}

AdjacencyNormalization normalization_from_name(const std::string& name) {
  if (name == "none") return AdjacencyNormalization::None;
  if (name == "sym") return AdjacencyNormalization::SymmetricDegree;
  if (name == "aug") return AdjacencyNormalization::Augmented;
  if (name == "aug_sym") return AdjacencyNormalization::AugmentedSymmetricDegree;
  throw std::runtime_error("unknown normalization '" + name + "'");
}

GraphBuildConfig graph_config_from_json(const json& graph) {
  GraphBuildConfig config;
  config.measure = measure_from_json(graph);
  if (graph.contains("k") && !graph["k"].is_null()) config.k = graph["k"].get<int>();
  else config.k.reset();
  config.normalization = normalization_from_name(graph.value("normalization", std::string("none")));
  config.min_edge_weight = graph.value("min_edge_weight", 1e-4);
  config.binarize = graph.value("binarize", false);
  return config;
}

SplitSpec split_from_json(const json& split, std::uint64_t base_seed, const Dataset& dataset) {
  const std::string mode = split.value("mode", std::string("fraction"));
  if (mode == "fraction") {
    return SplitSpec::fraction(split.value("train_fraction", 0.05), split.value("n_splits", 1),
                               base_seed);
  }
  if (mode == "per_class") {
    return SplitSpec::per_class(split.value("train_per_class", 20),
                                split.value("valid_per_class", 30), split.value("n_splits", 1),
                                base_seed);
  }
  if (mode == "fixed") {
    if (!dataset.split.has_value()) {
      throw std::runtime_error("split mode 'fixed' needs splits.csv in the dataset");
    }
    return SplitSpec::fixed_split(*dataset.split);
  }
  throw std::runtime_error("unknown split mode '" + mode + "'");
}

// The graph the semi-supervised tasks run on: the dataset's own edge list
// when present (normalized per config), an inferred similarity graph
// otherwise.
BuiltGraph resolve_graph(const Dataset& dataset, const json& config) {
  const json graph_cfg = config.value("graph", json::object());
  if (dataset.graph.has_value() && !config.value("infer_graph", false)) {
    const AdjacencyNormalization normalization =
        normalization_from_name(graph_cfg.value("normalization", std::string("aug_sym")));
    return {*dataset.graph, normalize_adjacency(*dataset.graph, normalization)};
  }
  return build_graph(dataset.features, graph_config_from_json(graph_cfg));
}

Graph fixture_or_dataset_graph(const json& config) {
  if (config.contains("fixture")) {
    const std::string spec = config["fixture"].get<std::string>();
    const auto open = spec.find('{');
    if (open == std::string::npos || spec.back() != '}') {
      throw std::runtime_error("bad fixture spec '" + spec + "'");
    }
    const std::string name = spec.substr(0, open);
    auto param = [&](const std::string& key) {
      const std::string body = spec.substr(open + 1, spec.size() - open - 2);
      std::stringstream ss(body);
      std::string item;
      while (std::getline(ss, item, ',')) {
        const auto eq = item.find('=');
        if (eq != std::string::npos && item.substr(0, eq) == key) {
          return std::stoi(item.substr(eq + 1));
        }
      }
      throw std::runtime_error("fixture '" + spec + "': missing parameter '" + key + "'");
    };
    if (name == "ring") return ring_graph(param("n"));
    if (name == "grid") return grid_graph(param("w"), param("h"));
    throw std::runtime_error("unknown fixture '" + spec + "'");
  }
  const Dataset dataset = ingest(config.at("dataset").get<std::string>());
  if (dataset.graph.has_value()) return *dataset.graph;
  return build_graph(dataset.features,
                     graph_config_from_json(config.value("graph", json::object())))
      .graph;
}

struct CsvWriter {
  std::ofstream out;
  explicit CsvWriter(const fs::path& path) : out(path) {
    if (!out) throw std::runtime_error("cannot write " + path.string());
  }
  void row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
      if (i) out << ',';
      out << fields[i];
    }
    out << '\n';
  }
};

// ---------------------------------------------------------------------------

int cmd_ingest(const RunContext& ctx) {
  const std::string root = ctx.config.at("dataset").get<std::string>();
  const Dataset dataset = ingest(root);
  std::cout << "ingested " << root << ": n=" << dataset.n_rows() << " F=" << dataset.features.cols()
            << " classes=" << dataset.n_classes() << " graph=" << (dataset.graph ? "yes" : "no")
            << " split=" << (dataset.split ? "yes" : "no") << " layers=" << dataset.layers.size()
            << " items=" << dataset.items.size() << "\n";
  if (ctx.config.contains("rewrite_to")) {
    write_dataset(dataset, ctx.config["rewrite_to"].get<std::string>());
  }
  ctx.write_manifest("ingest");
  return 0;
}

int cmd_bench_ucv(const RunContext& ctx) {
  const Dataset dataset = ingest(ctx.config.at("dataset").get<std::string>());
  const GraphBuildConfig config = graph_config_from_json(ctx.config.value("graph", json::object()));
  const int classes = ctx.config.value("classes", dataset.n_classes());
  const int runs = ctx.config.value("runs", 10);

  std::vector<double> scores(runs);
  std::vector<std::string> status(runs, "ok");
  run_parallel(runs, ctx.workers, [&](int i) {
    try {
      scores[i] = task_ucv(dataset.features, dataset.labels, config, classes,
                           Rng::derive_key(ctx.base_seed, i));
    } catch (const std::exception& e) {
      scores[i] = std::numeric_limits<double>::quiet_NaN();
      status[i] = std::string("error: ") + e.what();
    }
  });

  CsvWriter per_run(ctx.out("per_run.csv"));
  per_run.row({"run", "seed", "ami", "status"});
  std::vector<double> valid;
  for (int i = 0; i < runs; ++i) {
    per_run.row({std::to_string(i), std::to_string(Rng::derive_key(ctx.base_seed, i)),
                 fmt(scores[i]), status[i]});
    if (status[i] == "ok") valid.push_back(scores[i]);
  }
  const AggregatedMetric agg = aggregate(valid);
  CsvWriter agg_csv(ctx.out("aggregate.csv"));
  agg_csv.row({"metric", "mean", "ci95", "n_runs"});
  agg_csv.row({"ami", fmt(agg.mean), fmt(agg.ci95_halfwidth), std::to_string(agg.n_runs)});
  ctx.write_manifest("bench-ucv");
  std::cout << "bench-ucv: AMI " << fmt(agg.mean) << " +- " << fmt(agg.ci95_halfwidth) << " over "
            << agg.n_runs << " runs\n";
  return 0;
}

int cmd_bench_sscv(const RunContext& ctx) {
  const Dataset dataset = ingest(ctx.config.at("dataset").get<std::string>());
  const std::string method = ctx.config.value("method", std::string("sgc"));
  const BuiltGraph built = resolve_graph(dataset, ctx.config);
  const SplitSpec split_spec =
      split_from_json(ctx.config.value("split", json::object()), ctx.base_seed, dataset);
  const auto splits = generate_splits(dataset.labels, dataset.n_classes(), split_spec);

  const json sgc_cfg = ctx.config.value("sgc", json::object());
  LogisticConfig logistic;
  logistic.learning_rate = sgc_cfg.value("lr", 0.001);
  logistic.epochs = sgc_cfg.value("epochs", 100);
  logistic.optimizer = Optimizer::Adam;
  const int power = sgc_cfg.value("power", 2);

  const int n_runs = static_cast<int>(splits.size());
  std::vector<double> scores(n_runs);
  std::vector<std::string> status(n_runs, "ok");
  run_parallel(n_runs, ctx.workers, [&](int i) {
    try {
      if (method == "label_prop") {
        scores[i] = task_sscv_label_propagation(built.diffusion, dataset.labels,
                                                dataset.n_classes(), splits[i]);
      } else if (method == "sgc") {
        scores[i] = task_sscv_sgc(dataset.features, dataset.labels, dataset.n_classes(),
                                  built.diffusion, power, splits[i], logistic,
                                  Rng::derive_key(ctx.base_seed, i));
      } else {
        throw std::runtime_error("unknown method '" + method + "'");
      }
    } catch (const std::exception& e) {
      scores[i] = std::numeric_limits<double>::quiet_NaN();
      status[i] = std::string("error: ") + e.what();
    }
  });

  CsvWriter per_run(ctx.out("per_run.csv"));
  per_run.row({"split_id", "seed", "accuracy", "status"});
  std::vector<double> valid;
  for (int i = 0; i < n_runs; ++i) {
    per_run.row({std::to_string(i), std::to_string(Rng::derive_key(ctx.base_seed, i)),
                 fmt(scores[i]), status[i]});
    if (status[i] == "ok") valid.push_back(scores[i]);
  }
  const AggregatedMetric agg = aggregate(valid);
  CsvWriter agg_csv(ctx.out("aggregate.csv"));
  agg_csv.row({"metric", "mean", "ci95", "n_runs"});
  agg_csv.row({"accuracy", fmt(agg.mean), fmt(agg.ci95_halfwidth), std::to_string(agg.n_runs)});
  ctx.write_manifest("bench-sscv", {{"method", method}});
  std::cout << "bench-sscv[" << method << "]: accuracy " << fmt(agg.mean) << " +- "
            << fmt(agg.ci95_halfwidth) << " over " << agg.n_runs << " splits\n";
  return 0;
}

int cmd_bench_dgs(const RunContext& ctx) {
  const Dataset dataset = ingest(ctx.config.at("dataset").get<std::string>());
  Graph graph = dataset.graph.has_value()
                    ? *dataset.graph
                    : build_graph(dataset.features, graph_config_from_json(
                                                        ctx.config.value("graph", json::object())))
                          .graph;
  const double snr_in_db = ctx.config.value("noise_snr_db", 7.0);
  const int runs = ctx.config.value("runs", 1);
  std::vector<double> taus = default_tau_sweep();
  if (ctx.config.contains("taus")) taus = ctx.config["taus"].get<std::vector<double>>();

  const Matrix clean = dataset.features;
  CsvWriter per_run(ctx.out("per_run.csv"));
  per_run.row({"run", "seed", "best_tau", "best_snr_db", "input_snr_db"});
  std::vector<double> best_snrs;
  for (int i = 0; i < runs; ++i) {
    Rng rng(Rng::derive_key(ctx.base_seed, i));
    Matrix noise(clean.rows(), clean.cols());
    for (int r = 0; r < noise.rows(); ++r)
      for (int c = 0; c < noise.cols(); ++c) noise(r, c) = rng.next_gaussian();
    noise *=
        std::sqrt(clean.squaredNorm() / (noise.squaredNorm() * std::pow(10.0, snr_in_db / 10.0)));
    const Matrix noisy = clean + noise;
    const DenoiseResult result = task_dgs(clean, noisy, graph, taus);
    best_snrs.push_back(result.best_snr_db);
    per_run.row({std::to_string(i), std::to_string(Rng::derive_key(ctx.base_seed, i)),
                 fmt(result.best_tau), fmt(result.best_snr_db), fmt(snr_db(clean, noisy))});
  }
  const AggregatedMetric agg = aggregate(best_snrs);
  CsvWriter agg_csv(ctx.out("aggregate.csv"));
  agg_csv.row({"metric", "mean", "ci95", "n_runs"});
  agg_csv.row({"best_snr_db", fmt(agg.mean), fmt(agg.ci95_halfwidth), std::to_string(agg.n_runs)});
  ctx.write_manifest("bench-dgs");
  std::cout << "bench-dgs: best SNR " << fmt(agg.mean) << " dB over " << agg.n_runs << " runs\n";
  return 0;
}

int cmd_filter_compare(const RunContext& ctx) {
  const Dataset dataset = ingest(ctx.config.at("dataset").get<std::string>());
  const BuiltGraph built = resolve_graph(dataset, ctx.config);

  RelaxedGridConfig grid;
  for (const auto& spec : ctx.config.at("filters")) {
    grid.filters.push_back(parse_filter_spec(spec.get<std::string>()));
  }
  if (ctx.config.contains("placements")) {
    grid.placements.clear();
    for (const auto& p : ctx.config["placements"]) {
      grid.placements.push_back(placement_from_name(p.get<std::string>()));
    }
  }
  if (ctx.config.contains("input_dropouts")) {
    grid.input_dropouts = ctx.config["input_dropouts"].get<std::vector<double>>();
  }
  if (ctx.config.contains("edge_dropouts")) {
    grid.edge_dropouts = ctx.config["edge_dropouts"].get<std::vector<double>>();
  }
  grid.split = split_from_json(ctx.config.value("split", json{{"mode", "per_class"}}),
                               ctx.base_seed, dataset);
  grid.seeds_per_split = ctx.config.value("seeds_per_split", 1);
  const json model = ctx.config.value("model", json::object());
  grid.model.hidden_size = model.value("hidden_size", 64);
  grid.model.l2_hidden = model.value("l2_hidden", 0.005);
  grid.model.learning_rate = model.value("learning_rate", 0.01);
  grid.model.max_epochs = model.value("max_epochs", 10000);
  grid.model.patience = model.value("patience", 100);

  const FilterComparison comparison = relaxed_filter_comparison(
      dataset.features, dataset.labels, dataset.n_classes(), built.graph, grid, ctx.workers);

  CsvWriter per_run(ctx.out("per_run.csv"));
  per_run.row({"dataset", "filter", "placement", "input_dropout", "edge_dropout", "split_id",
               "seed", "valid_acc", "test_acc", "epochs"});
  const std::string dataset_name = ctx.config.at("dataset").get<std::string>();
  // Runs arrive in (combo, split, seed) order; recover the combo fields from
  // the grid enumeration order (the ranked list is sorted by accuracy).
  std::vector<std::tuple<std::string, std::string, double, double>> combo_fields;
  for (const auto& f : grid.filters) {
    for (Placement p : grid.placements) {
      for (double di : grid.input_dropouts) {
        for (double de : grid.edge_dropouts) {
          combo_fields.emplace_back(f.spec(), placement_name(p), di, de);
        }
      }
    }
  }
  for (const auto& run : comparison.runs) {
    const auto& [filter, placement, di, de] = combo_fields[run.combo_index];
    per_run.row({dataset_name, filter, placement, fmt(di), fmt(de), std::to_string(run.split_id),
                 std::to_string(run.seed), fmt(run.valid_acc), fmt(run.test_acc),
                 std::to_string(run.epochs)});
  }

  CsvWriter agg_csv(ctx.out("aggregate.csv"));
  agg_csv.row({"filter", "placement", "input_dropout", "edge_dropout", "valid_mean", "valid_ci95",
               "test_mean", "test_ci95", "n_runs"});
  for (const auto& combo : comparison.ranked) {
    agg_csv.row({combo.filter.spec(), placement_name(combo.placement), fmt(combo.input_dropout),
                 fmt(combo.edge_dropout), fmt(combo.valid.mean), fmt(combo.valid.ci95_halfwidth),
                 fmt(combo.test.mean), fmt(combo.test.ci95_halfwidth),
                 std::to_string(combo.valid.n_runs)});
  }
  ctx.write_manifest("filter-compare", {{"n_runs", comparison.runs.size()},
                                        {"n_combos", comparison.ranked.size()}});
  const auto& best = comparison.ranked.front();
  std::cout << "filter-compare: best " << best.filter.spec() << " "
            << placement_name(best.placement) << " din=" << best.input_dropout
            << " dedge=" << best.edge_dropout << " valid " << fmt(best.valid.mean) << " +- "
            << fmt(best.valid.ci95_halfwidth) << " test " << fmt(best.test.mean) << " +- "
            << fmt(best.test.ci95_halfwidth) << "\n";
  return 0;
}

int cmd_latent_gap(const RunContext& ctx) {
  const Dataset dataset = ingest(ctx.config.at("dataset").get<std::string>());
  if (dataset.layers.size() < 2) {
    throw std::runtime_error("latent-gap needs at least two exported layers under layers/");
  }
  const int m = ctx.config.value("samples_per_class", 50);
  const int k = ctx.config.value("k", 20);
  const int resamples = ctx.config.value("resamples", 10);
  const SmoothnessGapReport report = smoothness_gap(
      dataset.layers, dataset.labels, m, dataset.n_classes(), k, resamples, ctx.base_seed);
  CsvWriter curve(ctx.out("curve.csv"));
  curve.row({"layer_index", "layer", "normalized_smoothness"});
  for (std::size_t i = 0; i < report.per_layer_smoothness.size(); ++i) {
    curve.row({std::to_string(i), report.per_layer_smoothness[i].first,
               fmt(report.per_layer_smoothness[i].second)});
  }
  CsvWriter agg_csv(ctx.out("aggregate.csv"));
  agg_csv.row({"metric", "value"});
  agg_csv.row({"smoothness_gap", fmt(report.gap)});
  agg_csv.row({"normalization_bound", fmt(report.normalization_bound)});
  ctx.write_manifest("latent-gap");
  std::cout << "latent-gap: gap " << fmt(report.gap) << " across " << dataset.layers.size()
            << " layers\n";
  return 0;
}

int cmd_fewshot(const RunContext& ctx) {
  const Dataset dataset = ingest(ctx.config.at("dataset").get<std::string>());
  const SpectralResponseFilter filter =
      parse_filter_spec(ctx.config.value("filter", std::string("simoncelli{tau=0.3}")));
  const FewshotClassifier classifier =
      fewshot_classifier_from_name(ctx.config.value("classifier", std::string("1nn")));
  const int ways = ctx.config.value("ways", 5);
  const int shots = ctx.config.value("shots", 5);
  const int queries_per_class = ctx.config.value("queries_per_class", 15);
  const int episodes = ctx.config.value("episodes", 100);

  std::vector<double> scores(episodes);
  std::vector<std::string> status(episodes, "ok");
  run_parallel(episodes, ctx.workers, [&](int e) {
    try {
      Rng rng(Rng::derive_key(ctx.base_seed, e));
      const FewshotEpisodeIndices ep = sample_fewshot_episode(
          dataset.labels, dataset.n_classes(), ways, shots, queries_per_class, rng);
      Matrix support(ep.support_rows.size(), dataset.features.cols());
      for (std::size_t i = 0; i < ep.support_rows.size(); ++i) {
        support.row(static_cast<Eigen::Index>(i)) = dataset.features.row(ep.support_rows[i]);
      }
      Matrix query(ep.query_rows.size(), dataset.features.cols());
      for (std::size_t i = 0; i < ep.query_rows.size(); ++i) {
        query.row(static_cast<Eigen::Index>(i)) = dataset.features.row(ep.query_rows[i]);
      }
      scores[e] = fewshot_episode(support, ep.support_labels, query, ep.query_labels, filter,
                                  classifier, ways, shots);
    } catch (const std::exception& err) {
      scores[e] = std::numeric_limits<double>::quiet_NaN();
      status[e] = std::string("error: ") + err.what();
    }
  });

  CsvWriter per_run(ctx.out("per_run.csv"));
  per_run.row({"episode", "seed", "accuracy", "status"});
  std::vector<double> valid;
  for (int e = 0; e < episodes; ++e) {
    per_run.row({std::to_string(e), std::to_string(Rng::derive_key(ctx.base_seed, e)),
                 fmt(scores[e]), status[e]});
    if (status[e] == "ok") valid.push_back(scores[e]);
  }
  const AggregatedMetric agg = aggregate(valid);
  CsvWriter agg_csv(ctx.out("aggregate.csv"));
  agg_csv.row({"metric", "mean", "ci95", "n_runs"});
  agg_csv.row({"accuracy", fmt(agg.mean), fmt(agg.ci95_halfwidth), std::to_string(agg.n_runs)});
  ctx.write_manifest("fewshot", {{"filter", filter.spec()}});
  std::cout << "fewshot[" << filter.spec() << "]: accuracy " << fmt(agg.mean) << " +- "
            << fmt(agg.ci95_halfwidth) << " over " << agg.n_runs << " episodes\n";
  return 0;
}

int cmd_retrieval(const RunContext& ctx) {
  const Dataset support_set = ingest(ctx.config.at("dataset").get<std::string>());
  if (support_set.items.empty()) {
    throw std::runtime_error("retrieval needs items.csv in the support dataset");
  }
  const json params_json = ctx.config.value("params", json::object());
  VblGraphParams params;
  params.gamma = params_json.value("gamma", 0.1);
  params.max_distance = params_json.value("max_distance", 25.0);
  if (params_json.contains("betas")) params.betas = params_json["betas"].get<std::vector<double>>();
  params.alpha_sim = params_json.value("alpha_sim", 0.66);
  params.filter_a = params_json.value("a", 0.1);
  params.filter_m = params_json.value("m", 20);
  params.planar = params_json.value("planar", false);
  params.class_distance = params_json.value("class_distance", false);
  params.use_dist = params_json.value("use_dist", true);
  params.use_seq = params_json.value("use_seq", true);
  params.use_latent_sim = params_json.value("use_latent_sim", true);
  const std::string mode = ctx.config.value("mode", std::string("support"));
  const int top_k = ctx.config.value("top_k", 10);

  auto features_of = [](const std::vector<RetrievalItem>& items) {
    Matrix m(items.size(), items[0].feature.size());
    for (std::size_t i = 0; i < items.size(); ++i) {
      m.row(static_cast<Eigen::Index>(i)) = items[i].feature.transpose();
    }
    return m;
  };
  auto smoothed = [&](const std::vector<RetrievalItem>& items) {
    const Graph g = build_vbl_adjacency(items, params);
    return smooth_features(features_of(items), g, params.filter_a, params.filter_m);
  };

  Matrix support_features = features_of(support_set.items);
  if (mode == "support" || mode == "both") support_features = smoothed(support_set.items);

  std::vector<RetrievalItem> query_items;
  if (ctx.config.contains("queries")) {
    const Dataset query_set = ingest(ctx.config["queries"].get<std::string>());
    query_items = query_set.items;
  } else {
    query_items = support_set.items;  // self-retrieval diagnostics
  }
  if (query_items.empty()) throw std::runtime_error("retrieval: no query items");
  Matrix query_features = features_of(query_items);
  if (mode == "query" || mode == "both") query_features = smoothed(query_items);

  const auto rankings = retrieve(query_features, support_features, top_k);

  CsvWriter per_run(ctx.out("per_run.csv"));
  per_run.row({"query", "rank", "support_id"});
  for (std::size_t q = 0; q < rankings.size(); ++q) {
    for (std::size_t r = 0; r < rankings[q].size(); ++r) {
      per_run.row({std::to_string(q), std::to_string(r + 1), std::to_string(rankings[q][r])});
    }
  }

  CsvWriter agg_csv(ctx.out("aggregate.csv"));
  agg_csv.row({"metric", "value"});
  const bool have_classes =
      std::all_of(support_set.items.begin(), support_set.items.end(),
                  [](const RetrievalItem& item) { return item.class_id.has_value(); }) &&
      std::all_of(query_items.begin(), query_items.end(),
                  [](const RetrievalItem& item) { return item.class_id.has_value(); });
  if (have_classes) {
    const auto full_rankings =
        retrieve(query_features, support_features, static_cast<int>(support_set.items.size()));
    std::vector<std::vector<int>> relevance(query_items.size());
    for (std::size_t q = 0; q < query_items.size(); ++q) {
      for (std::size_t s = 0; s < support_set.items.size(); ++s) {
        if (*support_set.items[s].class_id == *query_items[q].class_id) {
          relevance[q].push_back(static_cast<int>(s));
        }
      }
    }
    agg_csv.row({"map", fmt(mean_average_precision(full_rankings, relevance))});
  }
  const bool have_gps =
      std::all_of(support_set.items.begin(), support_set.items.end(),
                  [](const RetrievalItem& item) { return item.gps.has_value(); }) &&
      std::all_of(query_items.begin(), query_items.end(),
                  [](const RetrievalItem& item) { return item.gps.has_value(); });
  if (have_gps) {
    std::vector<std::pair<double, double>> truth, found;
    for (std::size_t q = 0; q < query_items.size(); ++q) {
      truth.push_back(*query_items[q].gps);
      found.push_back(*support_set.items[rankings[q][0]].gps);
    }
    const LocalizationMetrics metrics = localization_metrics(truth, found, params.planar);
    agg_csv.row({"median_error_m", fmt(metrics.median_error_m)});
    agg_csv.row({"fraction_under_25m", fmt(metrics.fraction_under_25m)});
  }
  ctx.write_manifest("retrieval", {{"mode", mode}});
  std::cout << "retrieval[" << mode << "]: ranked " << rankings.size() << " queries\n";
  return 0;
}

int cmd_translations(const RunContext& ctx) {
  const Graph graph = fixture_or_dataset_graph(ctx.config);
  const int cap = ctx.config.value("max_vertices", 64);
  const auto minimal = find_minimal_translations(graph, cap);

  json out = json::array();
  for (const Translation& t : minimal) {
    json pairs = json::array();
    for (int v = 0; v < graph.n_vertices; ++v) {
      if (t.mapping[v] >= 0) pairs.push_back({v, t.mapping[v]});
    }
    out.push_back({{"loss", t.loss}, {"pairs", pairs}});
  }
  std::ofstream file(ctx.out("translations.json"));
  file << out.dump(2) << "\n";
  ctx.write_manifest("translations", {{"count", minimal.size()}});
  std::cout << "translations: " << minimal.size() << " minimal translations\n";
  return 0;
}

int cmd_embed(const RunContext& ctx) {
  const Graph graph = fixture_or_dataset_graph(ctx.config);
  const int d = ctx.config.value("d", 2);
  const double alpha = ctx.config.value("alpha", 1.0);
  const int iterations = ctx.config.value("iterations", 700);
  const Embedding embedding = optimize_embedding(graph, d, alpha, iterations, ctx.base_seed);

  CsvWriter csv(ctx.out("embedding.csv"));
  std::vector<std::string> header = {"vertex"};
  for (int c = 0; c < d; ++c) {
    header.push_back(c == 0 ? "x" : (c == 1 ? "y" : "c" + std::to_string(c)));
  }
  csv.row(header);
  for (int v = 0; v < graph.n_vertices; ++v) {
    std::vector<std::string> row = {std::to_string(v)};
    for (int c = 0; c < d; ++c) row.push_back(std::to_string(embedding.coords(v, c)));
    csv.row(row);
  }
  ctx.write_manifest("embed", {{"cost", embedding.cost}});
  std::cout << "embed: cost " << fmt(embedding.cost) << "\n";
  return 0;
}

int cmd_plotdata(const RunContext& ctx) {
  const std::string kind = ctx.config.at("kind").get<std::string>();
  CsvWriter csv(ctx.out("plotdata.csv"));
  csv.row({"x", "y", "series"});

  if (kind == "filter_response") {
    const SpectralResponseFilter filter =
        parse_filter_spec(ctx.config.at("filter").get<std::string>());
    const double lo = ctx.config.value("lambda_min", 0.0);
    const double hi = ctx.config.value("lambda_max", 2.0);
    const double step = ctx.config.value("step", 0.01);
    if (step <= 0.0 || hi < lo) throw std::runtime_error("plotdata: bad lambda grid");
    std::vector<double> grid;
    for (double x = lo; x <= hi + 1e-12; x += step) grid.push_back(x);
    Vector lambdas(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) lambdas(static_cast<Eigen::Index>(i)) = grid[i];
    const Vector h = evaluate_response(filter, lambdas, hi > 0 ? hi : 1.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      csv.row({fmt(grid[i]), fmt(h(static_cast<Eigen::Index>(i))), filter.spec()});
    }
  } else if (kind == "smoothness_curve") {
    const std::string results = ctx.config.at("results").get<std::string>();
    if (!fs::exists(results)) throw std::runtime_error("plotdata: no results at " + results);
    std::ifstream in(results);
    std::string line;
    std::getline(in, line);  // header
    bool any = false;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      const auto first = line.find(',');
      const auto second = line.find(',', first + 1);
      csv.row({line.substr(0, first), line.substr(second + 1),
               line.substr(first + 1, second - first - 1)});
      any = true;
    }
    if (!any) throw std::runtime_error("plotdata: empty results file " + results);
  } else if (kind == "ablation") {
    const Dataset dataset = ingest(ctx.config.at("dataset").get<std::string>());
    Graph graph = dataset.graph.has_value()
                      ? *dataset.graph
                      : build_graph(dataset.features,
                                    graph_config_from_json(ctx.config.value("graph", json::object())))
                            .graph;
    const double a = ctx.config.value("a", 0.1);
    const int m_max = ctx.config.value("m_max", 40);
    Vector dinv(graph.n_vertices);
    for (int i = 0; i < graph.n_vertices; ++i) {
      dinv(i) = graph.degree(i) > 0 ? 1.0 / std::sqrt(graph.degree(i)) : 0.0;
    }
    Matrix lap = -(dinv.asDiagonal() * graph.adjacency * dinv.asDiagonal());
    for (int i = 0; i < graph.n_vertices; ++i) {
      if (graph.degree(i) > 0) lap(i, i) += 1.0;
    }
    for (int m = 0; m <= m_max; ++m) {
      const Matrix smooth = smooth_features(dataset.features, graph, a, m);
      csv.row({std::to_string(m), fmt((smooth.transpose() * lap * smooth).trace()),
               "vbl_smoothness"});
    }
  } else {
    throw std::runtime_error("plotdata: unknown kind '" + kind + "'");
  }
  ctx.write_manifest("plotdata", {{"kind", kind}});
  std::cout << "plotdata[" << kind << "] written\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Graph-signal-processing benchmark harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed_flag;
  std::optional<std::string> out_flag;
  std::optional<int> workers_flag;

  const std::vector<std::pair<std::string, int (*)(const RunContext&)>> commands = {
      {"ingest", cmd_ingest},
      {"bench-ucv", cmd_bench_ucv},
      {"bench-sscv", cmd_bench_sscv},
      {"bench-dgs", cmd_bench_dgs},
      {"filter-compare", cmd_filter_compare},
      {"latent-gap", cmd_latent_gap},
      {"fewshot", cmd_fewshot},
      {"retrieval", cmd_retrieval},
      {"translations", cmd_translations},
      {"embed", cmd_embed},
      {"plotdata", cmd_plotdata},
  };
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, fn] : commands) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON experiment config")->required();
    sub->add_option("--seed", seed_flag, "base seed override");
    sub->add_option("--out", out_flag, "output directory override");
    sub->add_option("--workers", workers_flag, "worker pool size (env LATENTGRAPH_WORKERS)");
    subs[name] = sub;
  }

  CLI11_PARSE(app, argc, argv);

  try {
    for (const auto& [name, fn] : commands) {
      if (subs[name]->parsed()) {
        const RunContext ctx = make_context(config_path, seed_flag, out_flag, workers_flag);
        return fn(ctx);
      }
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
