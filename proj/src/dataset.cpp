#include "latentgraph/dataset.hpp"

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>

namespace fs = std::filesystem;

namespace lg {

namespace {

[[noreturn]] void fail(const std::string& path, std::size_t line, const std::string& message) {
  throw std::runtime_error(path + ":" + std::to_string(line) + ": " + message);
}

std::vector<std::string> split_fields(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double parse_double(const std::string& s, const std::string& path, std::size_t line) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty()) fail(path, line, "bad numeric value '" + s + "'");
  return v;
}

long parse_long(const std::string& s, const std::string& path, std::size_t line) {
  std::size_t pos = 0;
  long v = 0;
  try {
    v = std::stol(s, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != s.size() || s.empty()) fail(path, line, "bad integer value '" + s + "'");
  return v;
}

std::vector<std::vector<std::string>> read_rows(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error(path + ": cannot open");
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    rows.push_back(split_fields(line));
  }
  return rows;
}

}  // namespace

Matrix read_csv_matrix(const std::string& path) {
  const auto rows = read_rows(path);
  if (rows.empty()) throw std::runtime_error(path + ": empty matrix file");
  const std::size_t cols = rows[0].size();
  Matrix m(rows.size(), cols);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) {
      fail(path, i + 1, "expected " + std::to_string(cols) + " columns, found " +
                            std::to_string(rows[i].size()));
    }
    for (std::size_t j = 0; j < cols; ++j) {
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
          parse_double(rows[i][j], path, i + 1);
    }
  }
  return m;
}

void write_csv_matrix(const std::string& path, const Matrix& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error(path + ": cannot open for writing");
  out.precision(17);
  for (int i = 0; i < m.rows(); ++i) {
    for (int j = 0; j < m.cols(); ++j) {
      if (j) out << ',';
      out << m(i, j);
    }
    out << '\n';
  }
}

std::vector<int> read_csv_ints(const std::string& path) {
  const auto rows = read_rows(path);
  std::vector<int> out;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != 1) fail(path, i + 1, "expected a single column");
    out.push_back(static_cast<int>(parse_long(rows[i][0], path, i + 1)));
  }
  return out;
}

int Dataset::n_classes() const {
  if (labels.empty()) return 0;
  return *std::max_element(labels.begin(), labels.end()) + 1;
}

namespace {

Graph read_edges(const std::string& path, int n) {
  // Edge lists are undirected: a single direction per edge is the canonical
  // form, both directions with equal weight load silently, and conflicting
  // duplicate weights are asymmetric input that gets symmetrized with a
  // warning (the larger weight wins).
  const auto rows = read_rows(path);
  Matrix adj = Matrix::Zero(n, n);
  Matrix given = Matrix::Zero(n, n);
  bool asymmetric_input = false;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != 3) fail(path, i + 1, "expected src,dst,weight");
    const long src = parse_long(rows[i][0], path, i + 1);
    const long dst = parse_long(rows[i][1], path, i + 1);
    const double w = parse_double(rows[i][2], path, i + 1);
    if (src < 0 || src >= n || dst < 0 || dst >= n) {
      fail(path, i + 1, "edge endpoint out of range [0, " + std::to_string(n) + ")");
    }
    if (w < 0.0) fail(path, i + 1, "negative edge weight");
    if (src == dst) continue;  // self-loops dropped
    const int a = static_cast<int>(std::min(src, dst));
    const int b = static_cast<int>(std::max(src, dst));
    if (given(a, b) > 0.0 && adj(a, b) != w) asymmetric_input = true;
    adj(a, b) = std::max(adj(a, b), w);
    given(a, b) = 1.0;
  }
  if (asymmetric_input) {
    std::cerr << path << ": warning: asymmetric duplicate edge weights, symmetrized on load\n";
  }
  adj = Matrix(adj.selfadjointView<Eigen::Upper>());
  return Graph::from_adjacency(adj);
}

SplitMasks read_splits(const std::string& path, int n) {
  const auto rows = read_rows(path);
  SplitMasks masks;
  std::vector<bool> seen(n, false);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != 2) fail(path, i + 1, "expected node_id,role");
    const long node = parse_long(rows[i][0], path, i + 1);
    if (node < 0 || node >= n) fail(path, i + 1, "node_id out of range");
    if (seen[node]) fail(path, i + 1, "node " + std::to_string(node) + " assigned twice");
    seen[node] = true;
    const std::string& role = rows[i][1];
    if (role == "train") masks.train.push_back(static_cast<int>(node));
    else if (role == "valid") masks.valid.push_back(static_cast<int>(node));
    else if (role == "test") masks.test.push_back(static_cast<int>(node));
    else fail(path, i + 1, "role must be train, valid or test, got '" + role + "'");
  }
  std::sort(masks.train.begin(), masks.train.end());
  std::sort(masks.valid.begin(), masks.valid.end());
  std::sort(masks.test.begin(), masks.test.end());
  return masks;
}

std::vector<LayerFeatures> read_layers(const std::string& dir, int n) {
  std::vector<std::pair<int, fs::path>> indexed;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (!entry.is_regular_file() || entry.path().extension() != ".csv") continue;
    const std::string stem = entry.path().stem().string();
    const auto underscore = stem.find('_');
    if (underscore == std::string::npos) {
      throw std::runtime_error(entry.path().string() + ": layer files are <index>_<name>.csv");
    }
    indexed.emplace_back(std::stoi(stem.substr(0, underscore)), entry.path());
  }
  std::sort(indexed.begin(), indexed.end());
  std::vector<LayerFeatures> layers;
  for (const auto& [index, path] : indexed) {
    LayerFeatures layer;
    const std::string stem = path.stem().string();
    layer.name = stem.substr(stem.find('_') + 1);
    layer.features = read_csv_matrix(path.string());
    if (layer.features.rows() != n) {
      throw std::runtime_error(path.string() + ": layer has " +
                               std::to_string(layer.features.rows()) + " rows, labels have " +
                               std::to_string(n));
    }
    layers.push_back(std::move(layer));
  }
  return layers;
}

std::vector<RetrievalItem> read_items(const std::string& path, const Matrix& features) {
  const auto rows = read_rows(path);
  std::vector<RetrievalItem> items;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != 6) fail(path, i + 1, "expected id,sequence_id,frame_index,lat,lon,class_id");
    const long id = parse_long(rows[i][0], path, i + 1);
    if (id < 0 || id >= features.rows()) fail(path, i + 1, "id out of feature range");
    RetrievalItem item;
    item.feature = features.row(id).transpose();
    if (!rows[i][1].empty()) item.sequence_id = static_cast<int>(parse_long(rows[i][1], path, i + 1));
    if (!rows[i][2].empty()) item.frame_index = static_cast<int>(parse_long(rows[i][2], path, i + 1));
    if (!rows[i][3].empty() && !rows[i][4].empty()) {
      item.gps = {parse_double(rows[i][3], path, i + 1), parse_double(rows[i][4], path, i + 1)};
    } else if (rows[i][3].empty() != rows[i][4].empty()) {
      fail(path, i + 1, "lat and lon must be both present or both absent");
    }
    if (!rows[i][5].empty()) item.class_id = static_cast<int>(parse_long(rows[i][5], path, i + 1));
    items.push_back(std::move(item));
  }
  return items;
}

}  // namespace

Dataset ingest(const std::string& root) {
  const fs::path base(root);
  if (!fs::exists(base / "features.csv")) {
    throw std::runtime_error(root + ": features.csv not found");
  }
  Dataset d;
  d.features = read_csv_matrix((base / "features.csv").string());
  d.labels = read_csv_ints((base / "labels.csv").string());
  const int n = d.n_rows();
  if (static_cast<int>(d.labels.size()) != n) {
    throw std::runtime_error(root + ": labels.csv has " + std::to_string(d.labels.size()) +
                             " rows, features.csv has " + std::to_string(n));
  }
  for (std::size_t i = 0; i < d.labels.size(); ++i) {
    if (d.labels[i] < 0) {
      throw std::runtime_error(root + ": negative label at row " + std::to_string(i + 1));
    }
  }
  if (fs::exists(base / "edges.csv")) d.graph = read_edges((base / "edges.csv").string(), n);
  if (fs::exists(base / "splits.csv")) d.split = read_splits((base / "splits.csv").string(), n);
  if (fs::exists(base / "layers")) d.layers = read_layers((base / "layers").string(), n);
  if (fs::exists(base / "items.csv")) d.items = read_items((base / "items.csv").string(), d.features);
  return d;
}

void write_dataset(const Dataset& dataset, const std::string& root) {
  const fs::path base(root);
  fs::create_directories(base);
  write_csv_matrix((base / "features.csv").string(), dataset.features);
  {
    std::ofstream out(base / "labels.csv");
    for (int y : dataset.labels) out << y << '\n';
  }
  if (dataset.graph.has_value()) {
    std::ofstream out(base / "edges.csv");
    out.precision(17);
    const Graph& g = *dataset.graph;
    for (int i = 0; i < g.n_vertices; ++i) {
      for (int j = i + 1; j < g.n_vertices; ++j) {
        if (g.adjacency(i, j) > 0.0) {
          out << i << ',' << j << ',' << g.adjacency(i, j) << '\n';
        }
      }
    }
  }
  if (dataset.split.has_value()) {
    std::ofstream out(base / "splits.csv");
    for (int v : dataset.split->train) out << v << ",train\n";
    for (int v : dataset.split->valid) out << v << ",valid\n";
    for (int v : dataset.split->test) out << v << ",test\n";
  }
}

std::string config_hash(const std::string& canonical_text) {
  std::uint64_t hash = 1469598103934665603ULL;
  for (unsigned char c : canonical_text) {
    hash ^= c;
    hash *= 1099511628211ULL;
  }
  std::ostringstream os;
  os << std::hex << hash;
  return os.str();
}

}  // namespace lg
