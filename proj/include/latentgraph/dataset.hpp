#pragma once

#include <optional>
#include <string>
#include <vector>

#include "latentgraph/graph.hpp"
#include "latentgraph/latent.hpp"
#include "latentgraph/retrieval.hpp"
#include "latentgraph/splits.hpp"

namespace lg {

// On-disk layout under one root directory:
//   features.csv   n x F floats, no header
//   labels.csv     n integers
//   edges.csv      optional src,dst,weight triples, 0-indexed
//   splits.csv     optional node_id,role with role in {train,valid,test}
//   layers/        optional <index>_<name>.csv latent exports
//   items.csv      optional retrieval metadata
struct Dataset {
  Matrix features;
  std::vector<int> labels;
  std::optional<Graph> graph;
  std::optional<SplitMasks> split;
  std::vector<LayerFeatures> layers;
  std::vector<RetrievalItem> items;

  int n_rows() const { return static_cast<int>(features.rows()); }
  int n_classes() const;
};

Dataset ingest(const std::string& root);

// Normalized rewrite of the in-memory dataset (features, labels, symmetric
// edge list, splits when present).
void write_dataset(const Dataset& dataset, const std::string& root);

Matrix read_csv_matrix(const std::string& path);
void write_csv_matrix(const std::string& path, const Matrix& m);
std::vector<int> read_csv_ints(const std::string& path);

// FNV-1a over the canonical config text, for run manifests.
std::string config_hash(const std::string& canonical_text);

}  // namespace lg
