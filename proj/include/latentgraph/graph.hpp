#pragma once

#include <Eigen/Dense>
#include <optional>
#include <string>

namespace lg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Dense undirected weighted graph. Immutable after construction: adjacency
// is symmetric with nonnegative weights and zero diagonal, degree caches the
// row sums.
struct Graph {
  int n_vertices = 0;
  Matrix adjacency;
  Vector degree;

  static Graph from_adjacency(const Matrix& a);
};

enum class LaplacianKind {
  Combinatorial,                 // D - A
  SymmetricNormalized,           // I - D^{-1/2} A D^{-1/2}
  AugmentedSymmetricNormalized,  // I - Dt^{-1/2} (A+I) Dt^{-1/2}
};

enum class AdjacencyNormalization {
  None,                      // A
  SymmetricDegree,           // D^{-1/2} A D^{-1/2}
  Augmented,                 // A + I
  AugmentedSymmetricDegree,  // Dt^{-1/2} (A+I) Dt^{-1/2}
};

struct SimilarityMeasure {
  enum class Kind { Cosine, Covariance, Rbf } kind = Kind::Cosine;
  double gamma = 1.0;  // only for Rbf

  static SimilarityMeasure cosine() { return {Kind::Cosine, 0.0}; }
  static SimilarityMeasure covariance() { return {Kind::Covariance, 0.0}; }
  static SimilarityMeasure rbf(double gamma);
};

struct GraphBuildConfig {
  SimilarityMeasure measure = SimilarityMeasure::cosine();
  std::optional<int> k;  // neighbors kept per vertex; nullopt keeps all
  AdjacencyNormalization normalization = AdjacencyNormalization::None;
  double min_edge_weight = 1e-4;
  bool binarize = false;  // connected pairs get weight 1 after thresholding
};

Matrix similarity_matrix(const Matrix& features, const SimilarityMeasure& measure);

Graph knn_sparsify_symmetrize(const Matrix& sim, int k, double min_edge_weight,
                              bool binarize = false);

// Dense n x n graph from a similarity matrix without k-NN selection; the
// diagonal is zeroed and entries below min_edge_weight dropped.
Graph dense_graph_from_similarity(const Matrix& sim, double min_edge_weight,
                                  bool binarize = false);

Matrix normalize_adjacency(const Graph& g, AdjacencyNormalization kind);

Matrix laplacian(const Graph& g, LaplacianKind kind);

struct BuiltGraph {
  Graph graph;
  Matrix diffusion;  // adjacency after the configured normalization
};

BuiltGraph build_graph(const Matrix& features, const GraphBuildConfig& config);

// Unit-weight 2D lattice, vertex (x, y) at row-major index y * width + x.
Graph grid_graph(int width, int height);

Graph ring_graph(int n);

}  // namespace lg
