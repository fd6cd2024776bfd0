#include "latentgraph/graph.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <stdexcept>
#include <vector>

namespace lg {

namespace {

void check_square(const Matrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    throw std::invalid_argument(std::string(what) + ": matrix must be square");
  }
}

}  // namespace

Graph Graph::from_adjacency(const Matrix& a) {
  check_square(a, "Graph::from_adjacency");
  const double asym = (a - a.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10) {
    throw std::invalid_argument("Graph::from_adjacency: adjacency not symmetric (max dev " +
                                std::to_string(asym) + ")");
  }
  if (a.size() > 0 && a.minCoeff() < 0.0) {
    throw std::invalid_argument("Graph::from_adjacency: negative edge weight");
  }
  Graph g;
  g.n_vertices = static_cast<int>(a.rows());
  g.adjacency = (a + a.transpose()) / 2.0;  // kill round-off asymmetry
  g.adjacency.diagonal().setZero();
  g.degree = g.adjacency.rowwise().sum();
  return g;
}

SimilarityMeasure SimilarityMeasure::rbf(double gamma) {
  if (gamma <= 0.0) throw std::invalid_argument("SimilarityMeasure::rbf: gamma must be positive");
  return {Kind::Rbf, gamma};
}

Matrix similarity_matrix(const Matrix& features, const SimilarityMeasure& measure) {
  const int n = static_cast<int>(features.rows());
  const int f = static_cast<int>(features.cols());
  if (n < 2) throw std::invalid_argument("similarity_matrix: need at least 2 rows");
  if (f < 1) throw std::invalid_argument("similarity_matrix: need at least 1 feature");

  switch (measure.kind) {
    case SimilarityMeasure::Kind::Cosine: {
      Vector norms = features.rowwise().norm();
      for (int i = 0; i < n; ++i) {
        if (norms(i) == 0.0) {
          throw std::invalid_argument("similarity_matrix: cosine undefined for zero row " +
                                      std::to_string(i));
        }
      }
      Matrix unit = norms.cwiseInverse().asDiagonal() * features;
      Matrix sim = unit * unit.transpose();
      sim = (sim + sim.transpose()) / 2.0;
      sim.diagonal().setOnes();
      return sim;
    }
    case SimilarityMeasure::Kind::Covariance: {
      if (f < 2) {
        throw std::invalid_argument("similarity_matrix: sampled covariance needs >= 2 features");
      }
      Matrix centered = features.colwise() - features.rowwise().mean();
      Matrix sim = centered * centered.transpose() / static_cast<double>(f - 1);
      return (sim + sim.transpose()) / 2.0;
    }
    case SimilarityMeasure::Kind::Rbf: {
      Vector sq = features.rowwise().squaredNorm();
      Matrix d2 = sq.replicate(1, n) + sq.transpose().replicate(n, 1) -
                  2.0 * features * features.transpose();
      Matrix sim = (-measure.gamma * d2.cwiseMax(0.0)).array().exp();
      sim = (sim + sim.transpose()) / 2.0;
      sim.diagonal().setOnes();
      return sim;
    }
  }
  throw std::logic_error("similarity_matrix: unknown measure");
}

Graph knn_sparsify_symmetrize(const Matrix& sim, int k, double min_edge_weight, bool binarize) {
  check_square(sim, "knn_sparsify_symmetrize");
  const int n = static_cast<int>(sim.rows());
  if (k < 1) throw std::invalid_argument("knn_sparsify_symmetrize: k must be >= 1");
  if (k >= n) {
    throw std::invalid_argument("knn_sparsify_symmetrize: k=" + std::to_string(k) +
                                " must be smaller than n=" + std::to_string(n));
  }
  if (min_edge_weight < 0.0) {
    throw std::invalid_argument("knn_sparsify_symmetrize: min_edge_weight must be >= 0");
  }

  Matrix kept = Matrix::Zero(n, n);
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) order[j] = j;
    // Stable sort on descending similarity; ties go to the lower vertex index.
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return sim(i, a) > sim(i, b); });
    int taken = 0;
    for (int j : order) {
      if (j == i) continue;  // self-similarity excluded
      kept(i, j) = sim(i, j);
      if (++taken == k) break;
    }
  }
  // Union symmetrization: an edge survives if either endpoint selected it.
  Matrix adj = kept.cwiseMax(kept.transpose());
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (adj(i, j) < min_edge_weight || adj(i, j) <= 0.0) adj(i, j) = 0.0;
      else if (binarize) adj(i, j) = 1.0;
    }
  }
  return Graph::from_adjacency(adj);
}

Graph dense_graph_from_similarity(const Matrix& sim, double min_edge_weight, bool binarize) {
  check_square(sim, "dense_graph_from_similarity");
  const int n = static_cast<int>(sim.rows());
  Matrix adj = (sim + sim.transpose()) / 2.0;
  adj.diagonal().setZero();
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (adj(i, j) < min_edge_weight || adj(i, j) <= 0.0) adj(i, j) = 0.0;
      else if (binarize) adj(i, j) = 1.0;
    }
  }
  return Graph::from_adjacency(adj);
}

Matrix normalize_adjacency(const Graph& g, AdjacencyNormalization kind) {
  const int n = g.n_vertices;
  switch (kind) {
    case AdjacencyNormalization::None:
      return g.adjacency;
    case AdjacencyNormalization::SymmetricDegree: {
      for (int i = 0; i < n; ++i) {
        if (g.degree(i) <= 0.0) {
          throw std::domain_error("normalize_adjacency: isolated vertex " + std::to_string(i) +
                                  " under degree normalization");
        }
      }
      Vector dinv = g.degree.array().sqrt().inverse();
      return dinv.asDiagonal() * g.adjacency * dinv.asDiagonal();
    }
    case AdjacencyNormalization::Augmented:
      return g.adjacency + Matrix::Identity(n, n);
    case AdjacencyNormalization::AugmentedSymmetricDegree: {
      Matrix aug = g.adjacency + Matrix::Identity(n, n);
      Vector deg = aug.rowwise().sum();
      Vector dinv = deg.array().sqrt().inverse();
      return dinv.asDiagonal() * aug * dinv.asDiagonal();
    }
  }
  throw std::logic_error("normalize_adjacency: unknown kind");
}

Matrix laplacian(const Graph& g, LaplacianKind kind) {
  const int n = g.n_vertices;
  switch (kind) {
    case LaplacianKind::Combinatorial:
      return Matrix(g.degree.asDiagonal()) - g.adjacency;
    case LaplacianKind::SymmetricNormalized:
      return Matrix::Identity(n, n) -
             normalize_adjacency(g, AdjacencyNormalization::SymmetricDegree);
    case LaplacianKind::AugmentedSymmetricNormalized:
      return Matrix::Identity(n, n) -
             normalize_adjacency(g, AdjacencyNormalization::AugmentedSymmetricDegree);
  }
  throw std::logic_error("laplacian: unknown kind");
}

BuiltGraph build_graph(const Matrix& features, const GraphBuildConfig& config) {
  Matrix sim = similarity_matrix(features, config.measure);
  Graph g = config.k.has_value()
                ? knn_sparsify_symmetrize(sim, *config.k, config.min_edge_weight, config.binarize)
                : dense_graph_from_similarity(sim, config.min_edge_weight, config.binarize);
  Matrix s = normalize_adjacency(g, config.normalization);
  return {std::move(g), std::move(s)};
}

Graph grid_graph(int width, int height) {
  if (width < 2 || height < 2) {
    throw std::invalid_argument("grid_graph: width and height must be >= 2");
  }
  if (width < 3 || height < 3) {
    std::cerr << "grid_graph: warning: " << width << "x" << height
              << " is below the nominal 3x3 minimum (test fixture only)\n";
  }
  const int n = width * height;
  Matrix adj = Matrix::Zero(n, n);
  auto id = [&](int x, int y) { return y * width + x; };
  for (int y = 0; y < height; ++y) {
    for (int x = 0; x < width; ++x) {
      if (x + 1 < width) adj(id(x, y), id(x + 1, y)) = adj(id(x + 1, y), id(x, y)) = 1.0;
      if (y + 1 < height) adj(id(x, y), id(x, y + 1)) = adj(id(x, y + 1), id(x, y)) = 1.0;
    }
  }
  return Graph::from_adjacency(adj);
}

Graph ring_graph(int n) {
  if (n < 3) throw std::invalid_argument("ring_graph: n must be >= 3");
  Matrix adj = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const int j = (i + 1) % n;
    adj(i, j) = adj(j, i) = 1.0;
  }
  return Graph::from_adjacency(adj);
}

}  // namespace lg
