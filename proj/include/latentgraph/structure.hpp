#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "latentgraph/graph.hpp"

namespace lg {

// Partial vertex map phi: U -> V stored as mapping[v] = target, -1 for
// vertices outside U. A valid translation is injective, edge-constrained and
// strongly neighborhood-preserving; its loss counts the unmapped vertices.
struct Translation {
  std::vector<int> mapping;
  int loss = 0;

  int domain_size() const;
};

struct TranslationCheck {
  bool ok = false;
  std::string violated_axiom;  // empty when ok
};

TranslationCheck is_translation(const Graph& g, const std::vector<int>& mapping);

// Exhaustive backtracking over partial injective edge-constrained maps with
// neighborhood-preservation pruning. Returns every translation that no
// aligned translation of strictly smaller loss dominates, ordered by
// (loss, lexicographic mapping). The empty map is excluded.
std::vector<Translation> find_minimal_translations(const Graph& g, int max_vertices = 64);

// out[phi(v)] = in[v]; vertices outside the image receive fill.
Vector translate_signal(const Vector& signal, const Translation& t, double fill = 0.0);

// Strided vertex subsampling: grow from the seed, adding (in index order)
// vertices at hop distance exactly r from the kept set, until stationary.
// Disconnected graphs are processed per component with the component's
// minimum-index vertex as seed (v0 for its own component).
std::vector<int> downsample_vertices(const Graph& g, int r, int v0);

struct Embedding {
  Eigen::MatrixXi coords;  // n x d integer lattice coordinates
  double alpha = 1.0;
  double cost = 0.0;
};

// Sum over unordered vertex pairs of |alpha * L1(phi(v), phi(v')) - d_G(v, v')|
// with weighted shortest-path distances.
double embedding_cost(const Graph& g, const Matrix& coords, double alpha);

// Subgradient descent with an integer-lattice barrier annealed by
// beta_i = 1.03 * beta_{i-1} from 1e-6; coordinates are rounded at the end
// with greedy collision repair.
Embedding optimize_embedding(const Graph& g, int d, double alpha, int iterations,
                             std::uint64_t seed);

// All-pairs weighted shortest path matrix (edge length = weight).
Matrix shortest_path_matrix(const Graph& g);

}  // namespace lg
