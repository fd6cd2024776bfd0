#include "latentgraph/structure.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <functional>
#include <queue>
#include <stdexcept>

#include "latentgraph/rng.hpp"

namespace lg {

namespace {

bool edge(const Graph& g, int i, int j) { return g.adjacency(i, j) > 0.0; }

std::vector<std::vector<int>> neighbor_lists(const Graph& g) {
  std::vector<std::vector<int>> nbr(g.n_vertices);
  for (int i = 0; i < g.n_vertices; ++i) {
    for (int j = 0; j < g.n_vertices; ++j) {
      if (g.adjacency(i, j) > 0.0) nbr[i].push_back(j);
    }
  }
  return nbr;
}

}  // namespace

int Translation::domain_size() const {
  int count = 0;
  for (int v : mapping) count += v >= 0;
  return count;
}

TranslationCheck is_translation(const Graph& g, const std::vector<int>& mapping) {
  const int n = g.n_vertices;
  if (static_cast<int>(mapping.size()) != n) {
    throw std::invalid_argument("is_translation: mapping length must equal vertex count");
  }
  std::vector<bool> used(n, false);
  for (int v = 0; v < n; ++v) {
    const int w = mapping[v];
    if (w < 0) continue;
    if (w >= n) throw std::invalid_argument("is_translation: target out of range");
    if (used[w]) return {false, "injective"};
    used[w] = true;
  }
  for (int v = 0; v < n; ++v) {
    if (mapping[v] >= 0 && !edge(g, v, mapping[v])) return {false, "edge-constrained"};
  }
  for (int v = 0; v < n; ++v) {
    if (mapping[v] < 0) continue;
    for (int u = v + 1; u < n; ++u) {
      if (mapping[u] < 0) continue;
      if (edge(g, v, u) != edge(g, mapping[v], mapping[u])) {
        return {false, "strongly neighborhood-preserving"};
      }
    }
  }
  return {true, ""};
}

namespace {

void enumerate_translations(const Graph& g, const std::vector<std::vector<int>>& nbr, int v,
                            std::vector<int>& mapping, std::vector<bool>& used,
                            std::vector<Translation>& out) {
  const int n = g.n_vertices;
  if (v == n) {
    Translation t;
    t.mapping = mapping;
    t.loss = n - t.domain_size();
    if (t.loss < n) out.push_back(std::move(t));  // the empty map is not a translation here
    return;
  }
  // Option 1: v stays outside the domain.
  mapping[v] = -1;
  enumerate_translations(g, nbr, v + 1, mapping, used, out);

  // Option 2: v maps onto one of its neighbors, keeping all pairwise
  // neighborhood relations with already-assigned vertices intact.
  for (int w : nbr[v]) {
    if (used[w]) continue;
    bool feasible = true;
    for (int u = 0; u < v && feasible; ++u) {
      if (mapping[u] < 0) continue;
      feasible = edge(g, u, v) == edge(g, mapping[u], w);
    }
    if (!feasible) continue;
    mapping[v] = w;
    used[w] = true;
    enumerate_translations(g, nbr, v + 1, mapping, used, out);
    used[w] = false;
  }
  mapping[v] = -1;
}

}  // namespace

std::vector<Translation> find_minimal_translations(const Graph& g, int max_vertices) {
  const int n = g.n_vertices;
  if (n > max_vertices) {
    throw std::invalid_argument(
        "find_minimal_translations: graph has " + std::to_string(n) + " vertices, cap is " +
        std::to_string(max_vertices) + "; the search is exponential, raise the cap knowingly");
  }

  const auto nbr = neighbor_lists(g);
  std::vector<Translation> all;
  std::vector<int> mapping(n, -1);
  std::vector<bool> used(n, false);
  enumerate_translations(g, nbr, 0, mapping, used, all);

  // A translation is dominated when some aligned translation has strictly
  // smaller loss. Alignment means sharing at least one (v -> w) assignment,
  // so a per-assignment minimum loss table answers all queries.
  std::vector<int> min_loss(static_cast<std::size_t>(n) * n, std::numeric_limits<int>::max());
  for (const Translation& t : all) {
    for (int v = 0; v < n; ++v) {
      if (t.mapping[v] >= 0) {
        auto& slot = min_loss[static_cast<std::size_t>(v) * n + t.mapping[v]];
        slot = std::min(slot, t.loss);
      }
    }
  }
  std::vector<Translation> minimal;
  for (Translation& t : all) {
    bool dominated = false;
    for (int v = 0; v < n && !dominated; ++v) {
      if (t.mapping[v] >= 0) {
        dominated = min_loss[static_cast<std::size_t>(v) * n + t.mapping[v]] < t.loss;
      }
    }
    if (!dominated) minimal.push_back(std::move(t));
  }
  std::sort(minimal.begin(), minimal.end(), [](const Translation& a, const Translation& b) {
    if (a.loss != b.loss) return a.loss < b.loss;
    return a.mapping < b.mapping;
  });
  return minimal;
}

Vector translate_signal(const Vector& signal, const Translation& t, double fill) {
  const int n = static_cast<int>(signal.size());
  if (static_cast<int>(t.mapping.size()) != n) {
    throw std::invalid_argument("translate_signal: signal length must equal vertex count");
  }
  Vector out = Vector::Constant(n, fill);
  for (int v = 0; v < n; ++v) {
    if (t.mapping[v] >= 0) out(t.mapping[v]) = signal(v);
  }
  return out;
}

namespace {

// Hop distances from a source via BFS over the nonzero pattern.
std::vector<int> hop_distances(const std::vector<std::vector<int>>& nbr, int source) {
  std::vector<int> dist(nbr.size(), -1);
  std::queue<int> queue;
  dist[source] = 0;
  queue.push(source);
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop();
    for (int w : nbr[v]) {
      if (dist[w] < 0) {
        dist[w] = dist[v] + 1;
        queue.push(w);
      }
    }
  }
  return dist;
}

std::vector<int> downsample_component(const std::vector<std::vector<int>>& nbr,
                                      const std::vector<int>& component, int seed_vertex, int r) {
  std::vector<int> kept = {seed_vertex};
  // min hop distance from each vertex to the kept set, updated incrementally
  std::vector<int> dist_to_kept(nbr.size(), std::numeric_limits<int>::max());
  auto absorb = [&](int v) {
    const std::vector<int> d = hop_distances(nbr, v);
    for (std::size_t i = 0; i < nbr.size(); ++i) {
      if (d[i] >= 0) dist_to_kept[i] = std::min(dist_to_kept[i], d[i]);
    }
  };
  absorb(seed_vertex);

  bool grew = true;
  while (grew) {
    grew = false;
    // Candidates against the kept set as of the round start, admitted in
    // vertex-index order; each admission immediately constrains the rest.
    std::vector<int> candidates;
    for (int v : component) {
      if (dist_to_kept[v] == r) candidates.push_back(v);
    }
    std::sort(candidates.begin(), candidates.end());
    for (int v : candidates) {
      if (dist_to_kept[v] >= r) {  // still at least r hops from everything kept
        kept.push_back(v);
        absorb(v);
        grew = true;
      }
    }
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

}  // namespace

std::vector<int> downsample_vertices(const Graph& g, int r, int v0) {
  const int n = g.n_vertices;
  if (r < 2) throw std::invalid_argument("downsample_vertices: stride must be >= 2");
  if (v0 < 0 || v0 >= n) throw std::invalid_argument("downsample_vertices: seed out of range");

  const auto nbr = neighbor_lists(g);
  std::vector<int> comp(n, -1);
  std::vector<std::vector<int>> components;
  for (int i = 0; i < n; ++i) {
    if (comp[i] >= 0) continue;
    const int id = static_cast<int>(components.size());
    components.emplace_back();
    std::queue<int> queue;
    comp[i] = id;
    queue.push(i);
    while (!queue.empty()) {
      const int v = queue.front();
      queue.pop();
      components[id].push_back(v);
      for (int w : nbr[v]) {
        if (comp[w] < 0) {
          comp[w] = id;
          queue.push(w);
        }
      }
    }
  }

  std::vector<int> kept;
  for (auto& component : components) {
    std::sort(component.begin(), component.end());
    const int seed = comp[v0] == comp[component[0]] ? v0 : component[0];
    const std::vector<int> part = downsample_component(nbr, component, seed, r);
    kept.insert(kept.end(), part.begin(), part.end());
  }
  std::sort(kept.begin(), kept.end());
  return kept;
}

Matrix shortest_path_matrix(const Graph& g) {
  const int n = g.n_vertices;
  constexpr double inf = std::numeric_limits<double>::infinity();
  Matrix dist = Matrix::Constant(n, n, inf);
  for (int i = 0; i < n; ++i) dist(i, i) = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      if (g.adjacency(i, j) > 0.0) dist(i, j) = g.adjacency(i, j);
    }
  }
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        const double via = dist(i, k) + dist(k, j);
        if (via < dist(i, j)) dist(i, j) = via;
      }
    }
  }
  return dist;
}

namespace {

double embedding_cost_dist(const Matrix& dist, const Matrix& coords, double alpha) {
  const int n = static_cast<int>(coords.rows());
  double cost = 0.0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      const double l1 = (coords.row(i) - coords.row(j)).cwiseAbs().sum();
      cost += std::abs(alpha * l1 - dist(i, j));
    }
  }
  return cost;
}

double sgn(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

double embedding_cost(const Graph& g, const Matrix& coords, double alpha) {
  if (coords.rows() != g.n_vertices) {
    throw std::invalid_argument("embedding_cost: coordinate rows must match vertex count");
  }
  const Matrix dist = shortest_path_matrix(g);
  if (!dist.allFinite()) {
    throw std::invalid_argument("embedding_cost: graph is disconnected");
  }
  return embedding_cost_dist(dist, coords, alpha);
}

namespace {

double integer_cost(const Eigen::MatrixXi& coords, const Matrix& dist, double alpha) {
  double cost = 0.0;
  for (int i = 0; i < coords.rows(); ++i) {
    for (int j = i + 1; j < coords.rows(); ++j) {
      const double l1 = (coords.row(i) - coords.row(j)).cwiseAbs().sum();
      cost += std::abs(alpha * l1 - dist(i, j));
    }
  }
  return cost;
}

// Greedy integer polish: single-vertex moves inside a small window plus
// pairwise position swaps, repeated until no move improves the cost.
double greedy_integer_refine(Eigen::MatrixXi& coords, const Matrix& dist, double alpha) {
  const int n = static_cast<int>(coords.rows());
  const int d = static_cast<int>(coords.cols());
  double best = integer_cost(coords, dist, alpha);
  bool improved = true;
  while (improved && best > 0.0) {
    improved = false;
    for (int v = 0; v < n; ++v) {
      std::vector<int> offset(d, 0);
      std::function<bool(int)> try_moves = [&](int dim) {
        if (dim == d) {
          bool any = false;
          for (int c = 0; c < d; ++c) any |= offset[c] != 0;
          if (!any) return false;
          Eigen::MatrixXi trial = coords;
          for (int c = 0; c < d; ++c) trial(v, c) += offset[c];
          for (int u = 0; u < n; ++u) {
            if (u != v && trial.row(u) == trial.row(v)) return false;
          }
          const double cost = integer_cost(trial, dist, alpha);
          if (cost < best - 1e-12) {
            best = cost;
            coords = trial;
            return true;
          }
          return false;
        }
        for (int mv = -2; mv <= 2; ++mv) {
          offset[dim] = mv;
          if (try_moves(dim + 1)) return true;
        }
        offset[dim] = 0;
        return false;
      };
      improved |= try_moves(0);
    }
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        Eigen::MatrixXi trial = coords;
        trial.row(a).swap(trial.row(b));
        const double cost = integer_cost(trial, dist, alpha);
        if (cost < best - 1e-12) {
          best = cost;
          coords = trial;
          improved = true;
        }
      }
    }
  }
  return best;
}

}  // namespace

Embedding optimize_embedding(const Graph& g, int d, double alpha, int iterations,
                             std::uint64_t seed) {
  if (d < 1) throw std::invalid_argument("optimize_embedding: d must be >= 1");
  if (iterations < 1) throw std::invalid_argument("optimize_embedding: iterations must be >= 1");
  const int n = g.n_vertices;
  const Matrix dist = shortest_path_matrix(g);
  if (!dist.allFinite()) {
    throw std::invalid_argument("optimize_embedding: graph is disconnected");
  }
  const double diameter = dist.maxCoeff();

  Rng rng(seed);
  Matrix phi(n, d);
  for (int i = 0; i < n; ++i) {
    for (int c = 0; c < d; ++c) phi(i, c) = rng.next_double() * std::max(1.0, diameter);
  }

  // Barrier annealing over the outer iterations; each beta value gets a full
  // inner subgradient descent rather than a single step.
  double beta = 1e-6;
  const double gamma = 1.03;
  constexpr int kInnerSteps = 20;
  const double step0 = 0.05 * std::max(1.0, diameter);
  const long total_steps = static_cast<long>(iterations) * kInnerSteps;
  const double tau_step = total_steps / 4.0;

  Matrix grad(n, d);
  long t = 0;
  for (int i = 1; i <= iterations; ++i) {
    beta *= gamma;
    for (int inner = 0; inner < kInnerSteps; ++inner) {
      ++t;
      grad.setZero();
      for (int a = 0; a < n; ++a) {
        for (int b = a + 1; b < n; ++b) {
          const double l1 = (phi.row(a) - phi.row(b)).cwiseAbs().sum();
          const double outer = sgn(alpha * l1 - dist(a, b)) * alpha;
          if (outer == 0.0) continue;
          for (int c = 0; c < d; ++c) {
            const double s = sgn(phi(a, c) - phi(b, c));
            grad(a, c) += outer * s;
            grad(b, c) -= outer * s;
          }
        }
      }
      for (int a = 0; a < n; ++a) {
        for (int c = 0; c < d; ++c) {
          grad(a, c) += beta * sgn(phi(a, c) - std::round(phi(a, c)));
        }
      }
      grad /= 1.0 + beta;

      const double step = step0 / (1.0 + t / tau_step);
      for (int a = 0; a < n; ++a) {
        const double norm = grad.row(a).norm();
        if (norm > 0.0) phi.row(a) -= step / std::max(1.0, norm) * grad.row(a);
      }
    }
  }

  // Round to the lattice; later vertices colliding with earlier ones move to
  // the nearest free lattice point (ties resolved by scan order).
  Eigen::MatrixXi rounded(n, d);
  std::map<std::vector<int>, int> occupied;
  for (int i = 0; i < n; ++i) {
    std::vector<int> base(d);
    for (int c = 0; c < d; ++c) base[c] = static_cast<int>(std::llround(phi(i, c)));
    if (!occupied.count(base)) {
      occupied[base] = i;
    } else {
      bool placed = false;
      for (int radius = 1; !placed; ++radius) {
        // Lattice points at L1 distance `radius` from base, lexicographic scan.
        std::vector<int> offset(d, 0);
        std::vector<std::vector<int>> shell;
        std::function<void(int, int)> build = [&](int dim, int budget) {
          if (dim == d) {
            if (budget == 0) shell.push_back(offset);
            return;
          }
          for (int mv = -budget; mv <= budget; ++mv) {
            offset[dim] = mv;
            build(dim + 1, budget - std::abs(mv));
          }
          offset[dim] = 0;
        };
        build(0, radius);
        for (const auto& off : shell) {
          std::vector<int> candidate(d);
          for (int c = 0; c < d; ++c) candidate[c] = base[c] + off[c];
          if (!occupied.count(candidate)) {
            occupied[candidate] = i;
            base = candidate;
            placed = true;
            break;
          }
        }
      }
    }
    for (int c = 0; c < d; ++c) rounded(i, c) = base[c];
  }

  Embedding out;
  out.coords = rounded;
  out.alpha = alpha;
  out.cost = greedy_integer_refine(out.coords, dist, alpha);
  return out;
}

}  // namespace lg
