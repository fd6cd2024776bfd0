#include <doctest.h>

#include <cmath>
#include <numbers>

#include "latentgraph/graph.hpp"
#include "latentgraph/rng.hpp"
#include "latentgraph/spectral.hpp"

using namespace lg;

namespace {

Graph random_graph(int n, std::uint64_t seed, double density = 0.4) {
  Rng rng(seed);
  Matrix adj = Matrix::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j < n; ++j) {
      if (rng.next_double() < density) {
        const double w = rng.next_double();
        adj(i, j) = adj(j, i) = w;
      }
    }
  }
  return Graph::from_adjacency(adj);
}

Matrix random_signal(int n, int cols, std::uint64_t seed) {
  Rng rng(seed);
  Matrix s(n, cols);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < cols; ++j) s(i, j) = rng.next_gaussian();
  return s;
}

}  // namespace

TEST_CASE("combinatorial Laplacian of a connected graph has a zero eigenvalue") {
  const Graph g = ring_graph(6);
  const SpectralDecomposition dec = eigendecompose(g, LaplacianKind::Combinatorial);
  CHECK(std::abs(dec.eigenvalues(0)) < 1e-10);
  // Constant eigenvector up to sign and scale.
  const Vector v = dec.eigenvectors.col(0);
  CHECK((v.array() - v(0)).abs().maxCoeff() < 1e-9);
}

TEST_CASE("C4 normalized Laplacian eigenvalues are {0,1,1,2}") {
  const SpectralDecomposition dec =
      eigendecompose(ring_graph(4), LaplacianKind::SymmetricNormalized);
  Vector expected(4);
  expected << 0.0, 1.0, 1.0, 2.0;
  CHECK((dec.eigenvalues - expected).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("ring normalized eigenvalues match 1 - cos(2 pi k / n)") {
  for (int n : {5, 8, 12}) {
    const SpectralDecomposition dec =
        eigendecompose(ring_graph(n), LaplacianKind::SymmetricNormalized);
    std::vector<double> expected;
    for (int k = 0; k < n; ++k) expected.push_back(1.0 - std::cos(2.0 * std::numbers::pi * k / n));
    std::sort(expected.begin(), expected.end());
    for (int i = 0; i < n; ++i) CHECK(dec.eigenvalues(i) == doctest::Approx(expected[i]).epsilon(1e-8));
  }
}

TEST_CASE("single-edge pair has normalized eigenvalues {0,2}") {
  Matrix adj(2, 2);
  adj << 0.0, 1.0, 1.0, 0.0;
  const SpectralDecomposition dec =
      eigendecompose(Graph::from_adjacency(adj), LaplacianKind::SymmetricNormalized);
  CHECK(dec.eigenvalues(0) == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(dec.eigenvalues(1) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("asymmetric input is rejected") {
  Matrix m(2, 2);
  m << 0.0, 1.0, 0.5, 0.0;
  CHECK_THROWS_AS(eigendecompose(m, LaplacianKind::Combinatorial), std::invalid_argument);
}

TEST_CASE("eigendecompose is deterministic including signs") {
  const Graph g = random_graph(15, 99);
  const SpectralDecomposition a = eigendecompose(g, LaplacianKind::Combinatorial);
  const SpectralDecomposition b = eigendecompose(g, LaplacianKind::Combinatorial);
  CHECK((a.eigenvectors - b.eigenvectors).cwiseAbs().maxCoeff() == 0.0);
  for (int c = 0; c < 15; ++c) {
    int arg = 0;
    a.eigenvectors.col(c).cwiseAbs().maxCoeff(&arg);
    CHECK(a.eigenvectors(arg, c) > 0.0);
  }
}

TEST_CASE("gft of a constant signal concentrates on the first frequency") {
  const Graph g = ring_graph(8);
  const SpectralDecomposition dec = eigendecompose(g, LaplacianKind::Combinatorial);
  const Matrix s = Matrix::Constant(8, 1, 3.0);
  const Matrix freq = gft(s, dec);
  for (int i = 1; i < 8; ++i) CHECK(std::abs(freq(i, 0)) < 1e-9);
}

TEST_CASE("gft of an eigenvector is the matching indicator") {
  const Graph g = ring_graph(5);
  const SpectralDecomposition dec = eigendecompose(g, LaplacianKind::Combinatorial);
  const Matrix s = dec.eigenvectors.col(3);
  const Matrix freq = gft(s, dec);
  for (int i = 0; i < 5; ++i) {
    CHECK(freq(i, 0) == doctest::Approx(i == 3 ? 1.0 : 0.0).epsilon(1e-9));
  }
}

TEST_CASE("Parseval and round-trip on C8") {
  const Graph g = ring_graph(8);
  const SpectralDecomposition dec = eigendecompose(g, LaplacianKind::Combinatorial);
  const Matrix s = random_signal(8, 3, 17);
  const Matrix freq = gft(s, dec);
  CHECK(freq.norm() == doctest::Approx(s.norm()).epsilon(1e-8));
  CHECK((igft(freq, dec) - s).cwiseAbs().maxCoeff() < 1e-8);
}

TEST_CASE("gft rejects dimension mismatch") {
  const SpectralDecomposition dec = eigendecompose(ring_graph(4), LaplacianKind::Combinatorial);
  CHECK_THROWS_AS(gft(Matrix::Zero(5, 1), dec), std::invalid_argument);
}

TEST_CASE("smoothness of a constant signal is zero") {
  const Graph g = random_graph(10, 2);
  const Matrix l = laplacian(g, LaplacianKind::Combinatorial);
  const Vector sigma = smoothness(Matrix::Constant(10, 1, 5.0), l);
  CHECK(std::abs(sigma(0)) < 1e-9);
}

TEST_CASE("path graph hand smoothness value") {
  Matrix adj = Matrix::Zero(3, 3);
  adj(0, 1) = adj(1, 0) = 1.0;
  adj(1, 2) = adj(2, 1) = 1.0;
  const Graph g = Graph::from_adjacency(adj);
  Matrix s(3, 1);
  s << 0.0, 1.0, 2.0;
  const Vector sigma = smoothness(s, laplacian(g, LaplacianKind::Combinatorial));
  CHECK(sigma(0) == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("label indicators on disconnected class components are perfectly smooth") {
  Matrix adj = Matrix::Zero(4, 4);
  adj(0, 1) = adj(1, 0) = 1.0;
  adj(2, 3) = adj(3, 2) = 1.0;
  const Graph g = Graph::from_adjacency(adj);
  Matrix indicator = Matrix::Zero(4, 2);
  indicator(0, 0) = indicator(1, 0) = 1.0;
  indicator(2, 1) = indicator(3, 1) = 1.0;
  CHECK(smoothness_total(indicator, laplacian(g, LaplacianKind::Combinatorial)) ==
        doctest::Approx(0.0));
}

TEST_CASE("smoothness equals the half-sum edge form and the spectral form") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const Graph g = random_graph(30, seed);
    const Matrix l = laplacian(g, LaplacianKind::Combinatorial);
    const SpectralDecomposition dec = eigendecompose(l, LaplacianKind::Combinatorial);
    const Matrix s = random_signal(30, 1, seed + 100);

    const double quad = smoothness(s, l)(0);
    double brute = 0.0;
    for (int i = 0; i < 30; ++i) {
      for (int j = 0; j < 30; ++j) {
        brute += 0.5 * g.adjacency(i, j) * (s(i, 0) - s(j, 0)) * (s(i, 0) - s(j, 0));
      }
    }
    CHECK(quad == doctest::Approx(brute).epsilon(1e-9));

    const Matrix freq = gft(s, dec);
    double spectral = 0.0;
    for (int i = 0; i < 30; ++i) spectral += dec.eigenvalues(i) * freq(i, 0) * freq(i, 0);
    CHECK(quad == doctest::Approx(spectral).epsilon(1e-8));
  }
}

TEST_CASE("eigenmaps of a ring lie on a rotation-symmetric curve") {
  const int n = 12;
  const Graph g = ring_graph(n);
  const SpectralDecomposition dec = eigendecompose(g, LaplacianKind::Combinatorial);
  const Matrix coords = laplacian_eigenmaps_2d(dec);
  // Consecutive points are equidistant on the ellipse.
  const double d0 = (coords.row(0) - coords.row(1)).norm();
  for (int i = 1; i < n; ++i) {
    const double di = (coords.row(i) - coords.row((i + 1) % n)).norm();
    CHECK(di == doctest::Approx(d0).epsilon(1e-6));
  }
  // Orthogonal to the constant vector.
  CHECK(std::abs(coords.col(0).sum()) < 1e-8);
  CHECK(std::abs(coords.col(1).sum()) < 1e-8);
}

TEST_CASE("eigenmaps reject heavily disconnected graphs unless allowed") {
  Matrix adj = Matrix::Zero(6, 6);
  adj(0, 1) = adj(1, 0) = 1.0;
  adj(2, 3) = adj(3, 2) = 1.0;
  adj(4, 5) = adj(5, 4) = 1.0;
  const Graph g = Graph::from_adjacency(adj);
  const SpectralDecomposition dec = eigendecompose(g, LaplacianKind::Combinatorial);
  CHECK_THROWS_AS(laplacian_eigenmaps_2d(dec), std::domain_error);
  const Matrix coords = laplacian_eigenmaps_2d(dec, true);
  CHECK(coords.rows() == 6);
}

TEST_CASE("fiedler vector of a path is monotone") {
  const int n = 7;
  Matrix adj = Matrix::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) adj(i, i + 1) = adj(i + 1, i) = 1.0;
  const SpectralDecomposition dec =
      eigendecompose(Graph::from_adjacency(adj), LaplacianKind::Combinatorial);
  const Vector f = fiedler_vector(dec);
  const double direction = f(1) - f(0) > 0 ? 1.0 : -1.0;
  for (int i = 0; i + 1 < n; ++i) CHECK(direction * (f(i + 1) - f(i)) > 0.0);
}

TEST_CASE("fiedler vector on C4 sums to zero, errors on disconnected input") {
  const SpectralDecomposition dec = eigendecompose(ring_graph(4), LaplacianKind::Combinatorial);
  CHECK(std::abs(fiedler_vector(dec).sum()) < 1e-9);

  Matrix adj = Matrix::Zero(4, 4);
  adj(0, 1) = adj(1, 0) = 1.0;
  adj(2, 3) = adj(3, 2) = 1.0;
  const SpectralDecomposition disc =
      eigendecompose(Graph::from_adjacency(adj), LaplacianKind::Combinatorial);
  CHECK_THROWS_AS(fiedler_vector(disc), std::domain_error);
}

TEST_CASE("fiedler sign split follows a weak bridge between two blocks") {
  // Two triangles joined by one weak edge (2-3).
  Matrix adj = Matrix::Zero(6, 6);
  auto connect = [&](int i, int j, double w) { adj(i, j) = adj(j, i) = w; };
  connect(0, 1, 1.0);
  connect(0, 2, 1.0);
  connect(1, 2, 1.0);
  connect(3, 4, 1.0);
  connect(3, 5, 1.0);
  connect(4, 5, 1.0);
  connect(2, 3, 0.05);
  const SpectralDecomposition dec =
      eigendecompose(Graph::from_adjacency(adj), LaplacianKind::Combinatorial);
  const Vector f = fiedler_vector(dec);
  CHECK(f(0) * f(1) > 0.0);
  CHECK(f(0) * f(2) > 0.0);
  CHECK(f(3) * f(4) > 0.0);
  CHECK(f(3) * f(5) > 0.0);
  CHECK(f(0) * f(3) < 0.0);
}
