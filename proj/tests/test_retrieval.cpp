#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "latentgraph/retrieval.hpp"
#include "latentgraph/rng.hpp"
#include "latentgraph/spectral.hpp"

using namespace lg;

namespace {

std::vector<RetrievalItem> line_items(int n, double spacing_m, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<RetrievalItem> items(n);
  for (int i = 0; i < n; ++i) {
    items[i].feature = Vector::Zero(4);
    for (int j = 0; j < 4; ++j) items[i].feature(j) = 1.0 + rng.next_double();
    // Walk north from a fixed origin; 1e-5 deg latitude is about 1.11 m.
    items[i].gps = {45.0 + i * spacing_m * 1e-5 / 1.11, 3.0};
    items[i].sequence_id = 0;
    items[i].frame_index = i;
  }
  return items;
}

Matrix random_features(int n, int f, std::uint64_t seed) {
  Rng rng(seed);
  Matrix m(n, f);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < f; ++j) m(i, j) = rng.next_gaussian();
  return m;
}

}  // namespace

TEST_CASE("haversine at identical points is zero and grows with latitude gap") {
  CHECK(haversine_m(45.0, 3.0, 45.0, 3.0) == 0.0);
  const double d = haversine_m(45.0, 3.0, 45.001, 3.0);
  CHECK(d == doctest::Approx(111.2).epsilon(0.01));
}

TEST_CASE("dist channel: zero distance gives weight one, cutoff drops far pairs") {
  auto items = line_items(3, 30.0, 1);
  items[1].gps = items[0].gps;  // coincident pair
  VblGraphParams params;
  params.max_distance = 50.0;
  params.use_seq = false;
  params.use_latent_sim = false;
  const Graph g = build_vbl_adjacency(items, params);
  CHECK(g.adjacency(0, 1) == doctest::Approx(1.0));  // e^0
  // Item 2 sits 60 m from item 0, beyond the 50 m cutoff.
  CHECK(haversine_m(items[0].gps->first, items[0].gps->second, items[2].gps->first,
                    items[2].gps->second) == doctest::Approx(60.0).epsilon(0.01));
  CHECK(g.adjacency(0, 2) == 0.0);
}

TEST_CASE("dist cutoff is strict") {
  auto items = line_items(2, 100.0, 2);
  VblGraphParams params;
  params.max_distance = 50.0;
  params.use_seq = false;
  params.use_latent_sim = false;
  const Graph g = build_vbl_adjacency(items, params);
  CHECK(g.adjacency(0, 1) == 0.0);
}

TEST_CASE("sequence channel pays beta_k at frame distance k") {
  auto items = line_items(6, 1000.0, 3);  // far apart: dist channel silent
  VblGraphParams params;
  params.max_distance = 10.0;
  params.betas = {0.75, 0.0625, 0.015};
  params.use_latent_sim = false;
  const Graph g = build_vbl_adjacency(items, params);
  CHECK(g.adjacency(3, 5) == doctest::Approx(0.0625));  // frames 3 and 5: beta_2
  CHECK(g.adjacency(0, 1) == doctest::Approx(0.75));
  CHECK(g.adjacency(0, 3) == doctest::Approx(0.015));
  CHECK(g.adjacency(0, 4) == 0.0);  // beyond k_max
}

TEST_CASE("latent similarity is gated by the other two channels") {
  auto items = line_items(2, 5000.0, 4);  // beyond any distance cutoff
  items[0].sequence_id = 0;
  items[1].sequence_id = 1;  // different sequences: seq channel silent
  VblGraphParams params;
  params.max_distance = 10.0;
  const Graph g = build_vbl_adjacency(items, params);
  CHECK(g.adjacency(0, 1) == 0.0);  // cosine is high, but both gates are shut
}

TEST_CASE("full adjacency equals the entrywise sum of the three channels") {
  const auto items = line_items(8, 12.0, 5);
  VblGraphParams params;
  params.max_distance = 40.0;

  const VblChannels channels = build_vbl_channels(items, params);
  const Graph g = build_vbl_adjacency(items, params);
  CHECK((g.adjacency - (channels.dist + channels.seq + channels.latent_sim))
            .cwiseAbs()
            .maxCoeff() < 1e-15);
  CHECK(channels.dist.minCoeff() >= 0.0);
  CHECK(channels.seq.minCoeff() >= 0.0);
  CHECK(channels.latent_sim.minCoeff() >= 0.0);

  // Disabling a channel never increases any entry.
  auto disabled = [&](bool dist, bool seq, bool latent) {
    VblGraphParams p = params;
    p.use_dist = dist;
    p.use_seq = seq;
    p.use_latent_sim = latent;
    return build_vbl_adjacency(items, p).adjacency;
  };
  for (const Matrix& reduced : {disabled(true, true, false), disabled(true, false, false),
                                disabled(false, true, false)}) {
    CHECK(((g.adjacency - reduced).minCoeff()) >= -1e-15);
  }

  CHECK((g.adjacency - g.adjacency.transpose()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(g.adjacency.diagonal().cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("IR mode uses binary same-class distance weights") {
  auto items = line_items(4, 10.0, 6);
  for (int i = 0; i < 4; ++i) {
    items[i].gps.reset();
    items[i].sequence_id.reset();
    items[i].frame_index.reset();
    items[i].class_id = i / 2;
  }
  VblGraphParams params;
  params.class_distance = true;
  params.use_seq = false;
  params.use_latent_sim = false;
  const Graph g = build_vbl_adjacency(items, params);
  CHECK(g.adjacency(0, 1) == 1.0);
  CHECK(g.adjacency(2, 3) == 1.0);
  CHECK(g.adjacency(0, 2) == 0.0);
}

TEST_CASE("missing metadata for a requested channel is an error") {
  auto items = line_items(3, 10.0, 7);
  items[1].gps.reset();
  VblGraphParams params;
  CHECK_THROWS_AS(build_vbl_adjacency(items, params), std::invalid_argument);
}

TEST_CASE("smoothing with m=0 is the identity") {
  const auto items = line_items(6, 10.0, 8);
  const Graph g = build_vbl_adjacency(items, VblGraphParams{});
  const Matrix features = random_features(6, 5, 9);
  CHECK((smooth_features(features, g, 0.1, 0) - features).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("the degree-scaled constant vector is fixed by the smoother") {
  const auto items = line_items(7, 10.0, 10);
  const Graph g = build_vbl_adjacency(items, VblGraphParams{});
  Matrix fixed(7, 1);
  for (int i = 0; i < 7; ++i) fixed(i, 0) = std::sqrt(g.degree(i));
  const Matrix out = smooth_features(fixed, g, 0.1, 25);
  CHECK((out - fixed).cwiseAbs().maxCoeff() < 1e-9);
}

TEST_CASE("smoothing is linear and leaves isolated vertices untouched") {
  auto items = line_items(5, 10.0, 11);
  items[4].gps = {10.0, 120.0};  // far away
  items[4].sequence_id = 99;
  const Graph g = build_vbl_adjacency(items, VblGraphParams{});
  CHECK(g.degree(4) == 0.0);

  const Matrix a = random_features(5, 3, 12);
  const Matrix b = random_features(5, 3, 13);
  const Matrix lhs = smooth_features(a + 2.0 * b, g, 0.1, 20);
  const Matrix rhs = smooth_features(a, g, 0.1, 20) + 2.0 * smooth_features(b, g, 0.1, 20);
  CHECK((lhs - rhs).cwiseAbs().maxCoeff() < 1e-9);
  CHECK((smooth_features(a, g, 0.1, 20).row(4) - a.row(4)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("smoothing monotonically reduces the Laplacian quadratic form") {
  const auto items = line_items(10, 8.0, 14);
  const Graph g = build_vbl_adjacency(items, VblGraphParams{});
  const Matrix features = random_features(10, 4, 15);

  // Same lenient normalized Laplacian the smoother applies.
  Vector dinv(10);
  for (int i = 0; i < 10; ++i) dinv(i) = g.degree(i) > 0 ? 1.0 / std::sqrt(g.degree(i)) : 0.0;
  Matrix lap = -(dinv.asDiagonal() * g.adjacency * dinv.asDiagonal());
  for (int i = 0; i < 10; ++i) {
    if (g.degree(i) > 0) lap(i, i) += 1.0;
  }
  double previous = std::numeric_limits<double>::infinity();
  for (int m = 0; m <= 40; ++m) {
    const Matrix out = smooth_features(features, g, 0.1, m);
    const double sigma = (out.transpose() * lap * out).trace();
    CHECK(sigma <= previous + 1e-9);
    previous = sigma;
  }
}

TEST_CASE("retrieve ranks an exact match first and ties by index") {
  Matrix support = random_features(5, 4, 16);
  Matrix query(2, 4);
  query.row(0) = support.row(3);
  query.row(1) = Vector::Zero(4).transpose();
  query(1, 0) = 1.0;
  Matrix orth_support = Matrix::Zero(3, 4);
  orth_support(0, 1) = 1.0;
  orth_support(1, 2) = 1.0;
  orth_support(2, 3) = 1.0;

  const auto ranked = retrieve(query.topRows(1), support, 5);
  CHECK(ranked[0][0] == 3);

  // Orthogonal query: all similarities zero, ranking = index order.
  const auto tied = retrieve(query.bottomRows(1), orth_support, 3);
  CHECK(tied[0] == std::vector<int>{0, 1, 2});
}

TEST_CASE("retrieve matches an exhaustive sort on a 3-item fixture") {
  Matrix support(3, 2);
  support << 1.0, 0.0,
             0.8, 0.6,
             0.0, 1.0;
  Matrix query(1, 2);
  query << 1.0, 0.1;
  const auto ranked = retrieve(query, support, 3);
  CHECK(ranked[0] == std::vector<int>{0, 1, 2});
}

TEST_CASE("perfect ranking gives mAP 1 and the 5/6 hand case holds") {
  CHECK(mean_average_precision({{0, 1, 2}}, {{0, 1, 2}}) == doctest::Approx(1.0));
  // Relevant at ranks 1 and 3 out of 3 retrieved: AP = (1 + 2/3) / 2.
  CHECK(average_precision({7, 8, 9}, {7, 9}) == doctest::Approx(5.0 / 6.0));
}

TEST_CASE("mAP matches brute force over all rankings of small supports") {
  // Every permutation of n <= 6 supports, a fixed relevance set.
  for (int n : {4, 5, 6}) {
    std::vector<int> ranking(n);
    for (int i = 0; i < n; ++i) ranking[i] = i;
    const std::vector<int> relevant = {0, 2};
    do {
      double ap = 0.0;
      int hits = 0;
      for (int k = 0; k < n; ++k) {
        if (ranking[k] == 0 || ranking[k] == 2) {
          ++hits;
          ap += static_cast<double>(hits) / (k + 1);
        }
      }
      ap /= 2.0;
      CHECK(average_precision(ranking, relevant) == doctest::Approx(ap).epsilon(1e-12));
    } while (std::next_permutation(ranking.begin(), ranking.end()));
  }
}

TEST_CASE("promoting a relevant item never decreases AP") {
  Rng rng(17);
  for (int trial = 0; trial < 50; ++trial) {
    const int n = 6;
    std::vector<int> ranking = rng.permutation(n);
    const std::vector<int> relevant = {1, 4};
    const double base = average_precision(ranking, relevant);
    for (int pos = 1; pos < n; ++pos) {
      if ((ranking[pos] == 1 || ranking[pos] == 4)) {
        std::vector<int> promoted = ranking;
        std::swap(promoted[pos], promoted[pos - 1]);
        CHECK(average_precision(promoted, relevant) >= base - 1e-12);
      }
    }
  }
}

TEST_CASE("queries with empty relevance sets are disregarded") {
  const double v = mean_average_precision({{0, 1}, {1, 0}}, {{0}, {}});
  CHECK(v == doctest::Approx(1.0));
  CHECK_THROWS_AS(mean_average_precision({{0, 1}}, {{}}), std::invalid_argument);
  CHECK_THROWS_AS(mean_average_precision({}, {}), std::invalid_argument);
}

TEST_CASE("localization metrics on a synthetic line of poses") {
  std::vector<std::pair<double, double>> queries, retrieved;
  // Errors of 0, ~11.1, ~22.2, ~33.3, ~44.5 meters.
  for (int i = 0; i < 5; ++i) {
    queries.push_back({45.0, 3.0});
    retrieved.push_back({45.0 + i * 1e-4, 3.0});
  }
  const LocalizationMetrics m = localization_metrics(queries, retrieved);
  CHECK(m.median_error_m == doctest::Approx(haversine_m(45.0, 3.0, 45.0002, 3.0)).epsilon(1e-9));
  CHECK(m.fraction_under_25m == doctest::Approx(3.0 / 5.0));
}

TEST_CASE("identical poses count toward the accuracy bucket; 25 m exactly does not") {
  std::vector<std::pair<double, double>> queries = {{0.0, 0.0}, {0.0, 0.0}};
  std::vector<std::pair<double, double>> retrieved = {{0.0, 0.0}, {25.0, 0.0}};
  const LocalizationMetrics m = localization_metrics(queries, retrieved, true);
  CHECK(m.fraction_under_25m == doctest::Approx(0.5));  // planar 25.0 excluded
}

TEST_CASE("mAP is invariant under query permutation") {
  const std::vector<std::vector<int>> rankings = {{0, 1, 2}, {2, 1, 0}, {1, 0, 2}};
  const std::vector<std::vector<int>> relevance = {{0}, {0, 2}, {1}};
  const double base = mean_average_precision(rankings, relevance);
  const double swapped = mean_average_precision({rankings[2], rankings[0], rankings[1]},
                                                {relevance[2], relevance[0], relevance[1]});
  CHECK(base == doctest::Approx(swapped).epsilon(1e-15));
}

TEST_CASE("smoothing commutes with feature-column permutation") {
  const auto items = line_items(8, 10.0, 21);
  const Graph g = build_vbl_adjacency(items, VblGraphParams{});
  const Matrix features = random_features(8, 4, 22);
  const Matrix smoothed = smooth_features(features, g, 0.1, 15);

  Matrix permuted(8, 4);
  const int order[4] = {2, 0, 3, 1};
  for (int j = 0; j < 4; ++j) permuted.col(j) = features.col(order[j]);
  const Matrix smoothed_permuted = smooth_features(permuted, g, 0.1, 15);
  for (int j = 0; j < 4; ++j) {
    CHECK((smoothed_permuted.col(j) - smoothed.col(order[j])).cwiseAbs().maxCoeff() == 0.0);
  }
}
