#pragma once

#include <optional>
#include <string>

#include "latentgraph/graph.hpp"
#include "latentgraph/spectral.hpp"

namespace lg {

// Parametrized spectral response h(lambda). SGC and PageRank act on raw
// augmented-Laplacian eigenvalues; Simoncelli thresholds eigenvalues
// normalized by lambda_max; the Balcilar responses take lambda_max in their
// formulas; the rest act on raw eigenvalues.
struct SpectralResponseFilter {
  enum class Kind {
    Sgc,              // (1 - x)^m
    Tikhonov,         // 1 / (1 + alpha x)
    VblPoly,          // (1 - a x)^m
    BalcilarLowpass,  // ((lmax - x) / lmax)^m
    BalcilarBand,     // exp(-alpha (c lmax - x)^2)
    PageRank,         // alpha / (alpha (1 - x) + x)
    Simoncelli,       // smooth low-pass, cutoff tau on x / lmax
    BandIndices,      // positional: 1 up to f1, mid_gain up to f2, then 0
  };

  Kind kind = Kind::Sgc;
  int m = 1;
  double alpha = 0.0;
  double a = 0.0;
  double center_fraction = 0.5;
  double tau = 0.0;
  int f1 = 0;
  int f2 = 0;
  double mid_gain = 0.0;

  static SpectralResponseFilter sgc(int m);
  static SpectralResponseFilter tikhonov(double alpha);
  static SpectralResponseFilter vbl_poly(double a, int m);
  static SpectralResponseFilter balcilar_lowpass(int m);
  static SpectralResponseFilter balcilar_band(double alpha, double center_fraction);
  static SpectralResponseFilter pagerank(double alpha);
  static SpectralResponseFilter simoncelli(double tau);
  static SpectralResponseFilter band_indices(int f1, int f2, double mid_gain);

  // Laplacian kind the filter expects its decomposition to come from, when it
  // has a fixed requirement (SGC and PageRank want the augmented kind).
  std::optional<LaplacianKind> expected_laplacian() const;

  bool positional() const { return kind == Kind::BandIndices; }

  std::string spec() const;
};

// Config-file grammar: name{key=value,...}, e.g. "sgc{m=2}",
// "tikhonov{alpha=10}", "page{alpha=0.1}", "simoncelli{tau=0.3}",
// "band{f1=1,f2=3,mid=0.2}", "vbl{a=0.1,m=20}", "balcilar_low{m=5}",
// "balcilar_band{alpha=1,center=0.5}".
SpectralResponseFilter parse_filter_spec(const std::string& spec);

// Pointwise h over the given eigenvalues. lambda_max feeds the responses that
// need it (Simoncelli, Balcilar); when absent the maximum of `lambdas` is
// used. BandIndices is positional over the vector.
Vector evaluate_response(const SpectralResponseFilter& filter, const Vector& lambdas,
                         std::optional<double> lambda_max = std::nullopt);

// F diag(h(lambda)) F^T s.
Matrix apply_spectral(const SpectralResponseFilter& filter, const Matrix& signal,
                      const SpectralDecomposition& dec);

// S applied m times to the signal; S^m is never materialized.
struct DiffusionFilter {
  Matrix s;
  int m = 1;
};

Matrix apply_diffusion(const DiffusionFilter& filter, const Matrix& signal);

// Chebyshev expansion of h on [0, lambda_max], applied through the three-term
// recurrence on 2 L / lambda_max - I. Coefficients come from cosine
// quadrature with 2 * order sample points.
Matrix apply_chebyshev(const SpectralResponseFilter& filter, const Matrix& signal, const Matrix& l,
                       double lambda_max, int order);

// alpha (I - (1 - alpha) s_aug)^{-1}, materialized through a linear solve.
Matrix pagerank_diffusion_matrix(const Matrix& s_aug, double alpha);

// Dense diffusion operator implementing the filter on this graph: matrix
// powers for the polynomial responses, a linear solve for Tikhonov and
// PageRank, spectral materialization otherwise.
Matrix compile_diffusion(const SpectralResponseFilter& filter, const Graph& g);

}  // namespace lg
