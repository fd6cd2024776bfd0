#include "latentgraph/filters.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace lg {

SpectralResponseFilter SpectralResponseFilter::sgc(int m) {
  if (m < 0) throw std::invalid_argument("sgc: m must be >= 0");
  SpectralResponseFilter f;
  f.kind = Kind::Sgc;
  f.m = m;
  return f;
}

SpectralResponseFilter SpectralResponseFilter::tikhonov(double alpha) {
  if (alpha <= 0.0) throw std::invalid_argument("tikhonov: alpha must be positive");
  SpectralResponseFilter f;
  f.kind = Kind::Tikhonov;
  f.alpha = alpha;
  return f;
}

SpectralResponseFilter SpectralResponseFilter::vbl_poly(double a, int m) {
  if (a <= 0.0 || a > 0.5) throw std::invalid_argument("vbl: a must lie in (0, 0.5]");
  if (m < 0) throw std::invalid_argument("vbl: m must be >= 0");
  SpectralResponseFilter f;
  f.kind = Kind::VblPoly;
  f.a = a;
  f.m = m;
  return f;
}

SpectralResponseFilter SpectralResponseFilter::balcilar_lowpass(int m) {
  if (m < 0) throw std::invalid_argument("balcilar_low: m must be >= 0");
  SpectralResponseFilter f;
  f.kind = Kind::BalcilarLowpass;
  f.m = m;
  return f;
}

SpectralResponseFilter SpectralResponseFilter::balcilar_band(double alpha,
                                                             double center_fraction) {
  if (alpha <= 0.0) throw std::invalid_argument("balcilar_band: alpha must be positive");
  if (center_fraction != 0.25 && center_fraction != 0.5 && center_fraction != 0.75) {
    throw std::invalid_argument("balcilar_band: center must be one of 0.25, 0.5, 0.75");
  }
  SpectralResponseFilter f;
  f.kind = Kind::BalcilarBand;
  f.alpha = alpha;
  f.center_fraction = center_fraction;
  return f;
}

SpectralResponseFilter SpectralResponseFilter::pagerank(double alpha) {
  if (alpha <= 0.0 || alpha >= 1.0) throw std::invalid_argument("page: alpha must lie in (0, 1)");
  SpectralResponseFilter f;
  f.kind = Kind::PageRank;
  f.alpha = alpha;
  return f;
}

SpectralResponseFilter SpectralResponseFilter::simoncelli(double tau) {
  if (tau <= 0.0 || tau > 1.0) throw std::invalid_argument("simoncelli: tau must lie in (0, 1]");
  SpectralResponseFilter f;
  f.kind = Kind::Simoncelli;
  f.tau = tau;
  return f;
}

SpectralResponseFilter SpectralResponseFilter::band_indices(int f1, int f2, double mid_gain) {
  if (f1 < 0 || f2 < f1) throw std::invalid_argument("band: need 0 <= f1 <= f2");
  SpectralResponseFilter f;
  f.kind = Kind::BandIndices;
  f.f1 = f1;
  f.f2 = f2;
  f.mid_gain = mid_gain;
  return f;
}

std::optional<LaplacianKind> SpectralResponseFilter::expected_laplacian() const {
  if (kind == Kind::Sgc || kind == Kind::PageRank) {
    return LaplacianKind::AugmentedSymmetricNormalized;
  }
  return std::nullopt;
}

namespace {

std::string trim_num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

}  // namespace

std::string SpectralResponseFilter::spec() const {
  switch (kind) {
    case Kind::Sgc:
      return "sgc{m=" + std::to_string(m) + "}";
    case Kind::Tikhonov:
      return "tikhonov{alpha=" + trim_num(alpha) + "}";
    case Kind::VblPoly:
      return "vbl{a=" + trim_num(a) + ",m=" + std::to_string(m) + "}";
    case Kind::BalcilarLowpass:
      return "balcilar_low{m=" + std::to_string(m) + "}";
    case Kind::BalcilarBand:
      return "balcilar_band{alpha=" + trim_num(alpha) + ",center=" + trim_num(center_fraction) + "}";
    case Kind::PageRank:
      return "page{alpha=" + trim_num(alpha) + "}";
    case Kind::Simoncelli:
      return "simoncelli{tau=" + trim_num(tau) + "}";
    case Kind::BandIndices:
      return "band{f1=" + std::to_string(f1) + ",f2=" + std::to_string(f2) +
             ",mid=" + trim_num(mid_gain) + "}";
  }
  throw std::logic_error("SpectralResponseFilter::spec: unknown kind");
}

namespace {

std::map<std::string, std::string> parse_params(const std::string& body, const std::string& spec) {
  std::map<std::string, std::string> params;
  if (body.empty()) return params;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 >= item.size()) {
      throw std::invalid_argument("filter spec '" + spec + "': malformed parameter token '" +
                                  item + "'");
    }
    params[item.substr(0, eq)] = item.substr(eq + 1);
  }
  return params;
}

double need_double(const std::map<std::string, std::string>& params, const std::string& key,
                   const std::string& spec) {
  const auto it = params.find(key);
  if (it == params.end()) {
    throw std::invalid_argument("filter spec '" + spec + "': missing parameter '" + key + "'");
  }
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(it->second, &pos);
  } catch (const std::exception&) {
    pos = 0;
  }
  if (pos != it->second.size()) {
    throw std::invalid_argument("filter spec '" + spec + "': bad numeric value '" + it->second +
                                "' for '" + key + "'");
  }
  return v;
}

int need_int(const std::map<std::string, std::string>& params, const std::string& key,
             const std::string& spec) {
  const double v = need_double(params, key, spec);
  if (v != std::floor(v)) {
    throw std::invalid_argument("filter spec '" + spec + "': parameter '" + key +
                                "' must be an integer");
  }
  return static_cast<int>(v);
}

}  // namespace

SpectralResponseFilter parse_filter_spec(const std::string& spec) {
  const auto open = spec.find('{');
  std::string name = spec;
  std::string body;
  if (open != std::string::npos) {
    if (spec.back() != '}') {
      throw std::invalid_argument("filter spec '" + spec + "': missing closing brace");
    }
    name = spec.substr(0, open);
    body = spec.substr(open + 1, spec.size() - open - 2);
  }
  const auto params = parse_params(body, spec);

  if (name == "sgc") return SpectralResponseFilter::sgc(need_int(params, "m", spec));
  if (name == "tikhonov") return SpectralResponseFilter::tikhonov(need_double(params, "alpha", spec));
  if (name == "vbl") {
    return SpectralResponseFilter::vbl_poly(need_double(params, "a", spec),
                                            need_int(params, "m", spec));
  }
  if (name == "balcilar_low") {
    return SpectralResponseFilter::balcilar_lowpass(need_int(params, "m", spec));
  }
  if (name == "balcilar_band") {
    return SpectralResponseFilter::balcilar_band(need_double(params, "alpha", spec),
                                                 need_double(params, "center", spec));
  }
  if (name == "page") return SpectralResponseFilter::pagerank(need_double(params, "alpha", spec));
  if (name == "simoncelli") {
    return SpectralResponseFilter::simoncelli(need_double(params, "tau", spec));
  }
  if (name == "band") {
    return SpectralResponseFilter::band_indices(need_int(params, "f1", spec),
                                                need_int(params, "f2", spec),
                                                need_double(params, "mid", spec));
  }
  throw std::invalid_argument("filter spec '" + spec + "': unknown filter name '" + name + "'");
}

namespace {

double simoncelli_kernel(double x, double tau) {
  // Continuous low-pass: 1 on [0, tau/2], cosine rolloff down to 0 at tau.
  if (x <= tau / 2.0) return 1.0;
  if (x >= tau) return 0.0;
  return std::cos(std::numbers::pi / 2.0 * std::log2(x / (tau / 2.0)));
}

}  // namespace

Vector evaluate_response(const SpectralResponseFilter& filter, const Vector& lambdas,
                         std::optional<double> lambda_max) {
  const int n = static_cast<int>(lambdas.size());
  Vector h(n);

  if (filter.positional()) {
    if (filter.f2 > n) {
      throw std::invalid_argument("band: f2=" + std::to_string(filter.f2) + " exceeds n=" +
                                  std::to_string(n));
    }
    for (int i = 0; i < n; ++i) {
      const int pos = i + 1;
      h(i) = pos <= filter.f1 ? 1.0 : (pos <= filter.f2 ? filter.mid_gain : 0.0);
    }
    return h;
  }

  double lmax = lambda_max.value_or(n > 0 ? lambdas.maxCoeff() : 0.0);
  if (lmax <= 0.0) lmax = 1.0;  // degenerate spectrum: everything is DC

  for (int i = 0; i < n; ++i) {
    const double x = lambdas(i);
    switch (filter.kind) {
      case SpectralResponseFilter::Kind::Sgc:
        h(i) = std::pow(1.0 - x, filter.m);
        break;
      case SpectralResponseFilter::Kind::Tikhonov:
        h(i) = 1.0 / (1.0 + filter.alpha * x);
        break;
      case SpectralResponseFilter::Kind::VblPoly:
        h(i) = std::pow(1.0 - filter.a * x, filter.m);
        break;
      case SpectralResponseFilter::Kind::BalcilarLowpass:
        h(i) = std::pow((lmax - x) / lmax, filter.m);
        break;
      case SpectralResponseFilter::Kind::BalcilarBand: {
        const double c = filter.center_fraction * lmax;
        h(i) = std::exp(-filter.alpha * (c - x) * (c - x));
        break;
      }
      case SpectralResponseFilter::Kind::PageRank: {
        const double den = filter.alpha * (1.0 - x) + x;
        if (den <= 0.0) {
          throw std::domain_error("page: response undefined at lambda=" + std::to_string(x));
        }
        h(i) = filter.alpha / den;
        break;
      }
      case SpectralResponseFilter::Kind::Simoncelli:
        h(i) = simoncelli_kernel(x / lmax, filter.tau);
        break;
      case SpectralResponseFilter::Kind::BandIndices:
        throw std::logic_error("unreachable");
    }
  }
  return h;
}

Matrix apply_spectral(const SpectralResponseFilter& filter, const Matrix& signal,
                      const SpectralDecomposition& dec) {
  if (signal.rows() != dec.eigenvectors.rows()) {
    throw std::invalid_argument("apply_spectral: signal/decomposition size mismatch");
  }
  if (const auto expected = filter.expected_laplacian();
      expected.has_value() && dec.source_kind != *expected) {
    throw std::invalid_argument("apply_spectral: filter '" + filter.spec() +
                                "' expects the augmented normalized Laplacian");
  }
  const Vector h = evaluate_response(filter, dec.eigenvalues, dec.lambda_max());
  return dec.eigenvectors * (h.asDiagonal() * (dec.eigenvectors.transpose() * signal));
}

Matrix apply_diffusion(const DiffusionFilter& filter, const Matrix& signal) {
  if (filter.s.rows() != filter.s.cols()) {
    throw std::invalid_argument("apply_diffusion: S must be square");
  }
  if (signal.rows() != filter.s.rows()) {
    throw std::invalid_argument("apply_diffusion: signal/operator size mismatch");
  }
  if (filter.m < 0) throw std::invalid_argument("apply_diffusion: m must be >= 0");
  Matrix out = signal;
  for (int i = 0; i < filter.m; ++i) out = filter.s * out;
  return out;
}

Matrix apply_chebyshev(const SpectralResponseFilter& filter, const Matrix& signal, const Matrix& l,
                       double lambda_max, int order) {
  if (filter.positional()) {
    throw std::invalid_argument("apply_chebyshev: positional filters have no spectral response");
  }
  if (order < 1) throw std::invalid_argument("apply_chebyshev: order must be >= 1");
  if (lambda_max <= 0.0) throw std::invalid_argument("apply_chebyshev: lambda_max must be > 0");
  if (l.rows() != l.cols() || signal.rows() != l.rows()) {
    throw std::invalid_argument("apply_chebyshev: dimension mismatch");
  }

  // Cosine quadrature for the Chebyshev coefficients of h on [0, lambda_max].
  const int n_samples = 2 * order;
  Vector sample_lambdas(n_samples);
  std::vector<double> angles(n_samples);
  for (int j = 0; j < n_samples; ++j) {
    angles[j] = std::numbers::pi * (j + 0.5) / n_samples;
    sample_lambdas(j) = lambda_max * (std::cos(angles[j]) + 1.0) / 2.0;
  }
  const Vector hv = evaluate_response(filter, sample_lambdas, lambda_max);
  Vector coeff(order + 1);
  for (int k = 0; k <= order; ++k) {
    double acc = 0.0;
    for (int j = 0; j < n_samples; ++j) acc += hv(j) * std::cos(k * angles[j]);
    coeff(k) = 2.0 * acc / n_samples;
  }

  // Three-term recurrence on the rescaled operator 2 L / lambda_max - I.
  const Matrix lhat = 2.0 / lambda_max * l - Matrix::Identity(l.rows(), l.cols());
  Matrix t_prev = signal;          // T_0 s
  Matrix t_curr = lhat * signal;   // T_1 s
  Matrix out = coeff(0) / 2.0 * t_prev;
  if (order >= 1) out += coeff(1) * t_curr;
  for (int k = 2; k <= order; ++k) {
    Matrix t_next = 2.0 * (lhat * t_curr) - t_prev;
    out += coeff(k) * t_next;
    t_prev = std::move(t_curr);
    t_curr = std::move(t_next);
  }
  return out;
}

Matrix pagerank_diffusion_matrix(const Matrix& s_aug, double alpha) {
  if (alpha <= 0.0 || alpha >= 1.0) {
    throw std::invalid_argument("pagerank_diffusion_matrix: alpha must lie in (0, 1)");
  }
  if (s_aug.rows() != s_aug.cols()) {
    throw std::invalid_argument("pagerank_diffusion_matrix: S must be square");
  }
  const int n = static_cast<int>(s_aug.rows());
  const Matrix system = Matrix::Identity(n, n) - (1.0 - alpha) * s_aug;
  Eigen::PartialPivLU<Matrix> lu(system);
  const Matrix out = alpha * lu.solve(Matrix::Identity(n, n));
  if (!out.allFinite()) {
    throw std::runtime_error("pagerank_diffusion_matrix: singular system");
  }
  return out;
}

Matrix compile_diffusion(const SpectralResponseFilter& filter, const Graph& g) {
  const int n = g.n_vertices;
  using Kind = SpectralResponseFilter::Kind;
  switch (filter.kind) {
    case Kind::Sgc: {
      const Matrix s = normalize_adjacency(g, AdjacencyNormalization::AugmentedSymmetricDegree);
      Matrix out = Matrix::Identity(n, n);
      for (int i = 0; i < filter.m; ++i) out = s * out;
      return out;
    }
    case Kind::PageRank: {
      const Matrix s = normalize_adjacency(g, AdjacencyNormalization::AugmentedSymmetricDegree);
      return pagerank_diffusion_matrix(s, filter.alpha);
    }
    case Kind::VblPoly: {
      const Matrix l = laplacian(g, LaplacianKind::SymmetricNormalized);
      const Matrix base = Matrix::Identity(n, n) - filter.a * l;
      Matrix out = Matrix::Identity(n, n);
      for (int i = 0; i < filter.m; ++i) out = base * out;
      return out;
    }
    case Kind::Tikhonov: {
      const Matrix l = laplacian(g, LaplacianKind::SymmetricNormalized);
      Eigen::PartialPivLU<Matrix> lu(Matrix::Identity(n, n) + filter.alpha * l);
      return lu.solve(Matrix::Identity(n, n));
    }
    case Kind::BalcilarLowpass: {
      const Matrix l = laplacian(g, LaplacianKind::SymmetricNormalized);
      Eigen::SelfAdjointEigenSolver<Matrix> eig(l, Eigen::EigenvaluesOnly);
      const double lmax = eig.eigenvalues().maxCoeff();
      if (lmax <= 0.0) return Matrix::Identity(n, n);
      const Matrix base = (lmax * Matrix::Identity(n, n) - l) / lmax;
      Matrix out = Matrix::Identity(n, n);
      for (int i = 0; i < filter.m; ++i) out = base * out;
      return out;
    }
    case Kind::BalcilarBand:
    case Kind::Simoncelli:
    case Kind::BandIndices: {
      const SpectralDecomposition dec = eigendecompose(g, LaplacianKind::SymmetricNormalized);
      const Vector h = evaluate_response(filter, dec.eigenvalues, dec.lambda_max());
      return dec.eigenvectors * h.asDiagonal() * dec.eigenvectors.transpose();
    }
  }
  throw std::logic_error("compile_diffusion: unknown kind");
}

}  // namespace lg
