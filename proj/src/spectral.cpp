#include "latentgraph/spectral.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>
#include <string>

namespace lg {

namespace {

void fix_signs(Matrix& vectors) {
  for (int c = 0; c < vectors.cols(); ++c) {
    int arg = 0;
    vectors.col(c).cwiseAbs().maxCoeff(&arg);
    if (vectors(arg, c) < 0.0) vectors.col(c) = -vectors.col(c);
  }
}

void check_signal_rows(const Matrix& signal, Eigen::Index n, const char* what) {
  if (signal.rows() != n) {
    throw std::invalid_argument(std::string(what) + ": signal has " +
                                std::to_string(signal.rows()) + " rows, expected " +
                                std::to_string(n));
  }
}

}  // namespace

SpectralDecomposition eigendecompose(const Matrix& l, LaplacianKind kind) {
  if (l.rows() != l.cols()) throw std::invalid_argument("eigendecompose: matrix must be square");
  const double asym = (l - l.transpose()).cwiseAbs().maxCoeff();
  if (asym > 1e-10) {
    throw std::invalid_argument("eigendecompose: input not symmetric (max dev " +
                                std::to_string(asym) + ")");
  }
  Eigen::SelfAdjointEigenSolver<Matrix> solver((l + l.transpose()) / 2.0);
  if (solver.info() != Eigen::Success) throw std::runtime_error("eigendecompose: solver failed");

  SpectralDecomposition dec;
  dec.eigenvalues = solver.eigenvalues();  // ascending
  dec.eigenvectors = solver.eigenvectors();
  dec.source_kind = kind;
  fix_signs(dec.eigenvectors);

  const double scale = std::max(1.0, l.cwiseAbs().maxCoeff());
  const Matrix recon = dec.eigenvectors * dec.eigenvalues.asDiagonal() * dec.eigenvectors.transpose();
  if ((recon - l).cwiseAbs().maxCoeff() > 1e-6 * scale) {
    throw std::runtime_error("eigendecompose: reconstruction failed accuracy contract");
  }
  const int n = static_cast<int>(l.rows());
  const Matrix gram = dec.eigenvectors.transpose() * dec.eigenvectors;
  if ((gram - Matrix::Identity(n, n)).cwiseAbs().maxCoeff() > 1e-8) {
    throw std::runtime_error("eigendecompose: eigenvectors not orthonormal");
  }
  if (dec.eigenvalues(0) < -1e-8 * std::max(1.0, std::abs(dec.lambda_max()))) {
    throw std::runtime_error("eigendecompose: negative eigenvalue on a PSD operator");
  }
  return dec;
}

SpectralDecomposition eigendecompose(const Graph& g, LaplacianKind kind) {
  return eigendecompose(laplacian(g, kind), kind);
}

Matrix gft(const Matrix& signal, const SpectralDecomposition& dec) {
  check_signal_rows(signal, dec.eigenvectors.rows(), "gft");
  return dec.eigenvectors.transpose() * signal;
}

Matrix igft(const Matrix& freq_signal, const SpectralDecomposition& dec) {
  check_signal_rows(freq_signal, dec.eigenvectors.rows(), "igft");
  return dec.eigenvectors * freq_signal;
}

Vector smoothness(const Matrix& signal, const Matrix& l) {
  check_signal_rows(signal, l.rows(), "smoothness");
  Vector out(signal.cols());
  for (int c = 0; c < signal.cols(); ++c) {
    out(c) = signal.col(c).dot(l * signal.col(c));
  }
  return out;
}

double smoothness_total(const Matrix& signal, const Matrix& l) {
  return smoothness(signal, l).sum();
}

namespace {

// Indices of eigenvalues strictly above the zero threshold.
std::vector<int> nonzero_indices(const SpectralDecomposition& dec, double rel_tol) {
  const double tol = rel_tol * std::max(1.0, dec.lambda_max());
  std::vector<int> idx;
  for (int i = 0; i < dec.eigenvalues.size(); ++i) {
    if (dec.eigenvalues(i) > tol) idx.push_back(i);
  }
  return idx;
}

}  // namespace

Matrix laplacian_eigenmaps_2d(const SpectralDecomposition& dec, bool allow_disconnected,
                              double rel_tol) {
  const int n = static_cast<int>(dec.eigenvalues.size());
  if (n < 3) throw std::invalid_argument("laplacian_eigenmaps_2d: need at least 3 vertices");
  const std::vector<int> nz = nonzero_indices(dec, rel_tol);
  if (nz.size() < 2) {
    throw std::domain_error("laplacian_eigenmaps_2d: fewer than two nonzero eigenvalues");
  }
  const int zeros = n - static_cast<int>(nz.size());
  if (zeros > 1 && !allow_disconnected) {
    throw std::domain_error("laplacian_eigenmaps_2d: graph has " + std::to_string(zeros) +
                            " components; pass allow_disconnected to proceed");
  }
  Matrix coords(n, 2);
  coords.col(0) = dec.eigenvectors.col(nz[0]);
  coords.col(1) = dec.eigenvectors.col(nz[1]);
  return coords;
}

Vector fiedler_vector(const SpectralDecomposition& dec, double rel_tol) {
  const int n = static_cast<int>(dec.eigenvalues.size());
  if (n < 2) throw std::invalid_argument("fiedler_vector: need at least 2 vertices");
  const double tol = rel_tol * std::max(1.0, dec.lambda_max());
  if (n >= 2 && dec.eigenvalues(1) <= tol) {
    throw std::domain_error("fiedler_vector: graph is disconnected");
  }
  const std::vector<int> nz = nonzero_indices(dec, rel_tol);
  if (nz.empty()) throw std::domain_error("fiedler_vector: no nonzero eigenvalue");
  return dec.eigenvectors.col(nz[0]);
}

}  // namespace lg
