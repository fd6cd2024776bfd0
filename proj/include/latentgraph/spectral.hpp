#pragma once

#include "latentgraph/graph.hpp"

namespace lg {

// Eigensystem of a symmetric Laplacian, eigenvalues ascending, eigenvector
// signs fixed so the largest-magnitude entry of each column is positive.
struct SpectralDecomposition {
  Vector eigenvalues;
  Matrix eigenvectors;  // columns
  LaplacianKind source_kind = LaplacianKind::Combinatorial;

  double lambda_max() const { return eigenvalues.size() ? eigenvalues(eigenvalues.size() - 1) : 0.0; }
};

SpectralDecomposition eigendecompose(const Matrix& l, LaplacianKind kind);

SpectralDecomposition eigendecompose(const Graph& g, LaplacianKind kind);

// Frequency-domain coefficients F^T s; columns are independent realizations.
Matrix gft(const Matrix& signal, const SpectralDecomposition& dec);

Matrix igft(const Matrix& freq_signal, const SpectralDecomposition& dec);

// Per-column Laplacian quadratic form s_c^T L s_c.
Vector smoothness(const Matrix& signal, const Matrix& l);

// trace(S^T L S), the sum of per-column smoothness values.
double smoothness_total(const Matrix& signal, const Matrix& l);

// Coordinates from the eigenvectors of the two smallest nonzero eigenvalues.
// Eigenvalues below rel_tol * lambda_max count as zero; more than one zero
// eigenvalue (disconnected graph) is an error unless allow_disconnected.
Matrix laplacian_eigenmaps_2d(const SpectralDecomposition& dec, bool allow_disconnected = false,
                              double rel_tol = 1e-8);

Vector fiedler_vector(const SpectralDecomposition& dec, double rel_tol = 1e-8);

}  // namespace lg
