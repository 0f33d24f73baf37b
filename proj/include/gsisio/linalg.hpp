#pragma once

#include <utility>

#include "gsisio/matrix.hpp"

namespace gsisio {

/// M = M^+ - M^- with M^+ = max(M, 0) and M^- = M^+ - M, both elementwise non-negative.
struct SignSplit {
  Matrix plus;
  Matrix minus;
};

SignSplit sign_split(const Matrix& m);
Matrix positive_part(const Matrix& m);
Matrix negative_part(const Matrix& m);
/// |M| = M^+ + M^-.
Matrix abs_matrix(const Matrix& m);

/// Full singular value decomposition M = U diag(s) V^T.
///
/// U is rows x rows and V is cols x cols, both orthogonal; singular_values has
/// min(rows, cols) entries in descending order. Computed by one-sided Jacobi
/// rotations (at most 100 sweeps), so results are deterministic.
struct SvdResult {
  Matrix U;
  Vector singular_values;
  Matrix V;

  /// U[:, :k] diag(s[:k]) V[:, :k]^T with k = singular_values.size().
  Matrix reconstruct() const;
};

SvdResult svd(const Matrix& m);

/// Default relative rank tolerance: max(rows, cols) * machine epsilon.
double default_rank_tolerance(const Matrix& m);

/// Moore-Penrose pseudoinverse. Singular values at or below rel_tol * sigma_max
/// are treated as zero.
Matrix pinv(const Matrix& m);
Matrix pinv(const Matrix& m, double rel_tol);

/// Number of singular values strictly above rel_tol * sigma_max; 0 for the zero matrix.
int numeric_rank(const Matrix& m);
int numeric_rank(const Matrix& m, double rel_tol);

/// Induced 2-norm (largest singular value).
double spectral_norm(const Matrix& m);

struct SymmetricEigen {
  Vector values;  // ascending
  Matrix vectors; // columns are eigenvectors
};

/// All eigenpairs of a symmetric matrix via cyclic Jacobi rotations.
/// Throws DomainError if S is not symmetric to 1e-12 (relative to max(1, max|S|)).
SymmetricEigen sym_eig(const Matrix& s);

struct EigenExtrema {
  double min;
  double max;
};

EigenExtrema sym_eig_extrema(const Matrix& s);

/// True iff lambda_max(S) <= tol. Asymmetry beyond 1e-12 is rejected;
/// smaller asymmetry is removed by (S + S^T) / 2.
bool is_negative_semidefinite(const Matrix& s, double tol = 1e-9);

/// Largest |S_ij - S_ji|.
double asymmetry(const Matrix& s);

}  // namespace gsisio
