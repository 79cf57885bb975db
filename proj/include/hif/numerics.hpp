#pragma once

#include <Eigen/Dense>

namespace hif::numerics {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Thin SVD: a = u * diag(singular_values) * v^T with u (rows x k), v (cols x k),
/// k = min(rows, cols). Singular values are sorted descending.
struct SvdResult {
  Matrix u;
  Vector singular_values;
  Matrix v;
};

/// Eigenpairs sorted by descending eigenvalue; column h of `eigenvectors`
/// belongs to eigenvalues[h].
struct EigResult {
  Vector eigenvalues;
  Matrix eigenvectors;
};

/// Relative weight of the ridge added to a scatter matrix before it is
/// factored: eps * trace(S) / dim * I.
inline constexpr double kScatterRegularization = 1e-8;

/// Every decomposition below normalizes vector signs so that the first entry
/// with magnitude above 1e-12 * max|entry| is positive.
SvdResult svd(const Matrix& a);

/// Throws InvalidInput if `a` is non-square, non-finite or asymmetric beyond
/// 1e-12 * max(1, max|a|).
EigResult eig_symmetric(const Matrix& a);

/// Symmetric-definite pencil S_b v = lambda S_w v. S_w is regularized with
/// kScatterRegularization before its Cholesky factorization; eigenvectors are
/// normalized so that v^T S_w' v = 1 for the regularized S_w'. Throws
/// IllConditioned naming S_w when it has no positive trace or is not positive
/// definite after regularization.
EigResult eig_generalized(const Matrix& s_b, const Matrix& s_w);

/// Returns s + eps * trace(s) / dim * I.
Matrix regularize(const Matrix& s, double eps = kScatterRegularization);

/// Regularized incomplete beta function I_x(a, b).
double incomplete_beta(double a, double b, double x);

/// CDF of the F distribution with (d1, d2) degrees of freedom.
double f_cdf(double x, double d1, double d2);

/// Inverse of f_cdf in x, by bisection on the incomplete-beta representation.
double f_quantile(double p, double d1, double d2);

void require_finite(const Matrix& a, const char* what);

}  // namespace hif::numerics
