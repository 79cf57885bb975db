#include "hif/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "hif/error.hpp"

namespace hif::numerics {
namespace {

// Flips columns of `vectors` (and the matching columns of `partner`) so the
// first significant entry of each column is positive.
void normalize_signs(Matrix& vectors, Matrix* partner = nullptr) {
  for (Eigen::Index j = 0; j < vectors.cols(); ++j) {
    const double scale = vectors.col(j).cwiseAbs().maxCoeff();
    if (scale == 0.0) continue;
    for (Eigen::Index i = 0; i < vectors.rows(); ++i) {
      const double v = vectors(i, j);
      if (std::abs(v) > 1e-12 * scale) {
        if (v < 0.0) {
          vectors.col(j) *= -1.0;
          if (partner != nullptr) partner->col(j) *= -1.0;
        }
        break;
      }
    }
  }
}

void require_symmetric(const Matrix& a, const char* what) {
  if (a.rows() != a.cols()) {
    throw InvalidInput(std::string(what) + " must be square, got " + std::to_string(a.rows()) + "x" +
                       std::to_string(a.cols()));
  }
  require_finite(a, what);
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw InvalidInput(std::string(what) + " is not symmetric");
  }
}

// Reverses ascending eigen-solver output into descending order.
EigResult descending(const Vector& values, const Matrix& vectors) {
  EigResult out;
  out.eigenvalues = values.reverse();
  out.eigenvectors = vectors.rowwise().reverse();
  normalize_signs(out.eigenvectors);
  return out;
}

// Continued fraction for I_x(a, b) (modified Lentz), valid for x < (a+1)/(a+b+2).
double beta_continued_fraction(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 10000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) return h;
  }
  throw ConvergenceError("incomplete beta continued fraction did not converge");
}

// I_x(a, b) with y = 1 - x supplied separately to keep precision near x = 1.
double incomplete_beta_xy(double a, double b, double x, double y) {
  if (x <= 0.0) return 0.0;
  if (y <= 0.0) return 1.0;
  const double log_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log(y);
  const double front = std::exp(log_front);
  if (x < (a + 1.0) / (a + b + 2.0)) {
    return front * beta_continued_fraction(a, b, x) / a;
  }
  return 1.0 - front * beta_continued_fraction(b, a, y) / b;
}

}  // namespace

void require_finite(const Matrix& a, const char* what) {
  if (!a.allFinite()) throw InvalidInput(std::string(what) + " has non-finite entries");
}

SvdResult svd(const Matrix& a) {
  if (a.rows() < 1 || a.cols() < 1) throw InvalidInput("svd: matrix must be non-empty");
  require_finite(a, "svd input");
  Eigen::JacobiSVD<Matrix> solver(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  SvdResult out{solver.matrixU(), solver.singularValues(), solver.matrixV()};
  normalize_signs(out.v, &out.u);
  return out;
}

EigResult eig_symmetric(const Matrix& a) {
  require_symmetric(a, "eig_symmetric input");
  Eigen::SelfAdjointEigenSolver<Matrix> solver(a);
  if (solver.info() != Eigen::Success) throw ConvergenceError("eig_symmetric: solver failed");
  return descending(solver.eigenvalues(), solver.eigenvectors());
}

Matrix regularize(const Matrix& s, double eps) {
  const double ridge = eps * s.trace() / static_cast<double>(s.rows());
  Matrix out = s;
  out.diagonal().array() += ridge;
  return out;
}

EigResult eig_generalized(const Matrix& s_b, const Matrix& s_w) {
  require_symmetric(s_b, "S_b");
  require_symmetric(s_w, "S_w");
  if (s_b.rows() != s_w.rows()) throw InvalidInput("eig_generalized: S_b and S_w differ in size");
  if (!(s_w.trace() > 0.0)) throw IllConditioned("S_w has no positive variance; cannot be regularized");
  const Matrix s_w_reg = regularize(s_w);
  Eigen::LLT<Matrix> chol(s_w_reg);
  if (chol.info() != Eigen::Success) {
    throw IllConditioned("S_w is not positive definite after regularization");
  }
  Eigen::GeneralizedSelfAdjointEigenSolver<Matrix> solver(s_b, s_w_reg,
                                                          Eigen::ComputeEigenvectors | Eigen::Ax_lBx);
  if (solver.info() != Eigen::Success) throw IllConditioned("generalized eigensolver failed on S_w");
  return descending(solver.eigenvalues(), solver.eigenvectors());
}

double incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw InvalidInput("incomplete_beta: shape parameters must be positive");
  if (!(x >= 0.0 && x <= 1.0)) throw InvalidInput("incomplete_beta: x outside [0, 1]");
  return incomplete_beta_xy(a, b, x, 1.0 - x);
}

double f_cdf(double x, double d1, double d2) {
  if (!(d1 > 0.0) || !(d2 > 0.0)) throw InvalidInput("f_cdf: degrees of freedom must be positive");
  if (std::isnan(x)) throw InvalidInput("f_cdf: x is NaN");
  if (x <= 0.0) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double denom = d1 * x + d2;
  return incomplete_beta_xy(0.5 * d1, 0.5 * d2, d1 * x / denom, d2 / denom);
}

double f_quantile(double p, double d1, double d2) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidInput("f_quantile: p must lie in (0, 1)");
  if (!(d1 >= 1.0) || !(d2 >= 1.0)) throw InvalidInput("f_quantile: degrees of freedom must be >= 1");
  double lo = 0.0;
  double hi = 1.0;
  while (f_cdf(hi, d1, d2) < p) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw ConvergenceError("f_quantile: could not bracket the quantile");
  }
  // Bisect until the bracket cannot shrink any further in double precision.
  for (int iter = 0; iter < 2000; ++iter) {
    const double mid = lo + 0.5 * (hi - lo);
    if (mid <= lo || mid >= hi) break;
    if (f_cdf(mid, d1, d2) < p) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return hi;
}

}  // namespace hif::numerics
