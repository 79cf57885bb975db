#include <cmath>
#include <limits>
#include <string>

#include "hif/error.hpp"
#include "hif/svm.hpp"

namespace hif::svm {
namespace {

constexpr double kMinCurvature = 1e-12;

void check_labels(std::span<const int> y) {
  bool pos = false;
  bool neg = false;
  for (int v : y) {
    if (v == 1) {
      pos = true;
    } else if (v == -1) {
      neg = true;
    } else {
      throw InvalidInput("binary SVM labels must be -1 or +1");
    }
  }
  if (!pos || !neg) throw InvalidInput("binary SVM training needs both classes");
}

}  // namespace

void TrainOptions::validate() const {
  kernel.validate();
  if (!(c > 0.0)) throw InvalidInput("penalty factor C must be positive");
  if (!(tol > 0.0)) throw InvalidInput("KKT tolerance must be positive");
  if (!(ridge >= 0.0)) throw InvalidInput("ridge must be non-negative");
  if (max_iterations == 0) throw InvalidInput("max_iterations must be positive");
}

DualSolution solve_dual(const Matrix& gram, std::span<const int> y, double c, double tol,
                        std::size_t max_iterations) {
  const auto n = static_cast<Eigen::Index>(y.size());
  if (gram.rows() != n || gram.cols() != n) throw InvalidInput("Gram matrix does not match label count");
  check_labels(y);
  if (!(c > 0.0) || !(tol > 0.0)) throw InvalidInput("solve_dual needs C > 0 and tol > 0");

  // Minimizes 1/2 a^T Q a - e^T a with Q_ij = y_i y_j K_ij; grad = Q a - e.
  Vector alpha = Vector::Zero(n);
  Vector grad = Vector::Constant(n, -1.0);
  const auto yd = [&](Eigen::Index t) { return static_cast<double>(y[static_cast<std::size_t>(t)]); };
  const auto in_up = [&](Eigen::Index t) { return yd(t) > 0 ? alpha[t] < c : alpha[t] > 0.0; };
  const auto in_low = [&](Eigen::Index t) { return yd(t) > 0 ? alpha[t] > 0.0 : alpha[t] < c; };

  std::size_t iter = 0;
  double gap = std::numeric_limits<double>::infinity();
  for (;; ++iter) {
    Eigen::Index i = -1;
    Eigen::Index j = -1;
    double g_max = -std::numeric_limits<double>::infinity();
    double g_min = std::numeric_limits<double>::infinity();
    for (Eigen::Index t = 0; t < n; ++t) {
      const double v = -yd(t) * grad[t];
      if (in_up(t) && v > g_max) {
        g_max = v;
        i = t;
      }
      if (in_low(t) && v < g_min) {
        g_min = v;
        j = t;
      }
    }
    gap = g_max - g_min;
    if (i < 0 || j < 0 || gap < tol) break;
    if (iter >= max_iterations) {
      throw ConvergenceError("SMO did not converge after " + std::to_string(max_iterations) +
                             " iterations (violating-pair gap " + std::to_string(gap) + ", tol " +
                             std::to_string(tol) + ", C " + std::to_string(c) + ")");
    }

    const double old_ai = alpha[i];
    const double old_aj = alpha[j];
    const double yi = yd(i);
    const double yj = yd(j);
    if (yi != yj) {
      double quad = gram(i, i) + gram(j, j) - 2.0 * gram(i, j);
      if (quad <= 0.0) quad = kMinCurvature;
      const double delta = (-grad[i] - grad[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0.0) {
        if (alpha[j] < 0.0) {
          alpha[j] = 0.0;
          alpha[i] = diff;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = -diff;
      }
      if (diff > 0.0) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = c - diff;
        }
      } else if (alpha[j] > c) {
        alpha[j] = c;
        alpha[i] = c + diff;
      }
    } else {
      double quad = gram(i, i) + gram(j, j) - 2.0 * gram(i, j);
      if (quad <= 0.0) quad = kMinCurvature;
      const double delta = (grad[i] - grad[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > c) {
        if (alpha[i] > c) {
          alpha[i] = c;
          alpha[j] = sum - c;
        }
      } else if (alpha[j] < 0.0) {
        alpha[j] = 0.0;
        alpha[i] = sum;
      }
      if (sum > c) {
        if (alpha[j] > c) {
          alpha[j] = c;
          alpha[i] = sum - c;
        }
      } else if (alpha[i] < 0.0) {
        alpha[i] = 0.0;
        alpha[j] = sum;
      }
    }

    const double di = (alpha[i] - old_ai) * yi;
    const double dj = (alpha[j] - old_aj) * yj;
    for (Eigen::Index t = 0; t < n; ++t) {
      grad[t] += yd(t) * (gram(t, i) * di + gram(t, j) * dj);
    }
  }

  // Bias: average over free vectors, else the midpoint of the feasible range.
  double upper = std::numeric_limits<double>::infinity();
  double lower = -std::numeric_limits<double>::infinity();
  double free_sum = 0.0;
  std::size_t free_count = 0;
  for (Eigen::Index t = 0; t < n; ++t) {
    const double yg = yd(t) * grad[t];
    if (alpha[t] >= c) {
      if (yd(t) < 0) upper = std::min(upper, yg); else lower = std::max(lower, yg);
    } else if (alpha[t] <= 0.0) {
      if (yd(t) > 0) upper = std::min(upper, yg); else lower = std::max(lower, yg);
    } else {
      ++free_count;
      free_sum += yg;
    }
  }
  const double rho = free_count > 0 ? free_sum / static_cast<double>(free_count) : 0.5 * (upper + lower);

  DualSolution out;
  out.alpha = alpha;
  out.bias = -rho;
  out.iterations = iter;
  out.objective = 0.5 * alpha.dot(Vector::Ones(n) - grad);
  return out;
}

SvmClassifier train_binary(const Matrix& x, std::span<const int> y, const TrainOptions& options) {
  options.validate();
  if (x.rows() != static_cast<Eigen::Index>(y.size())) throw InvalidInput("row and label counts differ");
  check_labels(y);
  numerics::require_finite(x, "SVM training data");
  Matrix gram = gram_matrix(options.kernel, x);
  gram.diagonal().array() += options.ridge;
  const auto sol = solve_dual(gram, y, options.c, options.tol, options.max_iterations);

  SvmClassifier clf;
  clf.kernel = options.kernel;
  clf.c = options.c;
  clf.kkt_tolerance = options.tol;
  clf.ridge = options.ridge;
  clf.bias = sol.bias;
  clf.iterations = sol.iterations;
  clf.dual_objective = sol.objective;
  for (Eigen::Index t = 0; t < x.rows(); ++t) {
    if (sol.alpha[t] > 0.0) clf.support_indices.push_back(t);
  }
  const auto n_sv = static_cast<Eigen::Index>(clf.support_indices.size());
  clf.support_vectors.resize(n_sv, x.cols());
  clf.coefficients.resize(n_sv);
  for (Eigen::Index s = 0; s < n_sv; ++s) {
    const Eigen::Index t = clf.support_indices[static_cast<std::size_t>(s)];
    clf.support_vectors.row(s) = x.row(t);
    clf.coefficients[s] = sol.alpha[t] * static_cast<double>(y[static_cast<std::size_t>(t)]);
  }
  return clf;
}

double decision_value(const SvmClassifier& clf, const Eigen::Ref<const Vector>& x) {
  if (x.size() != clf.support_vectors.cols()) {
    throw InvalidInput("SVM expects rows of length " + std::to_string(clf.support_vectors.cols()) + ", got " +
                       std::to_string(x.size()));
  }
  double f = clf.bias;
  for (Eigen::Index s = 0; s < clf.support_vectors.rows(); ++s) {
    f += clf.coefficients[s] * kernel_eval(clf.kernel, clf.support_vectors.row(s).transpose(), x);
  }
  return f;
}

int predict_binary(const SvmClassifier& clf, const Eigen::Ref<const Vector>& x) {
  return decision_value(clf, x) >= 0.0 ? 1 : -1;
}

double kkt_violation(const SvmClassifier& clf, const Matrix& x, std::span<const int> y) {
  if (x.rows() != static_cast<Eigen::Index>(y.size())) throw InvalidInput("row and label counts differ");
  Vector alpha = Vector::Zero(x.rows());
  for (std::size_t s = 0; s < clf.support_indices.size(); ++s) {
    alpha[clf.support_indices[s]] = std::abs(clf.coefficients[static_cast<Eigen::Index>(s)]);
  }
  double worst = 0.0;
  for (Eigen::Index t = 0; t < x.rows(); ++t) {
    const double yt = static_cast<double>(y[static_cast<std::size_t>(t)]);
    double f = decision_value(clf, x.row(t).transpose()) + clf.ridge * alpha[t] * yt;
    const double margin = yt * f;
    double v = 0.0;
    if (alpha[t] <= 0.0) {
      v = std::max(0.0, 1.0 - margin);
    } else if (alpha[t] >= clf.c) {
      v = std::max(0.0, margin - 1.0);
    } else {
      v = std::abs(margin - 1.0);
    }
    worst = std::max(worst, v);
  }
  return worst;
}

}  // namespace hif::svm
