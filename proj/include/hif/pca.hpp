#pragma once

#include "hif/dataio.hpp"

namespace hif::pca {

/// Degrees of freedom used in the T^2 control limit. Retained uses the number
/// of kept components a; Full uses the channel count m.
enum class ThresholdDof { Retained, Full };

struct PcaModel {
  Normalizer normalizer;
  Matrix loadings;         // m x a, orthonormal columns (P)
  Vector singular_values;  // a values of the SVD of X / sqrt(n - 1)
  Eigen::Index retained = 0;
  Eigen::Index n_train = 0;
  double variance_captured = 0.0;

  Eigen::Index channels() const { return loadings.rows(); }
  /// Fewer training rows than channels; the fit still succeeds.
  bool underdetermined() const { return n_train < channels(); }
};

/// Fits on normal-condition rows. Rows are z-scored, scaled by 1/sqrt(n-1)
/// and decomposed; the smallest a whose cumulative squared singular values
/// reach `variance_target` is retained. Throws InvalidInput for fewer than two
/// rows, a target outside (0, 1], or labelled rows that are not Normal.
PcaModel fit_pca(const DataMatrix& x_normal, double variance_target);

/// Scores t = P^T * normalize(x).
Vector project(const PcaModel& model, const Eigen::Ref<const Vector>& x);

/// T^2 = sum_i t_i^2 / sigma_i^2 over the retained components.
double t2_statistic(const PcaModel& model, const Eigen::Ref<const Vector>& x);

/// a(n-1)(n+1) / (n(n-a)) * F_{1-alpha}(a, n-a); with ThresholdDof::Full the
/// channel count m replaces a.
double t2_threshold(const PcaModel& model, double alpha, ThresholdDof dof = ThresholdDof::Retained);

enum class Flag { Normal, Fault };

/// Fault iff T^2 is strictly above the threshold.
Flag detect(const PcaModel& model, const Eigen::Ref<const Vector>& x, double alpha,
            ThresholdDof dof = ThresholdDof::Retained);

}  // namespace hif::pca
