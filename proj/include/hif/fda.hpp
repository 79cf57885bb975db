#pragma once

#include <vector>

#include "hif/dataio.hpp"

namespace hif::fda {

struct FdaModel {
  std::vector<ClassCode> class_codes;  // ascending
  Matrix class_means;                  // q x m
  Vector total_mean;                   // m
  Matrix within_scatter;               // S_w (empty after loading from disk)
  Matrix between_scatter;              // S_b (empty after loading from disk)
  std::vector<Matrix> class_scatter;   // S_k (empty after loading from disk)
  Matrix fda_vectors;                  // m x (q - 1), V_q
  std::vector<Matrix> projected_scatter;  // V_q^T S_k V_q, (q-1) x (q-1) per class
  std::vector<Eigen::Index> class_counts;
  Vector priors;
  Vector eigenvalues;  // q - 1 leading generalized eigenvalues

  std::size_t classes() const { return class_codes.size(); }
  /// Position of `code` in class_codes; throws InvalidInput if absent.
  std::size_t index_of(ClassCode code) const;
};

/// Scatter matrices, FDA vectors (top q-1 generalized eigenvectors of
/// (S_b, S_w)) and priors n_k / n from labelled rows.
FdaModel fit_fda(const DataMatrix& x);

/// z = V_q^T x.
Vector fda_project(const FdaModel& model, const Eigen::Ref<const Vector>& x);

/// Hotelling statistic of x against class `k` in the leading `retained` FDA
/// directions: d^T V_a (V_a^T S_k V_a / (n_k - 1))^-1 V_a^T d, d = x - mean_k.
double fda_t2(const FdaModel& model, const Eigen::Ref<const Vector>& x, ClassCode k, Eigen::Index retained);

/// a(n_k-1)(n_k+1) / (n_k(n_k-a)) * F_{1-alpha}(a, n_k-a) for class k.
double fda_t2_threshold(const FdaModel& model, ClassCode k, Eigen::Index retained, double alpha);

/// Quadratic discriminant g_k(x) for every class, in class_codes order.
Vector discriminant(const FdaModel& model, const Eigen::Ref<const Vector>& x);

/// argmax_k g_k(x); ties go to the lowest class code.
ClassCode classify(const FdaModel& model, const Eigen::Ref<const Vector>& x);

}  // namespace hif::fda
