#include "hif/pca.hpp"

#include <cmath>
#include <string>

#include "hif/error.hpp"

namespace hif::pca {

PcaModel fit_pca(const DataMatrix& x_normal, double variance_target) {
  if (!(variance_target > 0.0 && variance_target <= 1.0)) {
    throw InvalidInput("variance_target must lie in (0, 1]");
  }
  if (x_normal.rows() < 2) throw InvalidInput("fit_pca needs at least 2 rows");
  if (x_normal.labels) {
    for (auto c : *x_normal.labels) {
      if (c != ClassCode::Normal) throw InvalidInput("fit_pca expects normal-condition rows only");
    }
  }

  PcaModel model;
  model.n_train = x_normal.rows();
  model.normalizer = normalize_fit(x_normal);
  const Matrix scaled =
      normalize_matrix(model.normalizer, x_normal.observations) / std::sqrt(static_cast<double>(model.n_train - 1));
  const auto dec = numerics::svd(scaled);

  const Vector energy = dec.singular_values.array().square();
  const double total = energy.sum();
  if (!(total > 0.0)) throw InvalidInput("fit_pca: training data has no variance");
  double cumulative = 0.0;
  Eigen::Index a = 0;
  while (a < energy.size()) {
    cumulative += energy[a];
    ++a;
    if (cumulative / total >= variance_target - 1e-12) break;
  }
  model.retained = a;
  model.variance_captured = std::min(1.0, cumulative / total);
  model.loadings = dec.v.leftCols(a);
  model.singular_values = dec.singular_values.head(a);
  return model;
}

Vector project(const PcaModel& model, const Eigen::Ref<const Vector>& x) {
  return model.loadings.transpose() * normalize_row(model.normalizer, x);
}

double t2_statistic(const PcaModel& model, const Eigen::Ref<const Vector>& x) {
  if (model.singular_values.size() == 0 || model.singular_values.minCoeff() < 1e-12) {
    throw IllConditioned("PCA model retains a singular value below 1e-12");
  }
  const Vector scores = project(model, x);
  return scores.cwiseQuotient(model.singular_values).squaredNorm();
}

double t2_threshold(const PcaModel& model, double alpha, ThresholdDof dof) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("alpha must lie in (0, 1)");
  const auto n = static_cast<double>(model.n_train);
  const auto a = static_cast<double>(dof == ThresholdDof::Retained ? model.retained : model.channels());
  if (!(n > a)) {
    throw InvalidInput("T^2 threshold needs more training rows (" + std::to_string(model.n_train) +
                       ") than degrees of freedom (" + std::to_string(static_cast<long>(a)) + ")");
  }
  const double coefficient = a * (n - 1.0) * (n + 1.0) / (n * (n - a));
  return coefficient * numerics::f_quantile(1.0 - alpha, a, n - a);
}

Flag detect(const PcaModel& model, const Eigen::Ref<const Vector>& x, double alpha, ThresholdDof dof) {
  return t2_statistic(model, x) > t2_threshold(model, alpha, dof) ? Flag::Fault : Flag::Normal;
}

}  // namespace hif::pca
