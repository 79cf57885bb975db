#include "hif/fda.hpp"

#include <cmath>
#include <map>
#include <string>

#include "hif/error.hpp"

namespace hif::fda {
namespace {

// Class covariance in the leading `dim` FDA directions, regularized for
// inversion: V_a^T S_k V_a / (n_k - 1) + eps * trace / dim * I.
Eigen::LLT<Matrix> projected_covariance(const FdaModel& model, std::size_t k, Eigen::Index dim) {
  const Matrix cov = model.projected_scatter[k].topLeftCorner(dim, dim) /
                     static_cast<double>(model.class_counts[k] - 1);
  Eigen::LLT<Matrix> chol(numerics::regularize(cov));
  if (chol.info() != Eigen::Success || !(cov.trace() > 0.0)) {
    throw IllConditioned("projected covariance of class " + class_name(model.class_codes[k]) +
                         " is not positive definite");
  }
  return chol;
}

void check_row(const FdaModel& model, const Eigen::Ref<const Vector>& x) {
  if (x.size() != model.total_mean.size()) {
    throw InvalidInput("FDA model expects rows of length " + std::to_string(model.total_mean.size()) + ", got " +
                       std::to_string(x.size()));
  }
}

}  // namespace

std::size_t FdaModel::index_of(ClassCode code) const {
  for (std::size_t k = 0; k < class_codes.size(); ++k) {
    if (class_codes[k] == code) return k;
  }
  throw InvalidInput("class " + class_name(code) + " is not part of the FDA model");
}

FdaModel fit_fda(const DataMatrix& x) {
  x.validate();
  if (!x.labels) throw InvalidInput("fit_fda needs labelled data");
  std::map<ClassCode, std::vector<Eigen::Index>> members;
  for (std::size_t i = 0; i < x.labels->size(); ++i) members[(*x.labels)[i]].push_back(static_cast<Eigen::Index>(i));
  if (members.size() < 2) throw InvalidInput("fit_fda needs at least two classes");

  const Eigen::Index m = x.cols();
  const auto q = static_cast<Eigen::Index>(members.size());
  FdaModel model;
  model.total_mean = x.observations.colwise().mean().transpose();
  model.class_means.resize(q, m);
  model.within_scatter = Matrix::Zero(m, m);
  model.between_scatter = Matrix::Zero(m, m);
  model.priors.resize(q);

  Eigen::Index k = 0;
  for (const auto& [code, rows] : members) {
    if (rows.size() < 2) throw InvalidInput("class " + class_name(code) + " has fewer than 2 rows");
    Matrix block(static_cast<Eigen::Index>(rows.size()), m);
    for (std::size_t r = 0; r < rows.size(); ++r) block.row(static_cast<Eigen::Index>(r)) = x.observations.row(rows[r]);
    const Vector mean = block.colwise().mean().transpose();
    const Matrix centered = block.rowwise() - mean.transpose();
    Matrix s_k = centered.transpose() * centered;
    s_k = 0.5 * (s_k + s_k.transpose());
    const Vector offset = mean - model.total_mean;

    model.class_codes.push_back(code);
    model.class_means.row(k) = mean.transpose();
    model.class_counts.push_back(static_cast<Eigen::Index>(rows.size()));
    model.priors[k] = static_cast<double>(rows.size()) / static_cast<double>(x.rows());
    model.within_scatter += s_k;
    model.between_scatter += static_cast<double>(rows.size()) * offset * offset.transpose();
    model.class_scatter.push_back(std::move(s_k));
    ++k;
  }

  const auto eig = numerics::eig_generalized(model.between_scatter, model.within_scatter);
  const Eigen::Index dirs = std::min<Eigen::Index>(q - 1, m);
  model.fda_vectors = eig.eigenvectors.leftCols(dirs);
  model.eigenvalues = eig.eigenvalues.head(dirs);
  for (const auto& s_k : model.class_scatter) {
    Matrix p = model.fda_vectors.transpose() * s_k * model.fda_vectors;
    model.projected_scatter.push_back(0.5 * (p + p.transpose()));
  }
  return model;
}

Vector fda_project(const FdaModel& model, const Eigen::Ref<const Vector>& x) {
  check_row(model, x);
  return model.fda_vectors.transpose() * x;
}

double fda_t2(const FdaModel& model, const Eigen::Ref<const Vector>& x, ClassCode code, Eigen::Index retained) {
  check_row(model, x);
  if (retained < 1 || retained > model.fda_vectors.cols()) {
    throw InvalidInput("retained FDA directions must lie in 1..q-1");
  }
  const std::size_t k = model.index_of(code);
  const auto chol = projected_covariance(model, k, retained);
  const Vector z = model.fda_vectors.leftCols(retained).transpose() * (x - model.class_means.row(static_cast<Eigen::Index>(k)).transpose());
  return z.dot(chol.solve(z));
}

double fda_t2_threshold(const FdaModel& model, ClassCode code, Eigen::Index retained, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw InvalidInput("alpha must lie in (0, 1)");
  const auto n = static_cast<double>(model.class_counts[model.index_of(code)]);
  const auto a = static_cast<double>(retained);
  if (!(n > a)) throw InvalidInput("FDA threshold needs more class rows than retained directions");
  return a * (n - 1.0) * (n + 1.0) / (n * (n - a)) * numerics::f_quantile(1.0 - alpha, a, n - a);
}

Vector discriminant(const FdaModel& model, const Eigen::Ref<const Vector>& x) {
  check_row(model, x);
  const Eigen::Index dim = model.fda_vectors.cols();
  const Vector z = model.fda_vectors.transpose() * x;
  Vector g(static_cast<Eigen::Index>(model.classes()));
  for (std::size_t k = 0; k < model.classes(); ++k) {
    const auto chol = projected_covariance(model, k, dim);
    const Vector d = z - model.fda_vectors.transpose() * model.class_means.row(static_cast<Eigen::Index>(k)).transpose();
    const double log_det = 2.0 * chol.matrixLLT().diagonal().array().log().sum();
    g[static_cast<Eigen::Index>(k)] =
        -0.5 * d.dot(chol.solve(d)) + std::log(model.priors[static_cast<Eigen::Index>(k)]) - 0.5 * log_det;
  }
  return g;
}

ClassCode classify(const FdaModel& model, const Eigen::Ref<const Vector>& x) {
  const Vector g = discriminant(model, x);
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < g.size(); ++k) {
    if (g[k] > g[best]) best = k;
  }
  return model.class_codes[static_cast<std::size_t>(best)];
}

}  // namespace hif::fda
