#include <cmath>
#include <string>

#include "hif/dataio.hpp"
#include "hif/error.hpp"
#include "hif/svm.hpp"

namespace hif::svm {

void KernelSpec::validate() const {
  if (kind == Kind::Rbf && !(sigma > 0.0)) throw InvalidInput("RBF kernel needs sigma > 0");
  if (kind == Kind::Polynomial && degree < 1) throw InvalidInput("polynomial kernel needs degree >= 1");
}

std::string KernelSpec::describe() const {
  switch (kind) {
    case Kind::Linear: return "linear";
    case Kind::Polynomial: return "polynomial(degree=" + std::to_string(degree) + ", coef=" + format_real(coef) + ")";
    case Kind::Rbf: return "rbf(sigma=" + format_real(sigma) + ")";
  }
  return "?";
}

double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y) {
  if (x.size() != y.size()) {
    throw InvalidInput("kernel arguments differ in length (" + std::to_string(x.size()) + " vs " +
                       std::to_string(y.size()) + ")");
  }
  switch (spec.kind) {
    case KernelSpec::Kind::Linear: return x.dot(y);
    case KernelSpec::Kind::Polynomial: return std::pow(x.dot(y) + spec.coef, spec.degree);
    case KernelSpec::Kind::Rbf: return std::exp(-(x - y).squaredNorm() / (2.0 * spec.sigma * spec.sigma));
  }
  return 0.0;
}

Matrix gram_matrix(const KernelSpec& spec, const Matrix& x) {
  spec.validate();
  const Eigen::Index n = x.rows();
  Matrix k(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Vector xi = x.row(i).transpose();
    for (Eigen::Index j = 0; j <= i; ++j) {
      k(i, j) = kernel_eval(spec, xi, x.row(j).transpose());
      k(j, i) = k(i, j);
    }
  }
  return k;
}

}  // namespace hif::svm
