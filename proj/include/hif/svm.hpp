#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "hif/dataio.hpp"

namespace hif::svm {

/// Kernel functions:
///   Linear      k(x, y) = x^T y
///   Polynomial  k(x, y) = (x^T y + coef)^degree
///   Rbf         k(x, y) = exp(-|x - y|^2 / (2 sigma^2))
struct KernelSpec {
  enum class Kind { Linear, Polynomial, Rbf };

  Kind kind = Kind::Rbf;
  int degree = 3;
  double coef = 1.0;
  double sigma = 0.5;

  static KernelSpec linear() { return {Kind::Linear, 1, 0.0, 1.0}; }
  static KernelSpec polynomial(int degree, double coef) { return {Kind::Polynomial, degree, coef, 1.0}; }
  static KernelSpec rbf(double sigma) { return {Kind::Rbf, 1, 0.0, sigma}; }

  void validate() const;
  std::string describe() const;
  bool operator==(const KernelSpec&) const = default;
};

double kernel_eval(const KernelSpec& spec, const Eigen::Ref<const Vector>& x, const Eigen::Ref<const Vector>& y);

/// Symmetric Gram matrix of the rows of x.
Matrix gram_matrix(const KernelSpec& spec, const Matrix& x);

struct TrainOptions {
  double c = 10.0;
  KernelSpec kernel = KernelSpec::rbf(0.5);
  /// KKT tolerance; SMO stops when the maximal violating pair gap is below it.
  double tol = 1e-3;
  /// Optional ridge added to the Gram diagonal during training (0 = none).
  double ridge = 0.0;
  std::size_t max_iterations = 100000;

  void validate() const;
};

struct SvmClassifier {
  Matrix support_vectors;                 // one row per support vector
  Vector coefficients;                    // alpha_i * y_i
  std::vector<Eigen::Index> support_indices;  // rows of the training set
  double bias = 0.0;
  KernelSpec kernel;
  double c = 0.0;
  double kkt_tolerance = 0.0;
  double ridge = 0.0;
  std::size_t iterations = 0;
  double dual_objective = 0.0;
};

/// Solution of the soft-margin dual for a precomputed Gram matrix.
struct DualSolution {
  Vector alpha;  // 0 <= alpha_i <= C
  double bias = 0.0;
  std::size_t iterations = 0;
  double objective = 0.0;  // sum(alpha) - 1/2 alpha^T Q alpha
};

/// SMO with maximal-violating-pair working set selection. Throws
/// ConvergenceError after max_iterations.
DualSolution solve_dual(const Matrix& gram, std::span<const int> y, double c, double tol,
                        std::size_t max_iterations = 100000);

/// Trains on rows of x with labels in {-1, +1}.
SvmClassifier train_binary(const Matrix& x, std::span<const int> y, const TrainOptions& options);

/// f(x) = b + sum_l alpha_l y_l k(x_l, x).
double decision_value(const SvmClassifier& clf, const Eigen::Ref<const Vector>& x);

/// sign(f(x)); f(x) == 0 maps to +1.
int predict_binary(const SvmClassifier& clf, const Eigen::Ref<const Vector>& x);

/// Largest KKT violation over the training set: alpha = 0 needs y f >= 1,
/// free alphas need y f = 1, alpha = C needs y f <= 1. Returns 0 when every
/// condition holds exactly.
double kkt_violation(const SvmClassifier& clf, const Matrix& x, std::span<const int> y);

enum class Strategy { OneVsOne, OneVsAll };

struct MulticlassConfig {
  Strategy strategy = Strategy::OneVsOne;
  TrainOptions options;
};

/// One binary member. OneVsOne: `positive` is the lower class code, `negative`
/// the higher. OneVsAll: `positive` is the class, `negative` is unused.
struct BinaryMember {
  ClassCode positive = ClassCode::Normal;
  ClassCode negative = ClassCode::Normal;
  SvmClassifier classifier;
};

struct MulticlassSvm {
  Strategy strategy = Strategy::OneVsOne;
  std::vector<ClassCode> label_map;  // ascending class codes
  std::vector<BinaryMember> classifiers;
};

MulticlassSvm train_multiclass(const Matrix& x, std::span<const ClassCode> labels, const MulticlassConfig& config);

struct Vote {
  ClassCode label = ClassCode::Normal;
  std::vector<int> votes;            // per label_map entry
  std::vector<double> vote_strength;  // summed |f| of the classifiers voting for each entry
};

/// OneVsOne: majority vote, ties to the larger summed |f|, then the lowest
/// code. OneVsAll: largest decision value, ties to the lowest code.
Vote vote_multiclass(const MulticlassSvm& model, const Eigen::Ref<const Vector>& x);
ClassCode predict_multiclass(const MulticlassSvm& model, const Eigen::Ref<const Vector>& x);

/// Probability that a random positive outscores a random negative (ties 1/2).
double auc(std::span<const double> scores, std::span<const int> labels);

/// 1000 log-spaced penalty values in [0.1, 100].
std::vector<double> default_c_grid(std::size_t points = 1000, double lo = 0.1, double hi = 100.0);

struct CvResult {
  double best_c = 0.0;
  std::vector<double> grid;
  std::vector<double> mean_auc;  // per grid entry
  std::uint64_t fold_seed = 0;   // seed of the accepted fold assignment
  int attempts = 0;
};

/// Stratified k-fold search over `grid`: each C is scored by the mean
/// validation AUC across folds; best_c is the argmax, ties to the smallest C.
/// A fold assignment lacking a class is redrawn with a new derived seed, up
/// to 10 attempts.
CvResult cross_validate_c(const Matrix& x, std::span<const int> y, const std::vector<double>& grid,
                          std::size_t folds, std::uint64_t seed, const TrainOptions& base);

}  // namespace hif::svm
