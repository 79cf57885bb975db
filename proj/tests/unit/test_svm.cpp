#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "doctest.h"
#include "dual_oracle.hpp"
#include "hif/error.hpp"
#include "hif/hifsim.hpp"
#include "hif/random.hpp"
#include "hif/svm.hpp"
#include "svm_corpus.hpp"

using namespace hif;
using namespace hif::svm;

namespace {

TrainOptions opts(double c, KernelSpec k, double tol = 1e-3) {
  TrainOptions o;
  o.c = c;
  o.kernel = k;
  o.tol = tol;
  return o;
}

Vector alphas_of(const SvmClassifier& clf, Eigen::Index n) {
  Vector a = Vector::Zero(n);
  for (std::size_t s = 0; s < clf.support_indices.size(); ++s) {
    a[clf.support_indices[s]] = std::abs(clf.coefficients[static_cast<Eigen::Index>(s)]);
  }
  return a;
}

const DataMatrix& surrogate() {
  static const DataMatrix x = sim::generate_dataset(sim::default_dataset_config(), 20240601);
  return x;
}

}  // namespace

TEST_CASE("kernel values") {
  const Vector x{{1.0, 2.0}};
  const Vector y{{3.0, 4.0}};
  CHECK(kernel_eval(KernelSpec::linear(), x, y) == 11.0);
  CHECK(kernel_eval(KernelSpec::rbf(0.5), x, x) == 1.0);
  const Vector u{{0.0, 0.0}};
  const Vector v{{1.0, 0.0}};
  CHECK(kernel_eval(KernelSpec::rbf(0.5), u, v) == doctest::Approx(std::exp(-2.0)).epsilon(1e-15));
  CHECK(kernel_eval(KernelSpec::rbf(0.5), u, v) == doctest::Approx(0.1353).epsilon(1e-3));
  CHECK(kernel_eval(KernelSpec::polynomial(2, 1.0), x, y) == 144.0);
  CHECK_THROWS_AS(kernel_eval(KernelSpec::linear(), x, Vector::Zero(3)), InvalidInput);
  CHECK_THROWS_AS(KernelSpec::rbf(0.0).validate(), InvalidInput);
  CHECK_THROWS_AS(KernelSpec::polynomial(0, 1.0).validate(), InvalidInput);
  CHECK(KernelSpec::rbf(0.5).describe() == "rbf(sigma=0.5)");
}

TEST_CASE("RBF Gram matrices are symmetric positive semidefinite") {
  std::mt19937_64 g(3);
  std::normal_distribution<double> d;
  for (int trial = 0; trial < 10; ++trial) {
    const Eigen::Index n = 5 + trial;
    Matrix x(n, 3);
    for (auto& v : x.reshaped()) v = d(g);
    const Matrix k = gram_matrix(KernelSpec::rbf(0.5 + 0.1 * trial), x);
    CHECK((k - k.transpose()).cwiseAbs().maxCoeff() == 0.0);
    CHECK(numerics::eig_symmetric(k).eigenvalues.minCoeff() >= -1e-8);
  }
}

TEST_CASE("symmetric two-point problem") {
  const Matrix x{{-1.0}, {1.0}};
  const std::vector<int> y{-1, 1};
  const auto clf = train_binary(x, y, opts(1000.0, KernelSpec::linear()));
  CHECK(std::abs(decision_value(clf, Vector::Zero(1))) < 1e-12);
  CHECK(predict_binary(clf, Vector::Constant(1, -1.0)) == -1);
  CHECK(predict_binary(clf, Vector::Constant(1, 1.0)) == 1);
  CHECK(predict_binary(clf, Vector::Constant(1, 0.3)) == 1);
  // Zero maps to +1.
  CHECK(predict_binary(clf, Vector::Zero(1)) == (decision_value(clf, Vector::Zero(1)) >= 0.0 ? 1 : -1));
}

TEST_CASE("decision value of a hand-built classifier") {
  SvmClassifier clf;
  clf.kernel = KernelSpec::linear();
  clf.support_vectors = Matrix{{1.0, 0.0}, {0.0, 1.0}};
  clf.coefficients = Vector{{2.0, -0.5}};
  clf.support_indices = {0, 1};
  clf.bias = 0.3;
  clf.c = 2.0;
  const Vector x{{1.0, 1.0}};
  CHECK(decision_value(clf, x) == doctest::Approx(0.3 + 2.0 - 0.5));
  clf.bias = 2.3 - 1.5;
  CHECK(predict_binary(clf, x) == 1);
  clf.bias = -1.6;
  CHECK(decision_value(clf, x) == doctest::Approx(-0.1));
  CHECK(predict_binary(clf, x) == -1);
  clf.bias = -1.5;
  CHECK(decision_value(clf, x) == 0.0);
  CHECK(predict_binary(clf, x) == 1);
  CHECK_THROWS_AS(decision_value(clf, Vector::Zero(3)), InvalidInput);
}

TEST_CASE("training input checks") {
  const Matrix x{{0.0}, {1.0}};
  CHECK_THROWS_AS(train_binary(x, std::vector<int>{1, 1}, TrainOptions{}), InvalidInput);
  CHECK_THROWS_AS(train_binary(x, std::vector<int>{1, 0}, TrainOptions{}), InvalidInput);
  CHECK_THROWS_AS(train_binary(x, std::vector<int>{1}, TrainOptions{}), InvalidInput);
  CHECK_THROWS_AS(train_binary(x, std::vector<int>{1, -1}, opts(0.0, KernelSpec::linear())), InvalidInput);
  CHECK_THROWS_AS(train_binary(x, std::vector<int>{1, -1}, opts(1.0, KernelSpec::linear(), 0.0)), InvalidInput);
}

TEST_CASE("non-convergence is reported with diagnostics") {
  const auto p = oracle::svm_corpus()[10];
  TrainOptions o = opts(p.c, p.kernel, 1e-12);
  o.max_iterations = 1;
  try {
    train_binary(p.x, p.y, o);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(std::string(e.what()).find("gap") != std::string::npos);
  }
}

TEST_CASE("SMO matches the brute-force dual on the corpus") {
  const auto corpus = oracle::svm_corpus();
  CHECK(corpus.size() == 25);
  for (const auto& p : corpus) {
    CAPTURE(p.name);
    REQUIRE(p.x.rows() <= 8);
    const auto clf = train_binary(p.x, p.y, opts(p.c, p.kernel));
    const auto ref = oracle::brute_force_dual(gram_matrix(p.kernel, p.x), p.y, p.c);
    CHECK(std::abs(clf.dual_objective - ref.objective) <= 1e-4);
    CHECK(kkt_violation(clf, p.x, p.y) <= 1e-3);
    const Vector a = alphas_of(clf, p.x.rows());
    CHECK(a.minCoeff() >= 0.0);
    CHECK(a.maxCoeff() <= p.c);
    CHECK(!clf.support_indices.empty());
    for (Eigen::Index i = 0; i < p.x.rows(); ++i) {
      double f_ref = ref.bias;
      for (Eigen::Index j = 0; j < p.x.rows(); ++j) {
        f_ref += ref.alpha[j] * p.y[static_cast<std::size_t>(j)] *
                 kernel_eval(p.kernel, p.x.row(j).transpose(), p.x.row(i).transpose());
      }
      CHECK(predict_binary(clf, p.x.row(i).transpose()) == (f_ref >= 0.0 ? 1 : -1));
    }
  }
}

TEST_CASE("XOR is learned with the default RBF settings") {
  const Matrix x{{1, 1}, {-1, -1}, {1, -1}, {-1, 1}};
  const std::vector<int> y{1, 1, -1, -1};
  const auto clf = train_binary(x, y, opts(10.0, KernelSpec::rbf(0.5)));
  for (Eigen::Index i = 0; i < 4; ++i) CHECK(predict_binary(clf, x.row(i).transpose()) == y[static_cast<std::size_t>(i)]);
}

TEST_CASE("conflicting duplicates hit the bound") {
  const Matrix x{{0.0, 0.0}, {0.0, 0.0}, {2.0, 2.0}, {-2.0, -2.0}};
  const std::vector<int> y{1, -1, 1, -1};
  const auto clf = train_binary(x, y, opts(3.0, KernelSpec::rbf(0.5)));
  const Vector a = alphas_of(clf, 4);
  CHECK(a[0] == 3.0);
  CHECK(a[1] == 3.0);
  const auto ref = oracle::brute_force_dual(gram_matrix(KernelSpec::rbf(0.5), x), y, 3.0);
  CHECK(std::abs(clf.dual_objective - ref.objective) <= 1e-4);
}

TEST_CASE("separable data is classified perfectly") {
  std::mt19937_64 g(8);
  std::normal_distribution<double> d(0.0, 0.3);
  Matrix x(40, 2);
  std::vector<int> y;
  for (Eigen::Index i = 0; i < 40; ++i) {
    const int label = i < 20 ? -1 : 1;
    x(i, 0) = 2.0 * label + d(g);
    x(i, 1) = d(g);
    y.push_back(label);
  }
  for (auto k : {KernelSpec::linear(), KernelSpec::rbf(0.5), KernelSpec::polynomial(3, 1.0)}) {
    const auto clf = train_binary(x, y, opts(10.0, k));
    for (Eigen::Index i = 0; i < 40; ++i) CHECK(predict_binary(clf, x.row(i).transpose()) == y[static_cast<std::size_t>(i)]);
    CHECK(kkt_violation(clf, x, y) <= 1e-3);
  }
}

TEST_CASE("ridge is part of training and the audit") {
  const auto p = oracle::svm_corpus()[7];
  TrainOptions o = opts(p.c, p.kernel);
  o.ridge = 1.0;
  const auto clf = train_binary(p.x, p.y, o);
  CHECK(clf.ridge == 1.0);
  CHECK(kkt_violation(clf, p.x, p.y) <= 1e-3);
  Matrix k = gram_matrix(p.kernel, p.x);
  k.diagonal().array() += 1.0;
  const auto ref = oracle::brute_force_dual(k, p.y, p.c);
  CHECK(std::abs(clf.dual_objective - ref.objective) <= 1e-4);
}

TEST_CASE("predictions do not depend on training-row order") {
  const auto& data = surrogate();
  const auto norm = normalize_fit(data);
  const Matrix z = normalize_matrix(norm, data.observations);
  std::vector<Eigen::Index> rows;
  for (Eigen::Index i = 0; i < z.rows(); i += 5) rows.push_back(i);
  Matrix x(static_cast<Eigen::Index>(rows.size()), z.cols());
  std::vector<int> y;
  for (std::size_t r = 0; r < rows.size(); ++r) {
    x.row(static_cast<Eigen::Index>(r)) = z.row(rows[r]);
    y.push_back((*data.labels)[static_cast<std::size_t>(rows[r])] == ClassCode::Normal ? -1 : 1);
  }
  std::vector<std::size_t> perm(rows.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::shuffle(perm.begin(), perm.end(), std::mt19937_64(4));
  Matrix xp(x.rows(), x.cols());
  std::vector<int> yp;
  for (std::size_t r = 0; r < perm.size(); ++r) {
    xp.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(perm[r]));
    yp.push_back(y[perm[r]]);
  }
  const auto a = train_binary(x, y, TrainOptions{});
  const auto b = train_binary(xp, yp, TrainOptions{});
  for (Eigen::Index i = 0; i < z.rows(); ++i) CHECK(predict_binary(a, z.row(i).transpose()) == predict_binary(b, z.row(i).transpose()));
}

TEST_CASE("one-vs-one multiclass") {
  const auto& data = surrogate();
  const auto [train, test] = split(data, uniform_split(60, 40), 2);
  const auto norm = normalize_fit(train);
  const Matrix x = normalize_matrix(norm, train.observations);
  const auto model = train_multiclass(x, *train.labels, MulticlassConfig{});
  CHECK(model.classifiers.size() == 6);
  CHECK(model.label_map.size() == 4);
  for (const auto& m : model.classifiers) {
    CHECK(to_int(m.positive) < to_int(m.negative));
    CHECK(m.classifier.c == 10.0);
    CHECK(m.classifier.kernel == KernelSpec::rbf(0.5));
    // KKT audit on the pair's own training rows.
    std::vector<Eigen::Index> rows;
    std::vector<int> y;
    for (std::size_t i = 0; i < train.labels->size(); ++i) {
      const auto c = (*train.labels)[i];
      if (c == m.positive || c == m.negative) {
        rows.push_back(static_cast<Eigen::Index>(i));
        y.push_back(c == m.positive ? 1 : -1);
      }
    }
    Matrix xs(static_cast<Eigen::Index>(rows.size()), x.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) xs.row(static_cast<Eigen::Index>(r)) = x.row(rows[r]);
    CHECK(kkt_violation(m.classifier, xs, y) <= 1e-3);
  }
  const Matrix xt = normalize_matrix(norm, test.observations);
  int correct = 0;
  for (Eigen::Index i = 0; i < xt.rows(); ++i) {
    if (predict_multiclass(model, xt.row(i).transpose()) == (*test.labels)[static_cast<std::size_t>(i)]) ++correct;
  }
  CHECK(correct == xt.rows());
}

TEST_CASE("two-class multiclass equals binary training") {
  const auto p = oracle::svm_corpus()[3];
  std::vector<ClassCode> labels;
  for (int v : p.y) labels.push_back(v > 0 ? ClassCode::Normal : ClassCode::FaultB);
  MulticlassConfig cfg;
  cfg.options = opts(p.c, p.kernel);
  const auto model = train_multiclass(p.x, labels, cfg);
  REQUIRE(model.classifiers.size() == 1);
  const auto direct = train_binary(p.x, p.y, cfg.options);
  CHECK(model.classifiers[0].classifier.bias == direct.bias);
  CHECK(model.classifiers[0].classifier.coefficients == direct.coefficients);
  for (Eigen::Index i = 0; i < p.x.rows(); ++i) {
    const auto expect = predict_binary(direct, p.x.row(i).transpose()) > 0 ? ClassCode::Normal : ClassCode::FaultB;
    CHECK(predict_multiclass(model, p.x.row(i).transpose()) == expect);
  }
}

TEST_CASE("one-vs-all multiclass") {
  const auto& data = surrogate();
  const auto norm = normalize_fit(data);
  const Matrix x = normalize_matrix(norm, data.observations);
  MulticlassConfig cfg;
  cfg.strategy = Strategy::OneVsAll;
  const auto model = train_multiclass(x, *data.labels, cfg);
  CHECK(model.classifiers.size() == 4);
  int correct = 0;
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    if (predict_multiclass(model, x.row(i).transpose()) == (*data.labels)[static_cast<std::size_t>(i)]) ++correct;
  }
  CHECK(correct >= 396);
}

namespace {

// Linear classifier with f(x) = w . x + b on a one-dimensional input.
SvmClassifier stub(double w, double b) {
  SvmClassifier c;
  c.kernel = KernelSpec::linear();
  c.support_vectors = Matrix::Ones(1, 1);
  c.coefficients = Vector::Constant(1, w);
  c.support_indices = {0};
  c.bias = b;
  c.c = 1.0;
  return c;
}

}  // namespace

TEST_CASE("voting rules") {
  MulticlassSvm m;
  m.label_map = {ClassCode::Normal, ClassCode::FaultA, ClassCode::FaultB};
  // Unanimous for A: A beats Normal, A beats B.
  m.classifiers = {{ClassCode::Normal, ClassCode::FaultA, stub(0.0, -1.0)},
                   {ClassCode::Normal, ClassCode::FaultB, stub(0.0, 1.0)},
                   {ClassCode::FaultA, ClassCode::FaultB, stub(0.0, 1.0)}};
  CHECK(predict_multiclass(m, Vector::Zero(1)) == ClassCode::FaultA);

  // Three-way tie: each class wins once; strengths decide.
  m.classifiers = {{ClassCode::Normal, ClassCode::FaultA, stub(0.0, 0.5)},
                   {ClassCode::Normal, ClassCode::FaultB, stub(0.0, -2.0)},
                   {ClassCode::FaultA, ClassCode::FaultB, stub(0.0, 1.0)}};
  auto v = vote_multiclass(m, Vector::Zero(1));
  CHECK(v.votes == std::vector<int>{1, 1, 1});
  CHECK(v.label == ClassCode::FaultB);

  // Tie in votes and strength: lowest code.
  m.classifiers = {{ClassCode::Normal, ClassCode::FaultA, stub(0.0, 1.0)},
                   {ClassCode::Normal, ClassCode::FaultB, stub(0.0, -1.0)},
                   {ClassCode::FaultA, ClassCode::FaultB, stub(0.0, 1.0)}};
  v = vote_multiclass(m, Vector::Zero(1));
  CHECK(v.label == ClassCode::Normal);

  MulticlassSvm ova;
  ova.strategy = Strategy::OneVsAll;
  ova.label_map = {ClassCode::Normal, ClassCode::FaultA};
  ova.classifiers = {{ClassCode::Normal, ClassCode::Normal, stub(0.0, 0.2)},
                     {ClassCode::FaultA, ClassCode::FaultA, stub(0.0, 0.7)}};
  CHECK(predict_multiclass(ova, Vector::Zero(1)) == ClassCode::FaultA);
  ova.classifiers[1].classifier.bias = 0.2;
  CHECK(predict_multiclass(ova, Vector::Zero(1)) == ClassCode::Normal);
}

TEST_CASE("multiclass errors name the pair") {
  const Matrix x{{0.0}, {1.0}, {2.0}};
  const std::vector<ClassCode> one{ClassCode::FaultA, ClassCode::FaultA, ClassCode::FaultA};
  CHECK_THROWS_AS(train_multiclass(x, one, MulticlassConfig{}), InvalidInput);
  const std::vector<ClassCode> three{ClassCode::Normal, ClassCode::FaultA, ClassCode::FaultB};
  MulticlassConfig cfg;
  cfg.options.tol = 1e-14;
  cfg.options.max_iterations = 1;
  Matrix xx(6, 1);
  xx << 0.0, 0.1, 0.2, 1.0, 1.1, 1.2;
  const std::vector<ClassCode> six{ClassCode::Normal, ClassCode::FaultA, ClassCode::Normal,
                                   ClassCode::FaultA, ClassCode::Normal, ClassCode::FaultA};
  try {
    train_multiclass(xx, six, cfg);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK(std::string(e.what()).find("pair (Normal, A)") != std::string::npos);
  }
  (void)three;
}

TEST_CASE("AUC") {
  CHECK(auc(std::vector<double>{0.1, 0.2, 0.8, 0.9}, std::vector<int>{-1, -1, 1, 1}) == 1.0);
  CHECK(auc(std::vector<double>{1, 1, 1, 1}, std::vector<int>{-1, 1, -1, 1}) == 0.5);
  CHECK(auc(std::vector<double>{1, 2, 3, 4}, std::vector<int>{-1, 1, -1, 1}) == 0.75);
  CHECK_THROWS_AS(auc(std::vector<double>{1, 2}, std::vector<int>{1, 1}), InvalidInput);
  CHECK_THROWS_AS(auc(std::vector<double>{1}, std::vector<int>{1, -1}), InvalidInput);

  // Brute-force pair count on random data with ties.
  std::mt19937_64 g(5);
  std::uniform_int_distribution<int> s(0, 5);
  std::vector<double> scores;
  std::vector<int> labels;
  for (int i = 0; i < 60; ++i) {
    scores.push_back(s(g));
    labels.push_back(i % 3 == 0 ? 1 : -1);
  }
  double wins = 0.0;
  double pairs = 0.0;
  for (std::size_t i = 0; i < scores.size(); ++i) {
    for (std::size_t j = 0; j < scores.size(); ++j) {
      if (labels[i] != 1 || labels[j] != -1) continue;
      pairs += 1.0;
      wins += scores[i] > scores[j] ? 1.0 : (scores[i] == scores[j] ? 0.5 : 0.0);
    }
  }
  CHECK(auc(scores, labels) == doctest::Approx(wins / pairs).epsilon(1e-14));
}

TEST_CASE("default C grid") {
  const auto grid = default_c_grid();
  CHECK(grid.size() == 1000);
  CHECK(grid.front() == 0.1);
  CHECK(grid.back() == 100.0);
  for (std::size_t i = 1; i < grid.size(); ++i) CHECK(grid[i] > grid[i - 1]);
  CHECK(grid[1] / grid[0] == doctest::Approx(grid[999] / grid[998]).epsilon(1e-9));
  CHECK_THROWS_AS(default_c_grid(0), InvalidInput);
}

TEST_CASE("cross-validation contract") {
  std::mt19937_64 g(2);
  std::normal_distribution<double> d(0.0, 0.4);
  Matrix x(60, 2);
  std::vector<int> y;
  for (Eigen::Index i = 0; i < 60; ++i) {
    const int label = i % 2 == 0 ? 1 : -1;
    x(i, 0) = 2.0 * label + d(g);
    x(i, 1) = d(g);
    y.push_back(label);
  }
  const TrainOptions base = opts(1.0, KernelSpec::rbf(0.5));

  const auto single = cross_validate_c(x, y, {3.0}, 3, 1, base);
  CHECK(single.best_c == 3.0);

  const auto grid = default_c_grid(20, 0.1, 100.0);
  const auto r = cross_validate_c(x, y, grid, 3, 7, base);
  for (double a : r.mean_auc) CHECK(a == 1.0);
  CHECK(r.best_c == 0.1);  // every C ties, smallest wins
  const auto again = cross_validate_c(x, y, grid, 3, 7, base);
  CHECK(again.mean_auc == r.mean_auc);
  CHECK(again.fold_seed == r.fold_seed);

  CHECK_THROWS_AS(cross_validate_c(x, y, {}, 3, 1, base), InvalidInput);
  CHECK_THROWS_AS(cross_validate_c(x, y, grid, 1, 1, base), InvalidInput);
  // Two positives cannot populate three folds.
  std::vector<int> sparse(60, -1);
  sparse[0] = sparse[1] = 1;
  try {
    cross_validate_c(x, sparse, grid, 3, 1, base);
    FAIL("expected an error");
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()).find("10 attempts") != std::string::npos);
  }
}

TEST_CASE("permuted labels carry no signal") {
  const auto& data = surrogate();
  const auto norm = normalize_fit(data);
  const Matrix x = normalize_matrix(norm, data.observations);
  std::vector<int> y;
  for (auto c : *data.labels) y.push_back(c == ClassCode::Normal ? -1 : 1);
  numerics::Rng rng(99);
  for (std::size_t i = y.size(); i > 1; --i) std::swap(y[i - 1], y[rng.below(i)]);
  const auto r = cross_validate_c(x, y, default_c_grid(15, 0.1, 100.0), 3, 5, TrainOptions{});
  const double mean = std::accumulate(r.mean_auc.begin(), r.mean_auc.end(), 0.0) / static_cast<double>(r.mean_auc.size());
  CHECK(mean >= 0.4);
  CHECK(mean <= 0.6);
}
