#include <algorithm>
#include <cmath>
#include <random>

#include "doctest.h"
#include "hif/error.hpp"
#include "hif/fda.hpp"
#include "hif/hifsim.hpp"
#include "hif/pca.hpp"

using namespace hif;
using namespace hif::fda;

namespace {

const DataMatrix& surrogate() {
  static const DataMatrix x = sim::generate_dataset(sim::default_dataset_config(), 20240601);
  return x;
}

struct Prepared {
  Normalizer norm;
  DataMatrix train;
  DataMatrix test;
};

Prepared prepared() {
  auto [train, test] = split(surrogate(), uniform_split(60, 40), 11);
  Prepared p;
  p.norm = normalize_fit(train);
  p.train = normalize_apply(p.norm, train);
  p.test = normalize_apply(p.norm, test);
  return p;
}

DataMatrix random_labelled(std::size_t per_class, int classes, Eigen::Index m, std::uint64_t seed) {
  std::mt19937_64 g(seed);
  std::normal_distribution<double> d;
  DataMatrix x;
  for (Eigen::Index j = 0; j < m; ++j) x.channel_names.push_back("c" + std::to_string(j));
  const auto n = static_cast<Eigen::Index>(per_class) * classes;
  x.observations.resize(n, m);
  x.labels.emplace();
  for (Eigen::Index i = 0; i < n; ++i) {
    const int c = static_cast<int>(i % classes);
    for (Eigen::Index j = 0; j < m; ++j) x.observations(i, j) = d(g) + (j == c ? 3.0 : 0.0);
    x.labels->push_back(class_from_int(c));
  }
  return x;
}

Matrix total_scatter(const DataMatrix& x) {
  const Vector mean = x.observations.colwise().mean().transpose();
  const Matrix c = x.observations.rowwise() - mean.transpose();
  return c.transpose() * c;
}

}  // namespace

TEST_CASE("axis-separated classes give an axis-aligned FDA vector") {
  DataMatrix x;
  x.channel_names = {"a", "b", "c"};
  x.observations.resize(16, 3);
  x.labels.emplace();
  Eigen::Index r = 0;
  for (int cls = 0; cls < 2; ++cls) {
    for (double a : {-1.0, 1.0}) {
      for (double b : {-1.0, 1.0}) {
        for (double c : {-0.5, 0.5}) {
          x.observations.row(r++) = Eigen::RowVector3d(a, 2.0 * b, c + 5.0 * cls);
          x.labels->push_back(class_from_int(cls));
        }
      }
    }
  }
  const auto m = fit_fda(x);
  REQUIRE(m.fda_vectors.cols() == 1);
  const Vector v = m.fda_vectors.col(0).normalized();
  CHECK(std::abs(std::abs(v[2]) - 1.0) < 1e-9);
}

TEST_CASE("identical class means give no separation") {
  auto x = random_labelled(10, 1, 3, 2);
  DataMatrix both = vstack({x, x});
  for (std::size_t i = 10; i < 20; ++i) (*both.labels)[i] = ClassCode::FaultA;
  const auto m = fit_fda(both);
  CHECK(m.between_scatter.cwiseAbs().maxCoeff() < 1e-25);
  CHECK(m.eigenvalues.cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("scatter identity and matrix properties") {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto x = random_labelled(15, 3, 5, seed);
    const auto m = fit_fda(x);
    const Matrix st = total_scatter(x);
    CHECK((m.within_scatter + m.between_scatter - st).norm() <= 1e-8 * st.norm());
    for (const Matrix* s : {&m.within_scatter, &m.between_scatter}) {
      CHECK((*s - s->transpose()).cwiseAbs().maxCoeff() <= 1e-12 * std::max(1.0, s->cwiseAbs().maxCoeff()));
      CHECK(numerics::eig_symmetric(*s).eigenvalues.minCoeff() >= -1e-10 * s->trace());
    }
    for (const auto& s : m.class_scatter) {
      CHECK(numerics::eig_symmetric(s).eigenvalues.minCoeff() >= -1e-10 * s.trace());
    }
    CHECK(m.priors.sum() == doctest::Approx(1.0));
    CHECK(m.fda_vectors.cols() == 2);
    const auto full = numerics::eig_generalized(m.between_scatter, m.within_scatter);
    CHECK(full.eigenvalues.minCoeff() >= -1e-8 * full.eigenvalues.maxCoeff());
    CHECK((full.eigenvalues.array() > 1e-8 * full.eigenvalues.maxCoeff()).count() <= 2);
  }
}

TEST_CASE("fit_fda input checks") {
  auto x = random_labelled(1, 2, 3, 1);
  CHECK_THROWS_AS(fit_fda(x), InvalidInput);
  try {
    fit_fda(x);
  } catch (const InvalidInput& e) {
    CHECK(std::string(e.what()).find("Normal") != std::string::npos);
  }
  auto single = random_labelled(5, 1, 3, 1);
  CHECK_THROWS_AS(fit_fda(single), InvalidInput);
  single.labels.reset();
  CHECK_THROWS_AS(fit_fda(single), InvalidInput);
}

TEST_CASE("projection is linear") {
  const auto x = random_labelled(10, 3, 4, 7);
  const auto m = fit_fda(x);
  CHECK(fda_project(m, Vector::Zero(4)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((fda_project(m, m.total_mean) - m.fda_vectors.transpose() * m.total_mean).cwiseAbs().maxCoeff() == 0.0);
  CHECK_THROWS_AS(fda_project(m, Vector::Zero(3)), InvalidInput);
}

TEST_CASE("leading FDA direction separates the normal class on surrogate data") {
  const auto p = prepared();
  const auto m = fit_fda(p.train);
  // Normal class against every fault class: the 1-D ranges on the first
  // direction do not overlap.
  const auto range = [&](ClassCode c) {
    const auto rows = p.train.select_class(c);
    double lo = 1e300, hi = -1e300;
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
      const double z = fda_project(m, rows.observations.row(i).transpose())[0];
      lo = std::min(lo, z);
      hi = std::max(hi, z);
    }
    return std::pair{lo, hi};
  };
  const auto [nlo, nhi] = range(ClassCode::Normal);
  bool disjoint_pair = false;
  for (auto c : {ClassCode::FaultA, ClassCode::FaultB, ClassCode::FaultC}) {
    const auto [lo, hi] = range(c);
    if (hi < nlo || lo > nhi) disjoint_pair = true;
  }
  CHECK(disjoint_pair);
}

TEST_CASE("class T^2 is zero at the class mean and non-negative") {
  const auto x = random_labelled(20, 3, 4, 9);
  const auto m = fit_fda(x);
  for (std::size_t k = 0; k < m.classes(); ++k) {
    const Vector mean = m.class_means.row(static_cast<Eigen::Index>(k)).transpose();
    CHECK(fda_t2(m, mean, m.class_codes[k], 2) == doctest::Approx(0.0));
    for (Eigen::Index i = 0; i < x.rows(); ++i) CHECK(fda_t2(m, x.observations.row(i).transpose(), m.class_codes[k], 1) >= 0.0);
  }
  CHECK_THROWS_AS(fda_t2(m, x.observations.row(0).transpose(), ClassCode::Normal, 3), InvalidInput);
  CHECK_THROWS_AS(fda_t2(m, x.observations.row(0).transpose(), ClassCode::FaultC, 1), InvalidInput);
}

TEST_CASE("class T^2 threshold uses the class count") {
  const auto x = random_labelled(20, 2, 3, 4);
  const auto m = fit_fda(x);
  const double n = 20.0;
  const double expect = 1.0 * (n - 1) * (n + 1) / (n * (n - 1)) * numerics::f_quantile(0.99, 1, n - 1);
  CHECK(fda_t2_threshold(m, ClassCode::Normal, 1, 0.01) == doctest::Approx(expect).epsilon(1e-12));
}

TEST_CASE("FDA T^2 agrees with PCA detection on two-class data") {
  auto [train, test] = split(surrogate(), uniform_split(60, 40), 5);
  const auto keep = [](const DataMatrix& d) {
    std::vector<Eigen::Index> rows;
    for (std::size_t i = 0; i < d.labels->size(); ++i) {
      const auto c = (*d.labels)[i];
      if (c == ClassCode::Normal || c == ClassCode::FaultA) rows.push_back(static_cast<Eigen::Index>(i));
    }
    return d.select_rows(rows);
  };
  const auto tr = keep(train);
  const auto te = keep(test);
  const auto norm = normalize_fit(tr);
  const auto m = fit_fda(normalize_apply(norm, tr));
  const auto pm = pca::fit_pca(tr.select_class(ClassCode::Normal), 0.98);
  const double limit = fda_t2_threshold(m, ClassCode::Normal, 1, 0.001);
  int agree = 0;
  for (Eigen::Index i = 0; i < te.rows(); ++i) {
    const Vector row = te.observations.row(i).transpose();
    const bool fda_fault = fda_t2(m, normalize_row(norm, row), ClassCode::Normal, 1) > limit;
    const bool pca_fault = pca::detect(pm, row, 0.001) == pca::Flag::Fault;
    if (fda_fault == pca_fault) ++agree;
  }
  CHECK(agree >= static_cast<int>(0.95 * static_cast<double>(te.rows())));
}

TEST_CASE("discriminant picks the nearest class mean under equal priors") {
  const auto x = random_labelled(30, 4, 5, 12);
  auto m = fit_fda(x);
  for (std::size_t k = 0; k < m.classes(); ++k) {
    const Vector mean = m.class_means.row(static_cast<Eigen::Index>(k)).transpose();
    CHECK(classify(m, mean) == m.class_codes[k]);
  }
  // Scaling every prior by the same factor shifts all g_k equally.
  const Vector probe = x.observations.row(3).transpose();
  const Vector g = discriminant(m, probe);
  auto scaled = m;
  scaled.priors *= 2.0;
  const Vector g2 = discriminant(scaled, probe);
  CHECK(((g2 - g).array() - std::log(2.0)).abs().maxCoeff() < 1e-12);
  Eigen::Index a = 0, b = 0;
  g.maxCoeff(&a);
  g2.maxCoeff(&b);
  CHECK(a == b);
  CHECK(classify(scaled, probe) == classify(m, probe));
}

TEST_CASE("ties go to the lowest class code") {
  DataMatrix x;
  x.channel_names = {"a", "b"};
  const Matrix base{{1.0, 0.3}, {2.0, -0.4}, {1.5, 0.9}, {1.2, -0.2}};
  x.observations.resize(8, 2);
  x.observations.topRows(4) = base;
  x.observations.bottomRows(4) = -base;
  x.labels = std::vector<ClassCode>{ClassCode::FaultB, ClassCode::FaultB, ClassCode::FaultB, ClassCode::FaultB,
                                    ClassCode::FaultA, ClassCode::FaultA, ClassCode::FaultA, ClassCode::FaultA};
  const auto m = fit_fda(x);
  const Vector g = discriminant(m, Vector::Zero(2));
  CHECK(g[0] == g[1]);
  CHECK(classify(m, Vector::Zero(2)) == ClassCode::FaultA);
}

TEST_CASE("surrogate four-class classification") {
  const auto p = prepared();
  const auto m = fit_fda(p.train);
  int correct = 0;
  for (Eigen::Index i = 0; i < p.test.rows(); ++i) {
    if (classify(m, p.test.observations.row(i).transpose()) == (*p.test.labels)[static_cast<std::size_t>(i)]) ++correct;
  }
  CHECK(correct >= static_cast<int>(std::ceil(0.99 * static_cast<double>(p.test.rows()))));

  const Vector normal_mean = m.class_means.row(static_cast<Eigen::Index>(m.index_of(ClassCode::Normal))).transpose();
  CHECK(classify(m, normal_mean) == ClassCode::Normal);

  // 30 normal rows followed by fault-A rows: the prediction switches at the boundary.
  const auto normal = p.test.select_class(ClassCode::Normal);
  const auto fault = p.test.select_class(ClassCode::FaultA);
  std::vector<ClassCode> seq;
  for (Eigen::Index i = 0; i < 30; ++i) seq.push_back(classify(m, normal.observations.row(i).transpose()));
  for (Eigen::Index i = 0; i < fault.rows(); ++i) seq.push_back(classify(m, fault.observations.row(i).transpose()));
  std::size_t first_fault = seq.size();
  for (std::size_t i = 0; i < seq.size(); ++i) {
    if (seq[i] == ClassCode::FaultA) {
      first_fault = i;
      break;
    }
  }
  CHECK(first_fault >= 29);
  CHECK(first_fault <= 31);
}
