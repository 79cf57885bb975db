#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hif/error.hpp"
#include "hif/random.hpp"
#include "hif/svm.hpp"

namespace hif::svm {
namespace {

constexpr int kMaxFoldAttempts = 10;

// Stratified round-robin assignment after a per-class shuffle.
std::vector<std::size_t> assign_folds(std::span<const int> y, std::size_t folds, std::uint64_t seed) {
  std::vector<std::size_t> fold(y.size(), 0);
  for (int label : {1, -1}) {
    std::vector<std::size_t> rows;
    for (std::size_t t = 0; t < y.size(); ++t) {
      if (y[t] == label) rows.push_back(t);
    }
    numerics::Rng rng(numerics::derive_seed(seed, label > 0 ? 1 : 0));
    for (std::size_t i = rows.size(); i > 1; --i) std::swap(rows[i - 1], rows[rng.below(i)]);
    for (std::size_t p = 0; p < rows.size(); ++p) fold[rows[p]] = p % folds;
  }
  return fold;
}

bool folds_usable(std::span<const int> y, const std::vector<std::size_t>& fold, std::size_t folds) {
  for (std::size_t k = 0; k < folds; ++k) {
    int val_pos = 0, val_neg = 0, tr_pos = 0, tr_neg = 0;
    for (std::size_t t = 0; t < y.size(); ++t) {
      const bool pos = y[t] > 0;
      if (fold[t] == k) {
        (pos ? val_pos : val_neg)++;
      } else {
        (pos ? tr_pos : tr_neg)++;
      }
    }
    if (!val_pos || !val_neg || !tr_pos || !tr_neg) return false;
  }
  return true;
}

}  // namespace

double auc(std::span<const double> scores, std::span<const int> labels) {
  if (scores.size() != labels.size()) throw InvalidInput("AUC: scores and labels differ in length");
  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  double pos_rank_sum = 0.0;
  std::size_t n_pos = 0;
  std::size_t n_neg = 0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double mid_rank = 0.5 * static_cast<double>(i + 1 + j);  // mean of ranks i+1..j
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]] > 0) {
        pos_rank_sum += mid_rank;
        ++n_pos;
      } else {
        ++n_neg;
      }
    }
    i = j;
  }
  if (n_pos == 0 || n_neg == 0) throw InvalidInput("AUC needs at least one positive and one negative");
  const double np = static_cast<double>(n_pos);
  return (pos_rank_sum - np * (np + 1.0) / 2.0) / (np * static_cast<double>(n_neg));
}

std::vector<double> default_c_grid(std::size_t points, double lo, double hi) {
  if (points == 0 || !(lo > 0.0) || !(hi >= lo)) throw InvalidInput("C grid needs points > 0 and 0 < lo <= hi");
  std::vector<double> grid(points);
  if (points == 1) {
    grid[0] = lo;
    return grid;
  }
  const double a = std::log10(lo);
  const double b = std::log10(hi);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = std::pow(10.0, a + (b - a) * static_cast<double>(i) / static_cast<double>(points - 1));
  }
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

CvResult cross_validate_c(const Matrix& x, std::span<const int> y, const std::vector<double>& grid,
                          std::size_t folds, std::uint64_t seed, const TrainOptions& base) {
  base.validate();
  if (grid.empty()) throw InvalidInput("cross-validation grid is empty");
  for (double c : grid) {
    if (!(c > 0.0)) throw InvalidInput("cross-validation grid holds a non-positive C");
  }
  if (folds < 2) throw InvalidInput("cross-validation needs at least 2 folds");
  if (x.rows() != static_cast<Eigen::Index>(y.size())) throw InvalidInput("row and label counts differ");
  for (int v : y) {
    if (v != 1 && v != -1) throw InvalidInput("binary SVM labels must be -1 or +1");
  }

  CvResult result;
  result.grid = grid;
  std::vector<std::size_t> fold;
  bool ok = false;
  for (int attempt = 0; attempt < kMaxFoldAttempts && !ok; ++attempt) {
    result.attempts = attempt + 1;
    result.fold_seed = numerics::derive_seed(seed, static_cast<std::uint64_t>(attempt));
    fold = assign_folds(y, folds, result.fold_seed);
    ok = folds_usable(y, fold, folds);
  }
  if (!ok) {
    throw InvalidInput("no " + std::to_string(folds) + "-fold assignment with both classes in every fold after " +
                       std::to_string(kMaxFoldAttempts) + " attempts");
  }

  Matrix gram = gram_matrix(base.kernel, x);
  result.mean_auc.assign(grid.size(), 0.0);
  for (std::size_t k = 0; k < folds; ++k) {
    std::vector<Eigen::Index> tr, va;
    for (std::size_t t = 0; t < y.size(); ++t) (fold[t] == k ? va : tr).push_back(static_cast<Eigen::Index>(t));
    Matrix k_tr(static_cast<Eigen::Index>(tr.size()), static_cast<Eigen::Index>(tr.size()));
    Matrix k_va(static_cast<Eigen::Index>(va.size()), static_cast<Eigen::Index>(tr.size()));
    std::vector<int> y_tr, y_va;
    for (auto t : tr) y_tr.push_back(y[static_cast<std::size_t>(t)]);
    for (auto t : va) y_va.push_back(y[static_cast<std::size_t>(t)]);
    for (std::size_t a = 0; a < tr.size(); ++a) {
      for (std::size_t b = 0; b < tr.size(); ++b) {
        k_tr(static_cast<Eigen::Index>(a), static_cast<Eigen::Index>(b)) = gram(tr[a], tr[b]);
      }
      for (std::size_t v = 0; v < va.size(); ++v) {
        k_va(static_cast<Eigen::Index>(v), static_cast<Eigen::Index>(a)) = gram(va[v], tr[a]);
      }
    }
    k_tr.diagonal().array() += base.ridge;
    Vector ytr(static_cast<Eigen::Index>(y_tr.size()));
    for (std::size_t a = 0; a < y_tr.size(); ++a) ytr[static_cast<Eigen::Index>(a)] = y_tr[a];

    for (std::size_t g = 0; g < grid.size(); ++g) {
      const auto sol = solve_dual(k_tr, y_tr, grid[g], base.tol, base.max_iterations);
      const Vector f = k_va * sol.alpha.cwiseProduct(ytr) + Vector::Constant(k_va.rows(), sol.bias);
      std::vector<double> scores(f.data(), f.data() + f.size());
      result.mean_auc[g] += auc(scores, y_va) / static_cast<double>(folds);
    }
  }
  std::size_t best = 0;
  for (std::size_t g = 1; g < grid.size(); ++g) {
    if (result.mean_auc[g] > result.mean_auc[best] ||
        (result.mean_auc[g] == result.mean_auc[best] && grid[g] < grid[best])) {
      best = g;
    }
  }
  result.best_c = grid[best];
  return result;
}

}  // namespace hif::svm
