#include <algorithm>
#include <cmath>
#include <string>

#include "hif/error.hpp"
#include "hif/svm.hpp"

namespace hif::svm {
namespace {

// Re-throws a member failure with the class pair prepended, keeping its type.
template <typename Fn>
SvmClassifier train_member(const std::string& context, Fn&& fn) {
  try {
    return fn();
  } catch (const ConvergenceError& e) {
    throw ConvergenceError(context + ": " + e.what());
  } catch (const IllConditioned& e) {
    throw IllConditioned(context + ": " + e.what());
  } catch (const InvalidInput& e) {
    throw InvalidInput(context + ": " + e.what());
  }
}

}  // namespace

MulticlassSvm train_multiclass(const Matrix& x, std::span<const ClassCode> labels, const MulticlassConfig& config) {
  config.options.validate();
  if (x.rows() != static_cast<Eigen::Index>(labels.size())) throw InvalidInput("row and label counts differ");

  MulticlassSvm model;
  model.strategy = config.strategy;
  model.label_map.assign(labels.begin(), labels.end());
  std::sort(model.label_map.begin(), model.label_map.end());
  model.label_map.erase(std::unique(model.label_map.begin(), model.label_map.end()), model.label_map.end());
  if (model.label_map.size() < 2) throw InvalidInput("multiclass SVM needs at least two classes");

  const auto subset = [&](auto keep, auto sign) {
    std::vector<Eigen::Index> rows;
    std::vector<int> y;
    for (std::size_t t = 0; t < labels.size(); ++t) {
      if (keep(labels[t])) {
        rows.push_back(static_cast<Eigen::Index>(t));
        y.push_back(sign(labels[t]));
      }
    }
    Matrix xs(static_cast<Eigen::Index>(rows.size()), x.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) xs.row(static_cast<Eigen::Index>(r)) = x.row(rows[r]);
    return std::pair{xs, y};
  };

  if (config.strategy == Strategy::OneVsOne) {
    for (std::size_t a = 0; a < model.label_map.size(); ++a) {
      for (std::size_t b = a + 1; b < model.label_map.size(); ++b) {
        const ClassCode pos = model.label_map[a];
        const ClassCode neg = model.label_map[b];
        auto [xs, y] = subset([&](ClassCode c) { return c == pos || c == neg; },
                              [&](ClassCode c) { return c == pos ? 1 : -1; });
        BinaryMember m;
        m.positive = pos;
        m.negative = neg;
        m.classifier = train_member("pair (" + class_name(pos) + ", " + class_name(neg) + ")",
                                    [&] { return train_binary(xs, y, config.options); });
        model.classifiers.push_back(std::move(m));
      }
    }
  } else {
    for (ClassCode pos : model.label_map) {
      auto [xs, y] = subset([](ClassCode) { return true; }, [&](ClassCode c) { return c == pos ? 1 : -1; });
      BinaryMember m;
      m.positive = pos;
      m.negative = pos;
      m.classifier = train_member("class " + class_name(pos) + " vs rest",
                                  [&] { return train_binary(xs, y, config.options); });
      model.classifiers.push_back(std::move(m));
    }
  }
  return model;
}

Vote vote_multiclass(const MulticlassSvm& model, const Eigen::Ref<const Vector>& x) {
  const std::size_t q = model.label_map.size();
  if (q == 0 || model.classifiers.empty()) throw InvalidInput("multiclass model is empty");
  const auto index_of = [&](ClassCode c) {
    const auto it = std::find(model.label_map.begin(), model.label_map.end(), c);
    if (it == model.label_map.end()) throw InvalidInput("classifier refers to a class outside the label map");
    return static_cast<std::size_t>(it - model.label_map.begin());
  };

  Vote vote;
  vote.votes.assign(q, 0);
  vote.vote_strength.assign(q, 0.0);
  if (model.strategy == Strategy::OneVsOne) {
    for (const auto& m : model.classifiers) {
      const double f = decision_value(m.classifier, x);
      const std::size_t winner = index_of(f >= 0.0 ? m.positive : m.negative);
      vote.votes[winner] += 1;
      vote.vote_strength[winner] += std::abs(f);
    }
    std::size_t best = 0;
    for (std::size_t k = 1; k < q; ++k) {
      if (vote.votes[k] > vote.votes[best] ||
          (vote.votes[k] == vote.votes[best] && vote.vote_strength[k] > vote.vote_strength[best])) {
        best = k;
      }
    }
    vote.label = model.label_map[best];
  } else {
    std::size_t best = q;
    double best_f = 0.0;
    for (const auto& m : model.classifiers) {
      const std::size_t k = index_of(m.positive);
      const double f = decision_value(m.classifier, x);
      vote.vote_strength[k] = f;
      if (best == q || f > best_f || (f == best_f && k < best)) {
        best = k;
        best_f = f;
      }
    }
    vote.votes[best] = 1;
    vote.label = model.label_map[best];
  }
  return vote;
}

ClassCode predict_multiclass(const MulticlassSvm& model, const Eigen::Ref<const Vector>& x) {
  return vote_multiclass(model, x).label;
}

}  // namespace hif::svm
