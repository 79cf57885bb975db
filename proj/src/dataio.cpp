#include "hif/dataio.hpp"

#include <algorithm>
#include <cmath>

#include "hif/error.hpp"
#include "hif/random.hpp"

namespace hif {

int to_int(ClassCode c) { return static_cast<int>(c); }

ClassCode class_from_int(int code) {
  if (code < 0 || code >= kClassCount) {
    throw InvalidInput("class code " + std::to_string(code) + " outside 0..3");
  }
  return static_cast<ClassCode>(code);
}

std::string class_name(ClassCode c) {
  switch (c) {
    case ClassCode::Normal: return "Normal";
    case ClassCode::FaultA: return "A";
    case ClassCode::FaultB: return "B";
    case ClassCode::FaultC: return "C";
  }
  return "?";
}

int to_matlab_label(ClassCode c) { return 4 - to_int(c); }

ClassCode from_matlab_label(int label) {
  if (label < 1 || label > 4) throw InvalidInput("MATLAB-style label must be 1..4");
  return class_from_int(4 - label);
}

void DataMatrix::validate() const {
  if (static_cast<Eigen::Index>(channel_names.size()) != cols()) {
    throw InvalidInput("DataMatrix has " + std::to_string(cols()) + " columns but " +
                       std::to_string(channel_names.size()) + " channel names");
  }
  if (labels && static_cast<Eigen::Index>(labels->size()) != rows()) {
    throw InvalidInput("DataMatrix has " + std::to_string(rows()) + " rows but " +
                       std::to_string(labels->size()) + " labels");
  }
  numerics::require_finite(observations, "DataMatrix");
}

DataMatrix DataMatrix::select_rows(const std::vector<Eigen::Index>& indices) const {
  DataMatrix out;
  out.channel_names = channel_names;
  out.observations.resize(static_cast<Eigen::Index>(indices.size()), cols());
  if (labels) out.labels.emplace();
  for (std::size_t r = 0; r < indices.size(); ++r) {
    const Eigen::Index src = indices[r];
    if (src < 0 || src >= rows()) throw InvalidInput("row index out of range");
    out.observations.row(static_cast<Eigen::Index>(r)) = observations.row(src);
    if (labels) out.labels->push_back((*labels)[static_cast<std::size_t>(src)]);
  }
  return out;
}

DataMatrix DataMatrix::select_class(ClassCode code) const {
  if (!labels) throw InvalidInput("select_class needs labelled data");
  std::vector<Eigen::Index> idx;
  for (std::size_t i = 0; i < labels->size(); ++i) {
    if ((*labels)[i] == code) idx.push_back(static_cast<Eigen::Index>(i));
  }
  return select_rows(idx);
}

bool DataMatrix::operator==(const DataMatrix& other) const {
  return observations.rows() == other.observations.rows() && observations.cols() == other.observations.cols() &&
         observations == other.observations && channel_names == other.channel_names && labels == other.labels;
}

DataMatrix vstack(const std::vector<DataMatrix>& parts) {
  if (parts.empty()) throw InvalidInput("vstack: nothing to stack");
  DataMatrix out;
  out.channel_names = parts.front().channel_names;
  Eigen::Index total = 0;
  const bool labelled = parts.front().has_labels();
  for (const auto& p : parts) {
    if (p.channel_names != out.channel_names) throw InvalidInput("vstack: conflicting channel sets");
    if (p.has_labels() != labelled) throw InvalidInput("vstack: mixing labelled and unlabelled data");
    total += p.rows();
  }
  out.observations.resize(total, static_cast<Eigen::Index>(out.channel_names.size()));
  if (labelled) out.labels.emplace();
  Eigen::Index at = 0;
  for (const auto& p : parts) {
    out.observations.middleRows(at, p.rows()) = p.observations;
    at += p.rows();
    if (labelled) out.labels->insert(out.labels->end(), p.labels->begin(), p.labels->end());
  }
  return out;
}

Normalizer normalize_fit(const DataMatrix& x) {
  if (x.rows() < 2) throw InvalidInput("normalize_fit needs at least 2 rows");
  numerics::require_finite(x.observations, "normalize_fit input");
  const auto n = static_cast<double>(x.rows());
  Normalizer norm;
  norm.means = x.observations.colwise().mean().transpose();
  const Matrix centered = x.observations.rowwise() - norm.means.transpose();
  norm.stds = (centered.colwise().squaredNorm().transpose() / (n - 1.0)).cwiseSqrt();
  norm.stds = norm.stds.cwiseMax(kStdFloor);
  return norm;
}

Matrix normalize_matrix(const Normalizer& norm, const Matrix& x) {
  if (x.cols() != norm.means.size()) {
    throw InvalidInput("normalizer expects " + std::to_string(norm.means.size()) + " columns, got " +
                       std::to_string(x.cols()));
  }
  return (x.rowwise() - norm.means.transpose()).array().rowwise() / norm.stds.transpose().array();
}

DataMatrix normalize_apply(const Normalizer& norm, const DataMatrix& x) {
  DataMatrix out = x;
  out.observations = normalize_matrix(norm, x.observations);
  return out;
}

Vector normalize_row(const Normalizer& norm, const Eigen::Ref<const Vector>& row) {
  if (row.size() != norm.means.size()) {
    throw InvalidInput("normalizer expects rows of length " + std::to_string(norm.means.size()) + ", got " +
                       std::to_string(row.size()));
  }
  return (row - norm.means).cwiseQuotient(norm.stds);
}

SplitSpec uniform_split(std::size_t train_per_class, std::size_t test_per_class) {
  SplitSpec spec;
  for (int c = 0; c < kClassCount; ++c) spec[class_from_int(c)] = {train_per_class, test_per_class};
  return spec;
}

std::pair<DataMatrix, DataMatrix> split(const DataMatrix& x, const SplitSpec& spec, std::uint64_t seed) {
  if (!x.labels) throw InvalidInput("split needs labelled data");
  std::vector<Eigen::Index> train_idx;
  std::vector<Eigen::Index> test_idx;
  for (const auto& [code, counts] : spec) {
    std::vector<Eigen::Index> rows;
    for (std::size_t i = 0; i < x.labels->size(); ++i) {
      if ((*x.labels)[i] == code) rows.push_back(static_cast<Eigen::Index>(i));
    }
    const auto [n_train, n_test] = counts;
    if (n_train + n_test > rows.size()) {
      throw InvalidInput("split: class " + class_name(code) + " has " + std::to_string(rows.size()) +
                         " rows, " + std::to_string(n_train + n_test) + " requested");
    }
    // Fisher-Yates with the project RNG; std::shuffle is implementation-defined.
    numerics::Rng rng(numerics::derive_seed(seed, static_cast<std::uint64_t>(to_int(code))));
    for (std::size_t i = rows.size(); i > 1; --i) {
      std::swap(rows[i - 1], rows[rng.below(i)]);
    }
    std::vector<Eigen::Index> tr(rows.begin(), rows.begin() + static_cast<std::ptrdiff_t>(n_train));
    std::vector<Eigen::Index> te(rows.begin() + static_cast<std::ptrdiff_t>(n_train),
                                 rows.begin() + static_cast<std::ptrdiff_t>(n_train + n_test));
    std::sort(tr.begin(), tr.end());
    std::sort(te.begin(), te.end());
    train_idx.insert(train_idx.end(), tr.begin(), tr.end());
    test_idx.insert(test_idx.end(), te.begin(), te.end());
  }
  return {x.select_rows(train_idx), x.select_rows(test_idx)};
}

}  // namespace hif
