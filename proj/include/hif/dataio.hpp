#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "hif/numerics.hpp"

namespace hif {

using numerics::Matrix;
using numerics::Vector;

/// Class codes used throughout the library. The original MATLAB labelling was
/// 4 = normal, 3 = A, 2 = B, 1 = C; see to_matlab_label / from_matlab_label.
enum class ClassCode : int { Normal = 0, FaultA = 1, FaultB = 2, FaultC = 3 };

inline constexpr int kClassCount = 4;

int to_int(ClassCode c);
ClassCode class_from_int(int code);  // throws InvalidInput outside 0..3
std::string class_name(ClassCode c);
int to_matlab_label(ClassCode c);
ClassCode from_matlab_label(int label);

/// n x m observations with channel names and optional per-row labels.
struct DataMatrix {
  Matrix observations;
  std::vector<std::string> channel_names;
  std::optional<std::vector<ClassCode>> labels;

  Eigen::Index rows() const { return observations.rows(); }
  Eigen::Index cols() const { return observations.cols(); }
  bool has_labels() const { return labels.has_value(); }

  /// Throws InvalidInput if names/labels disagree with the matrix shape or
  /// any entry is non-finite.
  void validate() const;

  /// Rows whose label equals `code`, in original order.
  DataMatrix select_class(ClassCode code) const;
  DataMatrix select_rows(const std::vector<Eigen::Index>& indices) const;

  bool operator==(const DataMatrix& other) const;
};

/// Stacks matrices with identical channel names.
DataMatrix vstack(const std::vector<DataMatrix>& parts);

inline constexpr double kStdFloor = 1e-12;

struct Normalizer {
  Vector means;
  Vector stds;  // each >= kStdFloor
};

/// Column means and sample standard deviations (divisor n - 1).
Normalizer normalize_fit(const DataMatrix& x);
DataMatrix normalize_apply(const Normalizer& norm, const DataMatrix& x);
Vector normalize_row(const Normalizer& norm, const Eigen::Ref<const Vector>& row);
Matrix normalize_matrix(const Normalizer& norm, const Matrix& x);

/// Per-class (train, test) row counts.
using SplitSpec = std::map<ClassCode, std::pair<std::size_t, std::size_t>>;

/// Same train/test counts for every class.
SplitSpec uniform_split(std::size_t train_per_class, std::size_t test_per_class);

/// Stratified random split. Rows of each class are shuffled with a stream
/// derived from `seed` and the class code; the first `train` go to the
/// training set and the next `test` to the test set. Output rows are grouped
/// by ascending class code and keep their original order within a class.
std::pair<DataMatrix, DataMatrix> split(const DataMatrix& x, const SplitSpec& spec, std::uint64_t seed);

/// CSV with a header row of channel names plus an optional trailing `label`
/// column. Values are written with 17 significant digits.
void write_csv(const DataMatrix& x, const std::filesystem::path& path);
DataMatrix read_csv(const std::filesystem::path& path);

/// 17-significant-digit rendering; parses back to the identical double.
std::string format_real(double v);

}  // namespace hif
