#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "hif/dataio.hpp"
#include "hif/fda.hpp"
#include "hif/pca.hpp"
#include "hif/svm.hpp"

namespace hif::model {

struct PcaDetector {
  pca::PcaModel model;
  double alpha = 0.001;
  pca::ThresholdDof dof = pca::ThresholdDof::Retained;
};

// FDA and SVM detectors work on z-scored rows; the training normalizer is
// stored alongside the model.
struct FdaDetector {
  Normalizer normalizer;
  fda::FdaModel model;
};

/// Normal (-1) versus any fault (+1).
struct SvmDetector {
  Normalizer normalizer;
  svm::SvmClassifier classifier;
};

struct MsvmDetector {
  Normalizer normalizer;
  svm::MulticlassSvm model;
};

using Detector = std::variant<PcaDetector, FdaDetector, SvmDetector, MsvmDetector>;

/// "pca", "fda", "svm" or "msvm".
std::string detector_name(const Detector& d);

struct ModelFile {
  Detector detector;
  std::vector<std::string> channel_names;
  std::map<std::string, std::string> config;  // training configuration echo
  std::uint64_t seed = 0;
};

struct Prediction {
  int label = 0;  // class code, or 4 for an unlocated fault
  double statistic = 0.0;
};

/// pca: T^2 against the stored threshold, fault -> 4.
/// fda: discriminant argmax, statistic = winning g_k.
/// svm: sign of f(x), fault -> 4, statistic = f(x).
/// msvm: OvO vote, statistic = vote strength of the winner.
Prediction predict(const Detector& d, const Eigen::Ref<const Vector>& row);

/// Decision threshold for detectors that have one (pca only).
std::optional<double> threshold(const Detector& d);

std::string model_to_json(const ModelFile& file);
ModelFile model_from_json(const std::string& text, const std::string& source = "<memory>");

void save_model(const ModelFile& file, const std::filesystem::path& path);
ModelFile load_model(const std::filesystem::path& path);

}  // namespace hif::model
