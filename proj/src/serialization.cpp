#include "hif/serialization.hpp"

#include <algorithm>

#include "hif/error.hpp"
#include "json_util.hpp"

namespace hif::model {
namespace {

using detail::Json;
using detail::matrix_from_json;
using detail::matrix_to_json;
using detail::vector_from_json;
using detail::vector_to_json;

constexpr int kFormatVersion = 1;

Json normalizer_to_json(const Normalizer& n) {
  return Json{{"means", vector_to_json(n.means)}, {"stds", vector_to_json(n.stds)}};
}

Normalizer normalizer_from_json(const Json& j) {
  return Normalizer{vector_from_json(j.at("means")), vector_from_json(j.at("stds"))};
}

Json codes_to_json(const std::vector<ClassCode>& codes) {
  Json out = Json::array();
  for (auto c : codes) out.push_back(to_int(c));
  return out;
}

std::vector<ClassCode> codes_from_json(const Json& j) {
  std::vector<ClassCode> out;
  for (const auto& v : j) out.push_back(class_from_int(v.get<int>()));
  return out;
}

const char* kernel_kind_name(svm::KernelSpec::Kind k) {
  switch (k) {
    case svm::KernelSpec::Kind::Linear: return "linear";
    case svm::KernelSpec::Kind::Polynomial: return "polynomial";
    case svm::KernelSpec::Kind::Rbf: return "rbf";
  }
  return "?";
}

Json kernel_to_json(const svm::KernelSpec& k) {
  return Json{{"kind", kernel_kind_name(k.kind)}, {"degree", k.degree}, {"coef", k.coef}, {"sigma", k.sigma}};
}

svm::KernelSpec kernel_from_json(const Json& j) {
  svm::KernelSpec k;
  const auto kind = j.at("kind").get<std::string>();
  if (kind == "linear") {
    k.kind = svm::KernelSpec::Kind::Linear;
  } else if (kind == "polynomial") {
    k.kind = svm::KernelSpec::Kind::Polynomial;
  } else if (kind == "rbf") {
    k.kind = svm::KernelSpec::Kind::Rbf;
  } else {
    throw InvalidInput("unknown kernel kind '" + kind + "'");
  }
  k.degree = j.at("degree").get<int>();
  k.coef = j.at("coef").get<double>();
  k.sigma = j.at("sigma").get<double>();
  k.validate();
  return k;
}

Json classifier_to_json(const svm::SvmClassifier& c) {
  Json idx = Json::array();
  for (auto i : c.support_indices) idx.push_back(i);
  return Json{{"kernel", kernel_to_json(c.kernel)},
              {"c", c.c},
              {"tolerance", c.kkt_tolerance},
              {"ridge", c.ridge},
              {"bias", c.bias},
              {"iterations", c.iterations},
              {"dual_objective", c.dual_objective},
              {"support_indices", std::move(idx)},
              {"coefficients", vector_to_json(c.coefficients)},
              {"support_vectors", matrix_to_json(c.support_vectors)}};
}

svm::SvmClassifier classifier_from_json(const Json& j) {
  svm::SvmClassifier c;
  c.kernel = kernel_from_json(j.at("kernel"));
  c.c = j.at("c").get<double>();
  c.kkt_tolerance = j.at("tolerance").get<double>();
  c.ridge = j.at("ridge").get<double>();
  c.bias = j.at("bias").get<double>();
  c.iterations = j.at("iterations").get<std::size_t>();
  c.dual_objective = j.at("dual_objective").get<double>();
  c.support_indices = j.at("support_indices").get<std::vector<Eigen::Index>>();
  c.coefficients = vector_from_json(j.at("coefficients"));
  c.support_vectors = matrix_from_json(j.at("support_vectors"));
  if (c.support_vectors.rows() != c.coefficients.size() ||
      c.support_indices.size() != static_cast<std::size_t>(c.coefficients.size())) {
    throw InvalidInput("support vector, coefficient and index counts disagree");
  }
  return c;
}

Json to_json(const PcaDetector& d) {
  const auto& m = d.model;
  return Json{{"alpha", d.alpha},
              {"threshold_dof", d.dof == pca::ThresholdDof::Retained ? "retained" : "full"},
              {"normalizer", normalizer_to_json(m.normalizer)},
              {"loadings", matrix_to_json(m.loadings)},
              {"singular_values", vector_to_json(m.singular_values)},
              {"retained", m.retained},
              {"n_train", m.n_train},
              {"variance_captured", m.variance_captured}};
}

PcaDetector pca_from_json(const Json& j) {
  PcaDetector d;
  d.alpha = j.at("alpha").get<double>();
  const auto dof = j.at("threshold_dof").get<std::string>();
  if (dof != "retained" && dof != "full") throw InvalidInput("threshold_dof must be 'retained' or 'full'");
  d.dof = dof == "retained" ? pca::ThresholdDof::Retained : pca::ThresholdDof::Full;
  d.model.normalizer = normalizer_from_json(j.at("normalizer"));
  d.model.loadings = matrix_from_json(j.at("loadings"));
  d.model.singular_values = vector_from_json(j.at("singular_values"));
  d.model.retained = j.at("retained").get<Eigen::Index>();
  d.model.n_train = j.at("n_train").get<Eigen::Index>();
  d.model.variance_captured = j.at("variance_captured").get<double>();
  if (d.model.loadings.cols() != d.model.retained || d.model.singular_values.size() != d.model.retained) {
    throw InvalidInput("PCA loadings disagree with the retained count");
  }
  return d;
}

Json to_json(const FdaDetector& d) {
  const auto& m = d.model;
  Json scatter = Json::array();
  for (const auto& s : m.projected_scatter) scatter.push_back(matrix_to_json(s));
  Json counts = Json::array();
  for (auto c : m.class_counts) counts.push_back(c);
  return Json{{"normalizer", normalizer_to_json(d.normalizer)},
              {"class_codes", codes_to_json(m.class_codes)},
              {"class_means", matrix_to_json(m.class_means)},
              {"total_mean", vector_to_json(m.total_mean)},
              {"fda_vectors", matrix_to_json(m.fda_vectors)},
              {"projected_scatter", std::move(scatter)},
              {"class_counts", std::move(counts)},
              {"priors", vector_to_json(m.priors)},
              {"eigenvalues", vector_to_json(m.eigenvalues)}};
}

FdaDetector fda_from_json(const Json& j) {
  FdaDetector d;
  d.normalizer = normalizer_from_json(j.at("normalizer"));
  auto& m = d.model;
  m.class_codes = codes_from_json(j.at("class_codes"));
  m.class_means = matrix_from_json(j.at("class_means"));
  m.total_mean = vector_from_json(j.at("total_mean"));
  m.fda_vectors = matrix_from_json(j.at("fda_vectors"));
  for (const auto& s : j.at("projected_scatter")) m.projected_scatter.push_back(matrix_from_json(s));
  m.class_counts = j.at("class_counts").get<std::vector<Eigen::Index>>();
  m.priors = vector_from_json(j.at("priors"));
  m.eigenvalues = vector_from_json(j.at("eigenvalues"));
  const auto q = m.class_codes.size();
  if (q < 2 || m.class_means.rows() != static_cast<Eigen::Index>(q) || m.projected_scatter.size() != q ||
      m.class_counts.size() != q || m.priors.size() != static_cast<Eigen::Index>(q)) {
    throw InvalidInput("FDA model arrays disagree with the class count");
  }
  return d;
}

Json to_json(const SvmDetector& d) {
  return Json{{"normalizer", normalizer_to_json(d.normalizer)}, {"classifier", classifier_to_json(d.classifier)}};
}

SvmDetector svm_from_json(const Json& j) {
  return SvmDetector{normalizer_from_json(j.at("normalizer")), classifier_from_json(j.at("classifier"))};
}

Json to_json(const MsvmDetector& d) {
  Json members = Json::array();
  for (const auto& m : d.model.classifiers) {
    members.push_back(Json{{"positive", to_int(m.positive)},
                           {"negative", to_int(m.negative)},
                           {"classifier", classifier_to_json(m.classifier)}});
  }
  return Json{{"normalizer", normalizer_to_json(d.normalizer)},
              {"strategy", d.model.strategy == svm::Strategy::OneVsOne ? "ovo" : "ova"},
              {"label_map", codes_to_json(d.model.label_map)},
              {"classifiers", std::move(members)}};
}

MsvmDetector msvm_from_json(const Json& j) {
  MsvmDetector d;
  d.normalizer = normalizer_from_json(j.at("normalizer"));
  const auto strategy = j.at("strategy").get<std::string>();
  if (strategy != "ovo" && strategy != "ova") throw InvalidInput("strategy must be 'ovo' or 'ova'");
  d.model.strategy = strategy == "ovo" ? svm::Strategy::OneVsOne : svm::Strategy::OneVsAll;
  d.model.label_map = codes_from_json(j.at("label_map"));
  for (const auto& m : j.at("classifiers")) {
    d.model.classifiers.push_back(svm::BinaryMember{class_from_int(m.at("positive").get<int>()),
                                                    class_from_int(m.at("negative").get<int>()),
                                                    classifier_from_json(m.at("classifier"))});
  }
  if (d.model.classifiers.empty()) throw InvalidInput("multiclass model has no classifiers");
  return d;
}

Eigen::Index input_width(const Detector& d) {
  return std::visit(
      [](const auto& v) -> Eigen::Index {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, PcaDetector>) {
          return v.model.normalizer.means.size();
        } else {
          return v.normalizer.means.size();
        }
      },
      d);
}

}  // namespace

std::string detector_name(const Detector& d) {
  static constexpr const char* kNames[] = {"pca", "fda", "svm", "msvm"};
  return kNames[d.index()];
}

Prediction predict(const Detector& d, const Eigen::Ref<const Vector>& row) {
  if (row.size() != input_width(d)) {
    throw InvalidInput("model expects " + std::to_string(input_width(d)) + " channels, data has " +
                       std::to_string(row.size()));
  }
  return std::visit(
      [&](const auto& v) -> Prediction {
        using T = std::decay_t<decltype(v)>;
        if constexpr (std::is_same_v<T, PcaDetector>) {
          const double t2 = pca::t2_statistic(v.model, row);
          const double limit = pca::t2_threshold(v.model, v.alpha, v.dof);
          return {t2 > limit ? 4 : 0, t2};
        } else if constexpr (std::is_same_v<T, FdaDetector>) {
          const Vector z = normalize_row(v.normalizer, row);
          const Vector g = fda::discriminant(v.model, z);
          Eigen::Index best = 0;
          for (Eigen::Index k = 1; k < g.size(); ++k) {
            if (g[k] > g[best]) best = k;
          }
          return {to_int(v.model.class_codes[static_cast<std::size_t>(best)]), g[best]};
        } else if constexpr (std::is_same_v<T, SvmDetector>) {
          const double f = svm::decision_value(v.classifier, normalize_row(v.normalizer, row));
          return {f >= 0.0 ? 4 : 0, f};
        } else {
          const auto vote = svm::vote_multiclass(v.model, normalize_row(v.normalizer, row));
          const auto it = std::find(v.model.label_map.begin(), v.model.label_map.end(), vote.label);
          return {to_int(vote.label), vote.vote_strength[static_cast<std::size_t>(it - v.model.label_map.begin())]};
        }
      },
      d);
}

std::optional<double> threshold(const Detector& d) {
  if (const auto* p = std::get_if<PcaDetector>(&d)) return pca::t2_threshold(p->model, p->alpha, p->dof);
  return std::nullopt;
}

std::string model_to_json(const ModelFile& file) {
  Json j;
  j["format_version"] = kFormatVersion;
  j["detector"] = detector_name(file.detector);
  j["channels"] = file.channel_names;
  j["config"] = file.config;
  j["seed"] = file.seed;
  j["model"] = std::visit([](const auto& v) { return to_json(v); }, file.detector);
  return j.dump(2) + "\n";
}

ModelFile model_from_json(const std::string& text, const std::string& source) {
  const Json j = detail::parse_json(text, source);
  return detail::with_schema_errors(source, [&] {
    try {
      if (j.at("format_version").get<int>() != kFormatVersion) {
        throw InvalidInput("unsupported model format version");
      }
      const auto name = j.at("detector").get<std::string>();
      const Json& body = j.at("model");
      ModelFile file{PcaDetector{}, {}, {}, 0};
      if (name == "pca") {
        file.detector = pca_from_json(body);
      } else if (name == "fda") {
        file.detector = fda_from_json(body);
      } else if (name == "svm") {
        file.detector = svm_from_json(body);
      } else if (name == "msvm") {
        file.detector = msvm_from_json(body);
      } else {
        throw InvalidInput("unknown detector '" + name + "'");
      }
      file.channel_names = j.at("channels").get<std::vector<std::string>>();
      file.config = j.at("config").get<std::map<std::string, std::string>>();
      file.seed = j.at("seed").get<std::uint64_t>();
      if (static_cast<Eigen::Index>(file.channel_names.size()) != input_width(file.detector)) {
        throw InvalidInput("channel list disagrees with the model width");
      }
      return file;
    } catch (const InvalidInput& e) {
      throw ParseError(source, 0, e.what());
    }
  });
}

void save_model(const ModelFile& file, const std::filesystem::path& path) {
  detail::write_text_file(path, model_to_json(file));
}

ModelFile load_model(const std::filesystem::path& path) {
  return model_from_json(detail::read_text_file(path), path.string());
}

}  // namespace hif::model
