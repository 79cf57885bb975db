#include "hif/eval.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "hif/dataio.hpp"
#include "hif/error.hpp"
#include "json_util.hpp"

namespace hif::eval {
namespace {

using detail::Json;

void check_lengths(std::span<const int> predicted, std::span<const int> actual) {
  if (predicted.size() != actual.size()) {
    throw InvalidInput("predicted and actual label sequences differ in length (" + std::to_string(predicted.size()) +
                       " vs " + std::to_string(actual.size()) + ")");
  }
}

std::string percent(double ratio) {
  std::ostringstream ss;
  ss.setf(std::ios::fixed);
  ss.precision(2);
  ss << 100.0 * ratio << "%";
  return ss.str();
}

template <typename Fn>
std::optional<double> defined_or_empty(Fn&& fn) {
  try {
    return fn();
  } catch (const UndefinedMetric&) {
    return std::nullopt;
  }
}

Json optional_real(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

std::optional<double> read_optional_real(const Json& j, const char* key) {
  const auto& v = j.at(key);
  if (v.is_null()) return std::nullopt;
  return v.get<double>();
}

constexpr std::array<PublishedRow, 5> kPublished{{
    {"Wavelet", 68.5, 72.0},
    {"Time-frequency", 81.5, 98.3},
    {"Morphological gradient", 96.3, 98.3},
    {"Mathematical morphology", 100.0, 100.0},
    {"M-SVM", 100.0, 100.0},
}};

}  // namespace

std::size_t Confusion::total() const {
  std::size_t t = 0;
  for (const auto& row : counts) {
    for (auto c : row) t += c;
  }
  return t;
}

Confusion confusion(std::span<const int> predicted, std::span<const int> actual) {
  check_lengths(predicted, actual);
  std::vector<int> labels(predicted.begin(), predicted.end());
  labels.insert(labels.end(), actual.begin(), actual.end());
  std::sort(labels.begin(), labels.end());
  labels.erase(std::unique(labels.begin(), labels.end()), labels.end());
  return confusion(predicted, actual, std::move(labels));
}

Confusion confusion(std::span<const int> predicted, std::span<const int> actual, std::vector<int> labels) {
  check_lengths(predicted, actual);
  std::sort(labels.begin(), labels.end());
  if (std::adjacent_find(labels.begin(), labels.end()) != labels.end()) {
    throw InvalidInput("confusion label set contains duplicates");
  }
  const auto index = [&](int label) {
    const auto it = std::lower_bound(labels.begin(), labels.end(), label);
    if (it == labels.end() || *it != label) {
      throw InvalidInput("label " + std::to_string(label) + " is not in the confusion label set");
    }
    return static_cast<std::size_t>(it - labels.begin());
  };
  Confusion out;
  out.counts.assign(labels.size(), std::vector<std::size_t>(labels.size(), 0));
  for (std::size_t t = 0; t < actual.size(); ++t) out.counts[index(actual[t])][index(predicted[t])] += 1;
  out.labels = std::move(labels);
  return out;
}

double dependability(std::span<const int> predicted, std::span<const int> actual) {
  check_lengths(predicted, actual);
  std::size_t faults = 0;
  std::size_t flagged = 0;
  for (std::size_t t = 0; t < actual.size(); ++t) {
    if (!is_fault(actual[t])) continue;
    ++faults;
    if (is_fault(predicted[t])) ++flagged;
  }
  if (faults == 0) throw UndefinedMetric("dependability is undefined without actual fault samples");
  return static_cast<double>(flagged) / static_cast<double>(faults);
}

double security(std::span<const int> predicted, std::span<const int> actual) {
  check_lengths(predicted, actual);
  std::size_t normals = 0;
  std::size_t kept = 0;
  for (std::size_t t = 0; t < actual.size(); ++t) {
    if (is_fault(actual[t])) continue;
    ++normals;
    if (!is_fault(predicted[t])) ++kept;
  }
  if (normals == 0) throw UndefinedMetric("security is undefined without actual normal samples");
  return static_cast<double>(kept) / static_cast<double>(normals);
}

double location_accuracy(std::span<const int> predicted, std::span<const int> actual) {
  check_lengths(predicted, actual);
  std::size_t faults = 0;
  std::size_t exact = 0;
  for (std::size_t t = 0; t < actual.size(); ++t) {
    if (!is_fault(actual[t])) continue;
    ++faults;
    if (predicted[t] == actual[t]) ++exact;
  }
  if (faults == 0) throw UndefinedMetric("location accuracy is undefined without actual fault samples");
  return static_cast<double>(exact) / static_cast<double>(faults);
}

DetectionReport build_report(std::string detector, std::vector<SampleRecord> per_sample,
                             std::optional<double> threshold, std::map<std::string, std::string> config_echo,
                             std::uint64_t seed) {
  std::vector<int> actual;
  std::vector<int> predicted;
  for (const auto& s : per_sample) {
    if (s.actual < 0 || s.actual > 3) throw InvalidInput("actual label must be a class code 0..3");
    if (s.predicted < 0 || s.predicted > kUnlocatedFault) throw InvalidInput("predicted label must lie in 0..4");
    if (!std::isfinite(s.statistic)) throw InvalidInput("per-sample statistic is not finite");
    actual.push_back(s.actual);
    predicted.push_back(s.predicted);
  }
  if (threshold && !std::isfinite(*threshold)) throw InvalidInput("threshold is not finite");

  DetectionReport r;
  r.detector = std::move(detector);
  r.threshold = threshold;
  r.confusion = confusion(predicted, actual);
  r.security = defined_or_empty([&] { return security(predicted, actual); });
  r.dependability = defined_or_empty([&] { return dependability(predicted, actual); });
  r.location_accuracy = defined_or_empty([&] { return location_accuracy(predicted, actual); });
  r.per_sample = std::move(per_sample);
  r.config_echo = std::move(config_echo);
  r.seed = seed;
  return r;
}

std::string report_to_json(const DetectionReport& report) {
  Json samples = Json::array();
  for (const auto& s : report.per_sample) samples.push_back(Json::array({s.actual, s.predicted, s.statistic}));
  Json j;
  j["detector"] = report.detector;
  j["seed"] = report.seed;
  j["threshold"] = optional_real(report.threshold);
  j["security"] = optional_real(report.security);
  j["dependability"] = optional_real(report.dependability);
  j["location_accuracy"] = optional_real(report.location_accuracy);
  j["confusion"] = Json{{"labels", report.confusion.labels}, {"counts", report.confusion.counts}};
  j["config"] = report.config_echo;
  j["samples"] = std::move(samples);
  return j.dump(2) + "\n";
}

DetectionReport report_from_json(const std::string& text, const std::string& source) {
  const Json j = detail::parse_json(text, source);
  return detail::with_schema_errors(source, [&] {
    DetectionReport r;
    r.detector = j.at("detector").get<std::string>();
    r.seed = j.at("seed").get<std::uint64_t>();
    r.threshold = read_optional_real(j, "threshold");
    r.security = read_optional_real(j, "security");
    r.dependability = read_optional_real(j, "dependability");
    r.location_accuracy = read_optional_real(j, "location_accuracy");
    r.confusion.labels = j.at("confusion").at("labels").get<std::vector<int>>();
    r.confusion.counts = j.at("confusion").at("counts").get<std::vector<std::vector<std::size_t>>>();
    r.config_echo = j.at("config").get<std::map<std::string, std::string>>();
    for (const auto& s : j.at("samples")) {
      r.per_sample.push_back({s.at(0).get<int>(), s.at(1).get<int>(), s.at(2).get<double>()});
    }
    return r;
  });
}

void write_report(const DetectionReport& report, const std::filesystem::path& path) {
  detail::write_text_file(path, report_to_json(report));
}

DetectionReport read_report(const std::filesystem::path& path) {
  return report_from_json(detail::read_text_file(path), path.string());
}

std::string per_sample_csv(const DetectionReport& report) {
  std::string out = "index,actual,predicted,statistic\n";
  for (std::size_t i = 0; i < report.per_sample.size(); ++i) {
    const auto& s = report.per_sample[i];
    out += std::to_string(i) + "," + std::to_string(s.actual) + "," + std::to_string(s.predicted) + "," +
           format_real(s.statistic) + "\n";
  }
  return out;
}

std::string statistic_plot_data(const DetectionReport& report) {
  std::string out = "# index statistic\n";
  for (std::size_t i = 0; i < report.per_sample.size(); ++i) {
    out += std::to_string(i + 1) + " " + format_real(report.per_sample[i].statistic) + "\n";
  }
  return out;
}

std::string threshold_plot_data(const DetectionReport& report) {
  if (!report.threshold) throw InvalidInput("report has no threshold");
  const std::string t = format_real(*report.threshold);
  const std::size_t last = std::max<std::size_t>(report.per_sample.size(), 1);
  return "# index threshold\n1 " + t + "\n" + std::to_string(last) + " " + t + "\n";
}

std::string summary_text(const DetectionReport& report) {
  std::ostringstream ss;
  const auto show = [](const std::optional<double>& v) { return v ? percent(*v) : std::string("undefined"); };
  ss << "detector:          " << report.detector << "\n";
  ss << "samples:           " << report.per_sample.size() << "\n";
  ss << "seed:              " << report.seed << "\n";
  if (report.threshold) ss << "threshold:         " << format_real(*report.threshold) << "\n";
  ss << "security:          " << show(report.security) << "\n";
  ss << "dependability:     " << show(report.dependability) << "\n";
  ss << "location accuracy: " << show(report.location_accuracy) << "\n";
  ss << "confusion (rows actual, columns predicted):\n      ";
  for (int l : report.confusion.labels) ss << " " << std::string(5 - std::min<std::size_t>(5, std::to_string(l).size()), ' ') << l;
  ss << "\n";
  for (std::size_t i = 0; i < report.confusion.labels.size(); ++i) {
    const std::string l = std::to_string(report.confusion.labels[i]);
    ss << "  " << std::string(4 - std::min<std::size_t>(4, l.size()), ' ') << l;
    for (auto c : report.confusion.counts[i]) {
      const std::string v = std::to_string(c);
      ss << " " << std::string(5 - std::min<std::size_t>(5, v.size()), ' ') << v;
    }
    ss << "\n";
  }
  return ss.str();
}

std::span<const PublishedRow> published_comparison() { return kPublished; }

}  // namespace hif::eval
