#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hif::eval {

/// Labels are integer class codes: 0 = normal, 1..3 = located faults.
/// Binary detectors (PCA T^2) predict kUnlocatedFault for "some fault".
inline constexpr int kNormal = 0;
inline constexpr int kUnlocatedFault = 4;

inline bool is_fault(int label) { return label != kNormal; }

/// counts[i][j] = samples with actual labels[i] predicted labels[j].
struct Confusion {
  std::vector<int> labels;
  std::vector<std::vector<std::size_t>> counts;

  std::size_t total() const;
  bool operator==(const Confusion&) const = default;
};

/// Label set is the sorted union of both sequences.
Confusion confusion(std::span<const int> predicted, std::span<const int> actual);
/// Explicit label set; a label outside it is an InvalidInput error.
Confusion confusion(std::span<const int> predicted, std::span<const int> actual, std::vector<int> labels);

/// Fraction of actual faults predicted as any fault. UndefinedMetric without faults.
double dependability(std::span<const int> predicted, std::span<const int> actual);
/// Fraction of actual normals predicted normal. UndefinedMetric without normals.
double security(std::span<const int> predicted, std::span<const int> actual);
/// Fraction of actual faults predicted with the exact fault class.
double location_accuracy(std::span<const int> predicted, std::span<const int> actual);

struct SampleRecord {
  int actual = 0;
  int predicted = 0;
  double statistic = 0.0;
  bool operator==(const SampleRecord&) const = default;
};

struct DetectionReport {
  std::string detector;
  std::vector<SampleRecord> per_sample;
  std::optional<double> threshold;
  Confusion confusion;
  // Empty when the denominator has no samples.
  std::optional<double> security;
  std::optional<double> dependability;
  std::optional<double> location_accuracy;
  std::map<std::string, std::string> config_echo;
  std::uint64_t seed = 0;

  bool operator==(const DetectionReport&) const = default;
};

DetectionReport build_report(std::string detector, std::vector<SampleRecord> per_sample,
                             std::optional<double> threshold, std::map<std::string, std::string> config_echo,
                             std::uint64_t seed);

std::string report_to_json(const DetectionReport& report);
DetectionReport report_from_json(const std::string& text, const std::string& source = "<memory>");

void write_report(const DetectionReport& report, const std::filesystem::path& path);
DetectionReport read_report(const std::filesystem::path& path);

/// index,actual,predicted,statistic
std::string per_sample_csv(const DetectionReport& report);
/// Two-column "index statistic" rows for plotting; the threshold file holds
/// the threshold at the first and last index.
std::string statistic_plot_data(const DetectionReport& report);
std::string threshold_plot_data(const DetectionReport& report);

/// Human-readable metrics summary.
std::string summary_text(const DetectionReport& report);

struct PublishedRow {
  const char* method;
  double security_percent;
  double dependability_percent;
};

/// Published comparison figures for earlier HIF detection methods.
std::span<const PublishedRow> published_comparison();

}  // namespace hif::eval
