#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

#include "hif/dataio.hpp"
#include "hif/error.hpp"

namespace hif {
namespace {

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
}

}  // namespace

std::string format_real(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 17);
  return std::string(buf, res.ptr);
}

void write_csv(const DataMatrix& x, const std::filesystem::path& path) {
  x.validate();
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  for (std::size_t j = 0; j < x.channel_names.size(); ++j) {
    if (j > 0) out << ',';
    out << x.channel_names[j];
  }
  if (x.labels) out << ",label";
  out << '\n';
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      if (j > 0) out << ',';
      out << format_real(x.observations(i, j));
    }
    if (x.labels) out << ',' << to_int((*x.labels)[static_cast<std::size_t>(i)]);
    out << '\n';
  }
  if (!out) throw IoError("write failed for " + path.string());
}

DataMatrix read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  const std::string p = path.string();
  std::string line;
  if (!std::getline(in, line)) throw ParseError(p, 1, "missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();

  DataMatrix x;
  bool labelled = false;
  for (auto field : split_fields(line)) {
    if (field.empty()) throw ParseError(p, 1, "empty column name");
    x.channel_names.emplace_back(field);
  }
  if (!x.channel_names.empty() && x.channel_names.back() == "label") {
    labelled = true;
    x.channel_names.pop_back();
  }
  const std::size_t m = x.channel_names.size();
  if (m == 0) throw ParseError(p, 1, "no data columns in header");
  const std::size_t expected = m + (labelled ? 1 : 0);

  std::vector<double> values;
  std::vector<ClassCode> labels;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto fields = split_fields(line);
    if (fields.size() != expected) {
      throw ParseError(p, line_no, "expected " + std::to_string(expected) + " fields, found " +
                                       std::to_string(fields.size()));
    }
    for (std::size_t j = 0; j < m; ++j) {
      double v = 0.0;
      const auto f = fields[j];
      const auto res = std::from_chars(f.data(), f.data() + f.size(), v);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size() || !std::isfinite(v)) {
        throw ParseError(p, line_no, "bad number '" + std::string(f) + "' in column " + x.channel_names[j]);
      }
      values.push_back(v);
    }
    if (labelled) {
      int code = -1;
      const auto f = fields[m];
      const auto res = std::from_chars(f.data(), f.data() + f.size(), code);
      if (res.ec != std::errc() || res.ptr != f.data() + f.size() || code < 0 || code >= kClassCount) {
        throw ParseError(p, line_no, "bad label '" + std::string(f) + "' (expected 0..3)");
      }
      labels.push_back(class_from_int(code));
    }
  }
  if (values.empty()) throw ParseError(p, line_no, "no data rows");
  const auto n = static_cast<Eigen::Index>(values.size() / m);
  x.observations = Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
      values.data(), n, static_cast<Eigen::Index>(m));
  if (labelled) x.labels = std::move(labels);
  return x;
}

}  // namespace hif
