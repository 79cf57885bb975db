#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <charconv>
#include <sstream>

#include "hif/cli.hpp"
#include "hif/error.hpp"
#include "json_util.hpp"

namespace hif::cli {
namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

[[noreturn]] void bad_value(const std::string& key, const std::string& value, const char* expected) {
  throw ConfigError("config key '" + key + "': expected " + expected + ", got '" + value + "'");
}

double parse_real(const std::string& key, const std::string& raw) {
  const std::string v = trim(raw);
  double out = 0.0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || end != v.data() + v.size()) bad_value(key, raw, "a number");
  return out;
}

}  // namespace

RunConfig RunConfig::load(const std::filesystem::path& path) {
  return parse(detail::read_text_file(path), path.string());
}

RunConfig RunConfig::parse(const std::string& text, const std::string& source) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::ini_parser::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ParseError(source, e.line(), e.message());
  }
  RunConfig cfg;
  for (const auto& [key, child] : tree) {
    if (!child.empty()) throw ConfigError(source + ": sections are not supported ([" + key + "])");
    cfg.values_[key] = child.data();
  }
  return cfg;
}

RunConfig RunConfig::with_defaults(const std::map<std::string, std::string>& defaults) const {
  RunConfig merged(defaults);
  for (const auto& [key, value] : values_) {
    if (!defaults.count(key)) throw ConfigError("unknown config key '" + key + "'");
    merged.values_[key] = value;
  }
  return merged;
}

std::string RunConfig::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing config key '" + key + "'");
  return trim(it->second);
}

double RunConfig::real(const std::string& key) const { return parse_real(key, text(key)); }

std::int64_t RunConfig::integer(const std::string& key) const {
  const std::string v = text(key);
  std::int64_t out = 0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || end != v.data() + v.size()) bad_value(key, v, "an integer");
  return out;
}

std::size_t RunConfig::count(const std::string& key) const {
  const auto v = integer(key);
  if (v < 0) bad_value(key, text(key), "a non-negative integer");
  return static_cast<std::size_t>(v);
}

std::uint64_t RunConfig::u64(const std::string& key) const {
  const std::string v = text(key);
  std::uint64_t out = 0;
  const auto [end, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc() || end != v.data() + v.size()) bad_value(key, v, "an unsigned 64-bit integer");
  return out;
}

bool RunConfig::boolean(const std::string& key) const {
  const std::string v = text(key);
  if (v == "true" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "no" || v == "0") return false;
  bad_value(key, v, "true or false");
}

std::vector<double> RunConfig::real_list(const std::string& key) const {
  std::vector<double> out;
  std::stringstream ss(text(key));
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_real(key, item));
  if (out.empty()) bad_value(key, text(key), "a comma-separated list of numbers");
  return out;
}

}  // namespace hif::cli
