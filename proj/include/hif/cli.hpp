#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace hif::cli {

/// Flat key = value run configuration. Lines starting with ';' or '#' are
/// comments; sections are rejected. Every command has a fixed key set with
/// defaults, so the effective configuration is always complete and can be
/// echoed into output files.
class RunConfig {
 public:
  RunConfig() = default;
  explicit RunConfig(std::map<std::string, std::string> values) : values_(std::move(values)) {}

  /// Throws IoError if unreadable, ParseError on malformed lines.
  static RunConfig load(const std::filesystem::path& path);
  static RunConfig parse(const std::string& text, const std::string& source = "<config>");

  /// Overlays *this on `defaults`; keys missing from `defaults` raise ConfigError.
  RunConfig with_defaults(const std::map<std::string, std::string>& defaults) const;

  void set(const std::string& key, std::string value) { values_[key] = std::move(value); }
  bool has(const std::string& key) const { return values_.count(key) > 0; }

  std::string text(const std::string& key) const;
  double real(const std::string& key) const;
  std::int64_t integer(const std::string& key) const;
  std::size_t count(const std::string& key) const;  // non-negative integer
  std::uint64_t u64(const std::string& key) const;
  bool boolean(const std::string& key) const;
  std::vector<double> real_list(const std::string& key) const;  // comma separated

  const std::map<std::string, std::string>& values() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// Defaults of each subcommand ("simulate", "train", "detect", "evaluate").
const std::map<std::string, std::string>& command_defaults(const std::string& command);

struct Invocation {
  std::string command;
  std::optional<std::filesystem::path> config;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
};

/// Effective configuration: defaults, then the file, then --seed.
RunConfig effective_config(const Invocation& inv);

// Each command throws hif::Error subclasses; run() maps them to exit codes.
void cmd_simulate(const RunConfig& config, const std::filesystem::path& out, std::ostream& log);
void cmd_train(const RunConfig& config, const std::filesystem::path& out, std::ostream& log);
void cmd_detect(const RunConfig& config, const std::filesystem::path& out, std::ostream& log);
void cmd_evaluate(const RunConfig& config, const std::optional<std::filesystem::path>& out, std::ostream& log);

/// Parses argv-style arguments (without the program name) and runs the
/// command. Returns 0 on success, 1 for domain errors, 2 for I/O,
/// configuration and usage errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hif::cli
