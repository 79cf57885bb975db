#pragma once

#include <filesystem>
#include <string>

#include "hif/dataio.hpp"
#include "hif/error.hpp"
#include "json.hpp"

namespace hif::detail {

using Json = nlohmann::json;

/// Parses text; syntax errors become ParseError with the offending line.
Json parse_json(const std::string& text, const std::string& source);

std::string read_text_file(const std::filesystem::path& path);
/// Writes atomically enough for our purposes: on failure the partial file is removed.
void write_text_file(const std::filesystem::path& path, const std::string& text);

Json matrix_to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);
Json vector_to_json(const Vector& v);
Vector vector_from_json(const Json& j);

/// Wraps nlohmann type/lookup errors raised by `fn` into ParseError(source, 0, ...).
template <typename Fn>
auto with_schema_errors(const std::string& source, Fn&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(source, 0, std::string("unexpected structure: ") + e.what());
  }
}

}  // namespace hif::detail
