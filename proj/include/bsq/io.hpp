#pragma once

#include "json.hpp"

#include <string>

namespace bsq {

/// Parses JSON text; syntax errors become InputError with the source name,
/// line and column ("coeffs.json:3:14: ...").
nlohmann::json parse_json_text(const std::string& text, const std::string& source);

nlohmann::json read_json_file(const std::string& path);
std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

/// 17 significant digits, scientific notation.
std::string format_csv_number(double x);

}  // namespace bsq
