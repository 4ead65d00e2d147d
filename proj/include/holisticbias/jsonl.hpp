#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <istream>
#include <string>
#include <string_view>

#include <json.hpp>

namespace hb {

using Json = nlohmann::json;

inline constexpr int kSchemaVersion = 1;

// Calls `fn(record, line_number)` for every non-blank line of a JSONL
// stream. Parse failures raise SchemaError carrying the 1-based line.
void for_each_jsonl(std::istream& in, const std::string& source_name,
                    const std::function<void(const Json&, std::size_t)>& fn);
void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const Json&, std::size_t)>& fn);

Json read_json_file(const std::filesystem::path& path);

std::ifstream open_input(const std::filesystem::path& path);
std::ofstream open_output(const std::filesystem::path& path);

// Field accessors that turn type mismatches into SchemaError.
std::string require_string(const Json& j, std::string_view key, const std::string& source,
                           std::size_t line);
double require_number(const Json& j, std::string_view key, const std::string& source,
                      std::size_t line);
std::string optional_string(const Json& j, std::string_view key, const std::string& source,
                            std::size_t line, std::string fallback = {});
void check_schema_version(const Json& j, const std::string& source, std::size_t line);

std::string csv_field(std::string_view s);

// Fixed-precision formatting so CSV reports are byte-stable across runs.
std::string format_real(double v, int precision = 6);

}  // namespace hb
