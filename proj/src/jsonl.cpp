#include "holisticbias/jsonl.hpp"

#include <cmath>
#include <cstdio>

#include "holisticbias/errors.hpp"

namespace hb {

void for_each_jsonl(std::istream& in, const std::string& source_name,
                    const std::function<void(const Json&, std::size_t)>& fn) {
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    Json record;
    try {
      record = Json::parse(line);
    } catch (const Json::parse_error& e) {
      throw SchemaError(source_name, line_no, std::string("malformed JSON: ") + e.what());
    }
    if (!record.is_object()) throw SchemaError(source_name, line_no, "record is not an object");
    fn(record, line_no);
  }
}

void for_each_jsonl(const std::filesystem::path& path,
                    const std::function<void(const Json&, std::size_t)>& fn) {
  auto in = open_input(path);
  for_each_jsonl(in, path.string(), fn);
}

Json read_json_file(const std::filesystem::path& path) {
  auto in = open_input(path);
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw SchemaError(path.string(), 0, std::string("malformed JSON: ") + e.what());
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open input file '" + path.string() + "'");
  return in;
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ArgumentError("cannot open output file '" + path.string() + "'");
  return out;
}

std::string require_string(const Json& j, std::string_view key, const std::string& source,
                           std::size_t line) {
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(source, line, "missing field '" + std::string(key) + "'");
  if (!it->is_string())
    throw SchemaError(source, line, "field '" + std::string(key) + "' must be a string");
  return it->get<std::string>();
}

double require_number(const Json& j, std::string_view key, const std::string& source,
                      std::size_t line) {
  auto it = j.find(key);
  if (it == j.end()) throw SchemaError(source, line, "missing field '" + std::string(key) + "'");
  if (!it->is_number())
    throw SchemaError(source, line, "field '" + std::string(key) + "' must be a number");
  return it->get<double>();
}

std::string optional_string(const Json& j, std::string_view key, const std::string& source,
                            std::size_t line, std::string fallback) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return fallback;
  if (!it->is_string())
    throw SchemaError(source, line, "field '" + std::string(key) + "' must be a string");
  return it->get<std::string>();
}

void check_schema_version(const Json& j, const std::string& source, std::size_t line) {
  auto it = j.find("schema_version");
  if (it == j.end()) return;
  if (!it->is_number_integer() || it->get<int>() != kSchemaVersion)
    throw SchemaError(source, line, "unsupported schema_version (expected 1)");
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n\r") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

std::string format_real(double v, int precision) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", precision, v);
  std::string s(buf);
  if (s == "-0" || s.find_first_not_of("-0.") == std::string::npos) {
    // collapse negative zero
    if (s[0] == '-') s.erase(0, 1);
  }
  return s;
}

}  // namespace hb
