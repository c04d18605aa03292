#pragma once

// CSV and JSON emission shared by every module. Floating-point values are
// printed with 17 significant digits so reruns are byte-identical.

#include <fstream>
#include <initializer_list>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace gclab {

inline constexpr int kSchemaVersion = 1;

using CsvCell = std::variant<double, long long, std::string>;

std::string format_double(double v);
// RFC 4180 quoting: fields containing comma, quote or newline are quoted.
std::string csv_escape(const std::string& field);

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<CsvCell>& cells);
  void row(std::initializer_list<double> values);

 private:
  std::ofstream os_;
  std::size_t columns_;
};

// Writes `content` to `path` through a temporary file and rename, so readers
// never see a partial document.
void write_file_atomic(const std::string& path, const std::string& content);
void write_json_atomic(const std::string& path, const nlohmann::json& doc);

}  // namespace gclab
