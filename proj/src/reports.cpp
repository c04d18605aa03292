#include "gclab/reports.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>

#include "gclab/errors.hpp"

namespace gclab {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string csv_escape(const std::string& field) {
  if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
  std::string out = "\"";
  for (char c : field) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : os_(path, std::ios::trunc), columns_(header.size()) {
  if (!os_) throw PreconditionError("CsvWriter: cannot open " + path);
  for (std::size_t i = 0; i < header.size(); ++i) {
    os_ << (i ? "," : "") << csv_escape(header[i]);
  }
  os_ << "\r\n";
}

void CsvWriter::row(const std::vector<CsvCell>& cells) {
  if (cells.size() != columns_) throw PreconditionError("CsvWriter: column count mismatch");
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) os_ << ',';
    std::visit(
        [&](const auto& v) {
          using T = std::decay_t<decltype(v)>;
          if constexpr (std::is_same_v<T, double>) {
            os_ << format_double(v);
          } else if constexpr (std::is_same_v<T, long long>) {
            os_ << v;
          } else {
            os_ << csv_escape(v);
          }
        },
        cells[i]);
  }
  os_ << "\r\n";
}

void CsvWriter::row(std::initializer_list<double> values) {
  std::vector<CsvCell> cells(values.begin(), values.end());
  row(cells);
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream os(tmp, std::ios::trunc | std::ios::binary);
    if (!os) throw PreconditionError("write_file_atomic: cannot open " + tmp);
    os << content;
    if (!os) throw NumericalError("write_file_atomic: write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

void write_json_atomic(const std::string& path, const nlohmann::json& doc) {
  write_file_atomic(path, doc.dump(2) + "\n");
}

}  // namespace gclab
