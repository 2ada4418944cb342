#include "msdlab/csv.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "msdlab/errors.hpp"

namespace msd {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  for (int precision = 1; precision <= 17; ++precision) {
    std::snprintf(buf, sizeof buf, "%.*g", precision, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path), width_(header.size()), path_(path) {
  if (!out_) throw IoError("cannot open for writing: " + path);
  row(header);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != width_) {
    throw ValidationError("csv row width mismatch in " + path_);
  }
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i) out_ << ',';
    out_ << fields[i];
  }
  out_ << '\n';
  if (!out_) throw IoError("write failed: " + path_);
}

void CsvWriter::row_values(const std::vector<double>& values) {
  std::vector<std::string> fields;
  fields.reserve(values.size());
  for (const double v : values) fields.push_back(format_double(v));
  row(fields);
}

void write_key_values(const std::string& path,
                      const std::vector<std::pair<std::string, std::string>>& items) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  for (const auto& [key, value] : items) out << key << '=' << value << '\n';
  if (!out) throw IoError("write failed: " + path);
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string current;
  for (const char c : line) {
    if (c == ',') {
      fields.push_back(current);
      current.clear();
    } else {
      current.push_back(c);
    }
  }
  if (!current.empty() && current.back() == '\r') current.pop_back();
  fields.push_back(current);
  return fields;
}

}  // namespace msd
