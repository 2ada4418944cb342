#pragma once

#include <fstream>
#include <map>
#include <string>
#include <vector>

namespace msd {

/// Shortest deterministic decimal rendering that round-trips a double
/// (printf %.17g with trailing-zero trimming). Used for every numeric field
/// written to disk so reruns are byte-identical.
std::string format_double(double v);

/// Line-oriented CSV writer; opens the file eagerly and throws IoError on any
/// failure. Rows are flushed on destruction.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  void row(const std::vector<std::string>& fields);
  void row_values(const std::vector<double>& values);

 private:
  std::ofstream out_;
  std::size_t width_;
  std::string path_;
};

/// Writes `key=value` lines in insertion order.
void write_key_values(const std::string& path,
                      const std::vector<std::pair<std::string, std::string>>& items);

/// Splits one CSV line on commas (no quoting; the formats used here never
/// need it).
std::vector<std::string> split_csv_line(const std::string& line);

}  // namespace msd
