#pragma once

#include <fstream>
#include <map>
#include <string>
#include <vector>

namespace pu {

std::string format_double(double v);  // %.12g

// CSV output: '#'-prefixed metadata lines, one header row, data rows.
class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path);

  void metadata(const std::map<std::string, std::string>& kv);
  void comment(const std::string& line);
  void header(const std::vector<std::string>& cols);
  void row(const std::vector<double>& values);
  void raw_row(const std::string& line);

 private:
  std::ofstream out_;
  std::string path_;
};

}  // namespace pu
