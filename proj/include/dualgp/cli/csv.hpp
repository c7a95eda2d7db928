#pragma once

#include <filesystem>
#include <fstream>
#include <initializer_list>
#include <string>
#include <vector>

namespace dualgp::cli {

// %.9g rendering used for every numeric CSV field.
std::string format_sig9(double v);

// Comma-separated writer with a mandatory header row. Numeric fields are
// written with nine significant digits; rows must match the header width.
class CsvWriter {
 public:
  CsvWriter(const std::filesystem::path& path, const std::vector<std::string>& header);

  void row(std::initializer_list<double> values);
  void row(const std::vector<std::string>& fields);

  // Flushes and throws IoError if anything failed along the way.
  void close();

 private:
  std::ofstream out_;
  std::filesystem::path path_;
  std::size_t width_;
  bool closed_ = false;
};

}  // namespace dualgp::cli
