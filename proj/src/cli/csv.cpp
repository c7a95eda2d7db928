#include "dualgp/cli/csv.hpp"

#include <cstdio>
#include <stdexcept>

#include "dualgp/cli/config.hpp"

namespace dualgp::cli {

std::string format_sig9(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

CsvWriter::CsvWriter(const std::filesystem::path& path,
                     const std::vector<std::string>& header)
    : out_(path), path_(path), width_(header.size()) {
  if (!out_) throw IoError("cannot open for writing: " + path.string());
  if (header.empty()) throw std::invalid_argument("CSV header must be non-empty");
  row(header);
}

void CsvWriter::row(std::initializer_list<double> values) {
  std::vector<std::string> fields;
  fields.reserve(values.size());
  for (double v : values) fields.push_back(format_sig9(v));
  row(fields);
}

void CsvWriter::row(const std::vector<std::string>& fields) {
  if (fields.size() != width_) {
    throw std::invalid_argument("CSV row width does not match header: " +
                                path_.string());
  }
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (i > 0) out_ << ',';
    out_ << fields[i];
  }
  out_ << '\n';
}

void CsvWriter::close() {
  if (closed_) return;
  out_.flush();
  if (!out_) throw IoError("error writing: " + path_.string());
  out_.close();
  closed_ = true;
}

}  // namespace dualgp::cli
