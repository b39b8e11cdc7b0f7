#include "ranslice/csvio.hpp"

#include <cmath>
#include <cstdio>

namespace ranslice {

CsvWriter::CsvWriter(const std::string& path, const std::vector<std::string>& header)
    : out_(path, std::ios::trunc), columns_(header.size()), path_(path) {
  if (!out_) throw CsvError("cannot open CSV for writing: " + path);
  if (header.empty()) throw CsvError("CSV header must not be empty");
  row(header);
}

CsvWriter::~CsvWriter() = default;

void CsvWriter::row(const std::vector<std::string>& cells) {
  if (cells.size() != columns_) throw CsvError("CSV row width mismatch in " + path_);
  for (size_t i = 0; i < cells.size(); ++i) {
    if (i > 0) out_ << ',';
    out_ << cells[i];
  }
  out_ << '\n';
  if (!out_) throw CsvError("failed to write CSV: " + path_);
}

std::string CsvWriter::num(double v) {
  if (!std::isfinite(v)) throw CsvError("refusing to write a non-finite number");
  if (v == 0.0) return "0";  // collapse negative zero
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string CsvWriter::num(std::int64_t v) { return std::to_string(v); }

}  // namespace ranslice
