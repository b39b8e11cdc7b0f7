// Deterministic CSV output: fixed number formatting so identical runs yield
// byte-identical files.
#pragma once

#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace ranslice {

struct CsvError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& header);
  ~CsvWriter();

  void row(const std::vector<std::string>& cells);

  // Shortest round-trip-safe decimal form, stable across runs.
  static std::string num(double v);
  static std::string num(std::int64_t v);

 private:
  std::ofstream out_;
  size_t columns_;
  std::string path_;
};

}  // namespace ranslice
