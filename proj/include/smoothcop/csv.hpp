#pragma once

#include <filesystem>
#include <istream>
#include <string>
#include <vector>

#include "smoothcop/sample.hpp"

namespace smoothcop {

// Reads a numeric CSV (optional header line, '.' decimal point whatever the
// locale). NaN and Inf are rejected with DataError.
Sample read_sample_csv(std::istream& in);
Sample read_sample_csv(const std::filesystem::path& path);

// Shortest round-trip representation, locale independent.
std::string format_double(double v);

class CsvWriter {
 public:
  explicit CsvWriter(std::vector<std::string> header);
  CsvWriter& cell(const std::string& s);
  CsvWriter& cell(double v);
  CsvWriter& cell(long long v);
  void end_row();
  std::string str() const { return out_; }

 private:
  std::string out_;
  std::size_t columns_;
  std::size_t filled_ = 0;
};

// Write to a temporary sibling then rename over the target.
void write_file_atomic(const std::filesystem::path& path, const std::string& content);

std::string sample_to_csv(const Sample& x);

}  // namespace smoothcop
