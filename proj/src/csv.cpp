#include "smoothcop/csv.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <system_error>

#include "smoothcop/errors.hpp"

namespace smoothcop {

namespace {

std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur.push_back(c);
    }
  }
  out.push_back(cur);
  for (auto& s : out) {
    auto b = s.find_first_not_of(" \t");
    auto e = s.find_last_not_of(" \t");
    s = b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
  }
  return out;
}

bool parse_double(const std::string& s, double& v) {
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  auto [ptr, ec] = std::from_chars(first, last, v);
  return ec == std::errc() && ptr == last && first != last;
}

}  // namespace

Sample read_sample_csv(std::istream& in) {
  std::vector<std::vector<double>> rows;
  std::string line;
  std::size_t lineno = 0;
  bool first = true;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto cells = split_line(line);
    std::vector<double> row(cells.size());
    bool numeric = true;
    for (std::size_t k = 0; k < cells.size(); ++k) numeric = numeric && parse_double(cells[k], row[k]);
    if (!numeric) {
      if (first) {
        first = false;
        continue;  // header
      }
      throw DataError("line " + std::to_string(lineno) + ": not a numeric row");
    }
    first = false;
    for (double v : row)
      if (!std::isfinite(v)) throw DataError("line " + std::to_string(lineno) + ": NaN or Inf");
    if (!rows.empty() && row.size() != rows.front().size())
      throw DataError("line " + std::to_string(lineno) + ": wrong number of columns");
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw DataError("no data rows");
  return Sample::from_rows(rows);
}

Sample read_sample_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  return read_sample_csv(in);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

CsvWriter::CsvWriter(std::vector<std::string> header) : columns_(header.size()) {
  for (std::size_t k = 0; k < header.size(); ++k) {
    if (k) out_ += ',';
    out_ += header[k];
  }
  out_ += '\n';
}

CsvWriter& CsvWriter::cell(const std::string& s) {
  if (filled_) out_ += ',';
  out_ += s;
  ++filled_;
  return *this;
}

CsvWriter& CsvWriter::cell(double v) { return cell(format_double(v)); }
CsvWriter& CsvWriter::cell(long long v) { return cell(std::to_string(v)); }

void CsvWriter::end_row() {
  if (filled_ != columns_) throw Error("csv row has the wrong number of cells");
  out_ += '\n';
  filled_ = 0;
}

void write_file_atomic(const std::filesystem::path& path, const std::string& content) {
  auto tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot rename onto " + path.string() + ": " + ec.message());
}

std::string sample_to_csv(const Sample& x) {
  std::vector<std::string> header;
  for (std::size_t j = 0; j < x.d(); ++j) header.push_back("u" + std::to_string(j + 1));
  CsvWriter w(header);
  for (std::size_t i = 0; i < x.n(); ++i) {
    for (std::size_t j = 0; j < x.d(); ++j) w.cell(x(i, j));
    w.end_row();
  }
  return w.str();
}

}  // namespace smoothcop
