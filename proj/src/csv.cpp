#include "clab/csv.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>
#include <tuple>

namespace clab {

void sort_rows(std::vector<ResultRow>& rows) {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const ResultRow& a, const ResultRow& b) {
                     return std::tie(a.experiment, a.coordinate, a.method) <
                            std::tie(b.experiment, b.coordinate, b.method);
                   });
}

std::string format_double(double x) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), x);
  return std::string(buf, res.ptr);
}

namespace {

double parse_double(const std::string& field, const std::string& path) {
  double out = 0.0;
  const char* begin = field.data();
  const char* end = begin + field.size();
  const auto res = std::from_chars(begin, end, out);
  if (res.ec != std::errc() || res.ptr != end) {
    throw IoError(path + ": malformed numeric field '" + field + "'");
  }
  return out;
}

}  // namespace

void emit_csv(std::vector<ResultRow> rows, const std::string& path) {
  if (rows.empty()) {
    throw std::invalid_argument("emit_csv: no rows");
  }
  sort_rows(rows);
  std::ofstream out(path, std::ios::binary);
  if (!out) {
    throw IoError("emit_csv: cannot write " + path);
  }
  out << "experiment,coordinate,method,value,stderr,replicates\n";
  for (const ResultRow& row : rows) {
    out << row.experiment << ',' << format_double(row.coordinate) << ','
        << row.method << ',' << format_double(row.value) << ','
        << format_double(row.std_err) << ',' << row.replicates << '\n';
  }
  out.flush();
  if (!out) {
    throw IoError("emit_csv: write failed for " + path);
  }
}

std::vector<ResultRow> parse_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("parse_csv: cannot read " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw IoError("parse_csv: empty file " + path);
  }
  std::vector<ResultRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    ResultRow row;
    std::getline(ss, row.experiment, ',');
    std::getline(ss, field, ',');
    row.coordinate = parse_double(field, path);
    std::getline(ss, row.method, ',');
    std::getline(ss, field, ',');
    row.value = parse_double(field, path);
    std::getline(ss, field, ',');
    row.std_err = parse_double(field, path);
    std::getline(ss, field, ',');
    row.replicates = std::stol(field);
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace clab
