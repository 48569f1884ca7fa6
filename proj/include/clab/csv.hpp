#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace clab {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One emitted measurement or reference value.
struct ResultRow {
  std::string experiment;
  double coordinate = 0.0;  // T, gamma, or lambda depending on the experiment
  std::string method;
  double value = 0.0;
  double std_err = 0.0;
  long replicates = 0;

  bool operator==(const ResultRow&) const = default;
};

// Stable output order: (experiment, coordinate, method).
void sort_rows(std::vector<ResultRow>& rows);

// Shortest decimal form that round-trips the exact double.
std::string format_double(double x);

// Writes `experiment,coordinate,method,value,stderr,replicates` with LF line
// endings, '.' decimal separator and round-trip float precision. Rows are
// sorted first, so equal inputs give byte-identical files. Throws
// std::invalid_argument on empty rows and IoError on an unwritable path.
void emit_csv(std::vector<ResultRow> rows, const std::string& path);

// Inverse of emit_csv (used by tests and the chart writer).
std::vector<ResultRow> parse_csv(const std::string& path);

}  // namespace clab
