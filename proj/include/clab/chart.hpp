#pragma once

#include <string>
#include <vector>

#include "clab/csv.hpp"

namespace clab {

struct ChartOptions {
  std::string title;
  std::string x_label = "coordinate";
  std::string y_label = "value";
  bool log_x = false;
  bool log_y = false;
};

// Renders one polyline per method into a self-contained static SVG file,
// with error whiskers where stderr > 0. Throws std::invalid_argument on
// empty rows and IoError on an unwritable path.
void emit_chart(const std::vector<ResultRow>& rows, const std::string& path,
                const ChartOptions& options = {});

}  // namespace clab
