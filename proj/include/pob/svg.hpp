#pragma once

#include <string>
#include <vector>

namespace pob {

struct SvgSeries {
  std::string label;
  std::vector<double> mean;       // indexed by round - 1
  std::vector<double> std_error;  // same length as mean
};

/// Renders cumulative-regret curves with shaded standard-error bands as a
/// self-contained SVG document. Output bytes depend only on the input.
std::string render_regret_svg(const std::vector<SvgSeries>& series);

}  // namespace pob
