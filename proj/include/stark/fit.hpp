#pragma once

#include <vector>

namespace stark {

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
};

/// Least squares y = slope x + intercept. Throws std::invalid_argument for
/// fewer than two points or all x equal.
LineFit fit_line(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace stark
