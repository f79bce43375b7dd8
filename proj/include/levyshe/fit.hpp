#pragma once

#include <span>

namespace levyshe {

struct SlopeFit
{
  double slope;
  double intercept;
  double r2;
};

/// Least squares of log y on log x. Needs >= 3 points, distinct positive xs
/// and positive ys; otherwise throws ConfigError.
SlopeFit fit_slope(std::span<const double> xs, std::span<const double> ys);

} // namespace levyshe
