#pragma once

#include <algorithm>
#include <cmath>

namespace advparam {

/// Clamps `value` into [center - radius, center + radius] such that the
/// floating-point difference |result - center| is also <= radius. A plain
/// clamp to center + radius can overshoot by one ulp after the subtraction.
inline double clamp_within(double value, double center, double radius) {
  double r = std::clamp(value, center - radius, center + radius);
  while (r - center > radius) r = std::nextafter(r, center);
  while (center - r > radius) r = std::nextafter(r, center);
  return r;
}

}  // namespace advparam
