#pragma once

namespace fisheye::detail {

// Catmull-Rom (cubic convolution, a = -0.5) weights at fractional offset
// t in [0, 1). Reproduces constants and, away from borders, linear ramps;
// t = 0 yields exactly (0, 1, 0, 0).
inline void cubic_weights(double t, double w[4]) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  w[0] = -0.5 * t3 + t2 - 0.5 * t;
  w[1] = 1.5 * t3 - 2.5 * t2 + 1.0;
  w[2] = -1.5 * t3 + 2.0 * t2 + 0.5 * t;
  w[3] = 0.5 * t3 - 0.5 * t2;
}

}  // namespace fisheye::detail
