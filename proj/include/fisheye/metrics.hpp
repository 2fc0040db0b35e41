#pragma once

#include "fisheye/frame.hpp"

// Luminance PSNR and single-scale SSIM restricted to the circular fisheye
// region.

namespace fisheye {

struct MetricReport {
  double psnr_db = 0.0;  // +infinity when the frames agree over the mask
  double ssim = 0.0;
  long masked_pixels = 0;
  double mask_radius_px = 0.0;
};

// 10 log10(255^2 / MSE) over masked pixels; +infinity for identical content.
double psnr(const Frame& a, const Frame& b, const CircularMask& mask);

// Single-scale SSIM with an 8x8 uniform window, C1 = (0.01*255)^2 and
// C2 = (0.03*255)^2, averaged over windows lying fully inside the mask.
// Throws std::invalid_argument when no window fits.
double ssim(const Frame& a, const Frame& b, const CircularMask& mask);

MetricReport evaluate(const Frame& a, const Frame& b, const CircularMask& mask);

}  // namespace fisheye
