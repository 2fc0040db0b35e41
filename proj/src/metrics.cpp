#include "fisheye/metrics.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace fisheye {

namespace {

void check_dims(const Frame& a, const Frame& b, const CircularMask& mask) {
  if (!a.same_size(b) || a.width() != mask.width() || a.height() != mask.height())
    throw std::invalid_argument("metrics: frame and mask dimensions must agree");
}

}  // namespace

double psnr(const Frame& a, const Frame& b, const CircularMask& mask) {
  check_dims(a, b, mask);
  double sse = 0.0;
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      if (!mask.contains(x, y)) continue;
      const double d = static_cast<double>(a.at(x, y)) - b.at(x, y);
      sse += d * d;
    }
  }
  if (sse == 0.0) return std::numeric_limits<double>::infinity();
  const double mse = sse / static_cast<double>(mask.count());
  return 10.0 * std::log10(255.0 * 255.0 / mse);
}

double ssim(const Frame& a, const Frame& b, const CircularMask& mask) {
  check_dims(a, b, mask);
  constexpr int kWin = 8;
  constexpr double kC1 = (0.01 * 255.0) * (0.01 * 255.0);
  constexpr double kC2 = (0.03 * 255.0) * (0.03 * 255.0);
  const int w = a.width();
  const int h = a.height();
  if (w < kWin || h < kWin)
    throw std::invalid_argument("ssim: frame smaller than the 8x8 window");

  // Summed-area table of the mask for O(1) window coverage checks.
  std::vector<long> sat(static_cast<std::size_t>(w + 1) * (h + 1), 0);
  for (int y = 0; y < h; ++y) {
    long row_sum = 0;
    for (int x = 0; x < w; ++x) {
      row_sum += mask.contains(x, y) ? 1 : 0;
      sat[static_cast<std::size_t>(y + 1) * (w + 1) + (x + 1)] =
          sat[static_cast<std::size_t>(y) * (w + 1) + (x + 1)] + row_sum;
    }
  }
  const auto window_masked = [&](int x0, int y0) {
    const long total = sat[static_cast<std::size_t>(y0 + kWin) * (w + 1) + (x0 + kWin)] -
                       sat[static_cast<std::size_t>(y0) * (w + 1) + (x0 + kWin)] -
                       sat[static_cast<std::size_t>(y0 + kWin) * (w + 1) + x0] +
                       sat[static_cast<std::size_t>(y0) * (w + 1) + x0];
    return total == static_cast<long>(kWin) * kWin;
  };

  constexpr double kInvN = 1.0 / (kWin * kWin);
  double total = 0.0;
  long windows = 0;
  for (int y0 = 0; y0 + kWin <= h; ++y0) {
    for (int x0 = 0; x0 + kWin <= w; ++x0) {
      if (!window_masked(x0, y0)) continue;
      double sum_a = 0.0, sum_b = 0.0;
      for (int y = y0; y < y0 + kWin; ++y)
        for (int x = x0; x < x0 + kWin; ++x) {
          sum_a += a.at(x, y);
          sum_b += b.at(x, y);
        }
      const double mu_a = sum_a * kInvN;
      const double mu_b = sum_b * kInvN;
      double saa = 0.0, sbb = 0.0, sab = 0.0;
      for (int y = y0; y < y0 + kWin; ++y)
        for (int x = x0; x < x0 + kWin; ++x) {
          const double da = a.at(x, y) - mu_a;
          const double db = b.at(x, y) - mu_b;
          saa += da * da;
          sbb += db * db;
          sab += da * db;
        }
      saa *= kInvN;
      sbb *= kInvN;
      sab *= kInvN;
      const double num = (2.0 * mu_a * mu_b + kC1) * (2.0 * sab + kC2);
      const double den = (mu_a * mu_a + mu_b * mu_b + kC1) * (saa + sbb + kC2);
      total += num / den;
      ++windows;
    }
  }
  if (windows == 0)
    throw std::invalid_argument("ssim: mask admits no fully covered 8x8 window");
  return total / static_cast<double>(windows);
}

MetricReport evaluate(const Frame& a, const Frame& b, const CircularMask& mask) {
  MetricReport report;
  report.psnr_db = psnr(a, b, mask);
  report.ssim = ssim(a, b, mask);
  report.masked_pixels = mask.count();
  report.mask_radius_px = mask.radius();
  return report;
}

}  // namespace fisheye
