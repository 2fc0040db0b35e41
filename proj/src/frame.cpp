#include "fisheye/frame.hpp"

#include <algorithm>
#include <stdexcept>

#include "internal/cubic.hpp"
#include "internal/parallel.hpp"

namespace fisheye {

Frame::Frame(int width, int height, float fill)
    : width_(width), height_(height) {
  if (width <= 0 || height <= 0)
    throw std::invalid_argument("frame dimensions must be positive");
  luma_.assign(static_cast<std::size_t>(width) * height, fill);
}

namespace {

// One separable pass: resamples the y axis of `src` (w columns, h rows) onto
// (h - 1) * factor + 1 rows. Rows that land on integer positions are copied.
std::vector<float> upscale_axis(const std::vector<float>& src, long w, long h,
                                int factor, long out_rows) {
  std::vector<float> out(static_cast<std::size_t>(out_rows) * w);
  detail::parallel_for(static_cast<std::size_t>(out_rows), [&](std::size_t gy) {
    const long base = static_cast<long>(gy) / factor;
    const long rem = static_cast<long>(gy) % factor;
    float* dst = out.data() + gy * w;
    if (rem == 0) {
      const float* row = src.data() + base * w;
      std::copy(row, row + w, dst);
      return;
    }
    double wgt[4];
    detail::cubic_weights(static_cast<double>(rem) / factor, wgt);
    const float* rows[4];
    for (int k = 0; k < 4; ++k) {
      const long y = std::clamp(base - 1 + k, 0L, h - 1);  // edge replication
      rows[k] = src.data() + y * w;
    }
    for (long x = 0; x < w; ++x) {
      dst[x] = static_cast<float>(wgt[0] * rows[0][x] + wgt[1] * rows[1][x] +
                                  wgt[2] * rows[2][x] + wgt[3] * rows[3][x]);
    }
  });
  return out;
}

std::vector<float> transpose(const std::vector<float>& src, long w, long h) {
  std::vector<float> out(src.size());
  detail::parallel_for(static_cast<std::size_t>(h), [&](std::size_t y) {
    for (long x = 0; x < w; ++x)
      out[static_cast<std::size_t>(x) * h + y] = src[y * w + x];
  });
  return out;
}

}  // namespace

UpscaledFrame::UpscaledFrame(const Frame& src, int factor) : factor_(factor) {
  if (factor < 1) throw std::invalid_argument("upscale factor must be >= 1");
  const long w = src.width();
  const long h = src.height();
  gw_ = (w - 1) * factor + 1;
  gh_ = (h - 1) * factor + 1;

  if (factor == 1) {
    samples_ = src.data();
    return;
  }
  // Vertical pass, then transpose twice around the horizontal pass so both
  // passes stream along contiguous rows.
  std::vector<float> tall = upscale_axis(src.data(), w, h, factor, gh_);
  std::vector<float> tall_t = transpose(tall, w, gh_);
  tall.clear();
  tall.shrink_to_fit();
  std::vector<float> full_t = upscale_axis(tall_t, gh_, w, factor, gw_);
  tall_t.clear();
  tall_t.shrink_to_fit();
  samples_ = transpose(full_t, gh_, gw_);
  full_t.clear();
  full_t.shrink_to_fit();

  detail::parallel_for(static_cast<std::size_t>(gh_), [&](std::size_t gy) {
    float* row = samples_.data() + gy * gw_;
    for (long x = 0; x < gw_; ++x) row[x] = std::clamp(row[x], 0.0f, 255.0f);
  });
}

UpscaledFrame upscale(const Frame& frame, int factor) {
  return UpscaledFrame(frame, factor);
}

CircularMask::CircularMask(int width, int height, double radius_px)
    : width_(width), height_(height), radius_(radius_px) {
  if (width <= 0 || height <= 0)
    throw std::invalid_argument("mask dimensions must be positive");
  if (!(radius_px > 0.0)) throw std::invalid_argument("mask radius must be > 0");
  valid_.assign(static_cast<std::size_t>(width) * height, 0);
  const int cx = width / 2;
  const int cy = height / 2;
  const double r2 = radius_px * radius_px;
  for (int y = 0; y < height; ++y) {
    const double dy = y - cy;
    for (int x = 0; x < width; ++x) {
      const double dx = x - cx;
      if (dx * dx + dy * dy <= r2) {
        valid_[static_cast<std::size_t>(y) * width + x] = 1;
        ++count_;
      }
    }
  }
  if (count_ == 0) throw std::invalid_argument("mask covers no pixel");
}

CircularMask make_mask(const CameraGeometry& geom, const ProjectionModel& model,
                       std::optional<double> fov_deg_limit) {
  geom.validate();
  const double limit = fov_deg_limit.value_or(geom.fov_deg);
  if (!(limit > 0.0) || limit > geom.fov_deg)
    throw std::invalid_argument("mask fov limit must be in (0, fov]");
  const double radius = project_theta(model, geom, 0.5 * limit * kDegToRad);
  return CircularMask(geom.width_px, geom.height_px, radius);
}

}  // namespace fisheye
