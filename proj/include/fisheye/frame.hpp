#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fisheye/geometry.hpp"

namespace fisheye {

// Luminance raster with real-valued samples in [0, 255]. The Cartesian origin
// used by the projection code sits at the image center
// (floor(width/2), floor(height/2)); x indexes columns, y indexes rows.
class Frame {
 public:
  Frame() = default;
  Frame(int width, int height, float fill = 0.0f);

  int width() const { return width_; }
  int height() const { return height_; }
  int cx() const { return width_ / 2; }
  int cy() const { return height_ / 2; }

  float at(int x, int y) const {
    return luma_[static_cast<std::size_t>(y) * width_ + x];
  }
  float& at(int x, int y) {
    return luma_[static_cast<std::size_t>(y) * width_ + x];
  }

  // Zero padding outside the raster (black background).
  float sample_or_zero(long x, long y) const {
    if (x < 0 || y < 0 || x >= width_ || y >= height_) return 0.0f;
    return luma_[static_cast<std::size_t>(y) * width_ + x];
  }

  const std::vector<float>& data() const { return luma_; }
  std::vector<float>& data() { return luma_; }
  bool same_size(const Frame& o) const {
    return width_ == o.width_ && height_ == o.height_;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<float> luma_;
};

// Reads 8-bit grayscale or color PNG (color converted to luminance with
// ITU-R BT.601 weights) and binary PGM (P5). Bit depths above 8 are rejected.
Frame load_frame(const std::string& path);

// Writes 8-bit grayscale PNG or binary PGM depending on the file extension;
// samples are clamped and rounded half away from zero.
void save_frame(const Frame& frame, const std::string& path);

// Frame resampled to a 1/factor-pel grid by separable Catmull-Rom
// interpolation with edge replication, clamped to [0, 255]. Samples at
// integer positions equal the source bitwise.
class UpscaledFrame {
 public:
  UpscaledFrame() = default;
  UpscaledFrame(const Frame& src, int factor);

  int factor() const { return factor_; }
  long grid_width() const { return gw_; }
  long grid_height() const { return gh_; }

  float at_grid(long gx, long gy) const {
    if (gx < 0 || gy < 0 || gx >= gw_ || gy >= gh_) return 0.0f;
    return samples_[static_cast<std::size_t>(gy) * gw_ + gx];
  }

  // Quantizes the position to the 1/factor grid (round half away from zero)
  // and returns the stored sample; positions outside the source extent
  // return 0. Total and deterministic.
  float sample(double x, double y) const {
    return at_grid(std::llround(x * factor_), std::llround(y * factor_));
  }

 private:
  int factor_ = 0;
  long gw_ = 0;
  long gh_ = 0;
  std::vector<float> samples_;
};

UpscaledFrame upscale(const Frame& frame, int factor);

// Per-pixel validity disc around the image center.
class CircularMask {
 public:
  CircularMask(int width, int height, double radius_px);

  int width() const { return width_; }
  int height() const { return height_; }
  double radius() const { return radius_; }
  long count() const { return count_; }

  bool contains(int x, int y) const {
    return valid_[static_cast<std::size_t>(y) * width_ + x] != 0;
  }

 private:
  int width_ = 0;
  int height_ = 0;
  double radius_ = 0.0;
  long count_ = 0;
  std::vector<std::uint8_t> valid_;
};

// Validity disc of the projected radius at fov_deg_limit / 2 (the full
// geometry FOV when no limit is given).
CircularMask make_mask(const CameraGeometry& geom, const ProjectionModel& model,
                       std::optional<double> fov_deg_limit = std::nullopt);

}  // namespace fisheye
