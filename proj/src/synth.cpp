#include "fisheye/synth.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include "internal/cubic.hpp"
#include "internal/parallel.hpp"

namespace fisheye {

namespace {

constexpr double kMaxSynthFov = 175.0;

// Direct bicubic evaluation on the source grid; the support must lie inside.
float cubic_sample(const Frame& src, double x, double y) {
  const double fx = std::floor(x);
  const double fy = std::floor(y);
  const long ix = static_cast<long>(fx);
  const long iy = static_cast<long>(fy);
  if (ix - 1 < 0 || iy - 1 < 0 || ix + 2 >= src.width() || iy + 2 >= src.height())
    throw std::out_of_range("synthesis: source image does not cover a required sample");
  double wx[4], wy[4];
  detail::cubic_weights(x - fx, wx);
  detail::cubic_weights(y - fy, wy);
  double value = 0.0;
  for (int ky = 0; ky < 4; ++ky) {
    const float* row = src.data().data() +
                       static_cast<std::size_t>(iy - 1 + ky) * src.width() + (ix - 1);
    value += wy[ky] * (wx[0] * row[0] + wx[1] * row[1] + wx[2] * row[2] + wx[3] * row[3]);
  }
  return static_cast<float>(std::clamp(value, 0.0, 255.0));
}

void validate(const SynthSpec& spec) {
  spec.geom.validate();
  if (spec.geom.fov_deg > kMaxSynthFov)
    throw std::invalid_argument("synthesis: fov must be <= 175 degrees");
  if (spec.frame_count < 2)
    throw std::invalid_argument("synthesis: need at least two frames");
  if (spec.source.width() <= 0)
    throw std::invalid_argument("synthesis: missing source image");
}

}  // namespace

std::vector<Frame> generate(const SynthSpec& spec) {
  validate(spec);
  const auto& g = spec.geom;
  const double f = g.focal_px();
  const double r_max = model_r_max(spec.model, g);
  const int cx = g.width_px / 2;
  const int cy = g.height_px / 2;
  const double src_cx = spec.source.cx();
  const double src_cy = spec.source.cy();

  std::vector<Frame> frames;
  frames.reserve(static_cast<std::size_t>(spec.frame_count));
  for (int k = 0; k < spec.frame_count; ++k) {
    Frame out(g.width_px, g.height_px, 0.0f);
    const double shift_x = static_cast<double>(k) * spec.shift_dx;
    const double shift_y = static_cast<double>(k) * spec.shift_dy;
    detail::parallel_for(static_cast<std::size_t>(g.height_px), [&](std::size_t row) {
      const int y = static_cast<int>(row);
      const double v = y - cy;
      for (int x = 0; x < g.width_px; ++x) {
        const double u = x - cx;
        const double r = std::sqrt(u * u + v * v);
        if (r > r_max) continue;  // black background
        double scale = 0.0;
        if (r > 0.0) {
          const double theta = unproject_radius(spec.model, g, r);
          scale = f * std::tan(theta) / r;
        }
        out.at(x, y) = cubic_sample(spec.source, src_cx + scale * u + shift_x,
                                    src_cy + scale * v + shift_y);
      }
    });
    frames.push_back(std::move(out));
  }
  return frames;
}

void write_truth_sidecar(const SynthSpec& spec, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("synthesis: cannot write " + path);
  out << "pair_index,truth_dx,truth_dy\n";
  for (int k = 0; k + 1 < spec.frame_count; ++k)
    out << k << ',' << spec.shift_dx << ',' << spec.shift_dy << '\n';
  if (!out) throw std::runtime_error("synthesis: write failed for " + path);
}

Frame make_noise_source(int size, std::uint32_t seed) {
  if (size < 8) throw std::invalid_argument("noise source: size must be >= 8");
  struct Octave {
    int cell;
    double amplitude;
    std::vector<double> lattice;
    int lw, lh;
  };
  const int cells[4] = {64, 32, 16, 8};
  const double amps[4] = {104.0, 64.0, 40.0, 22.0};
  Octave octaves[4];
  for (int o = 0; o < 4; ++o) {
    auto& oct = octaves[o];
    oct.cell = cells[o];
    oct.amplitude = amps[o];
    oct.lw = size / oct.cell + 2;
    oct.lh = oct.lw;
    oct.lattice.resize(static_cast<std::size_t>(oct.lw) * oct.lh);
    std::mt19937 rng(seed + 0x9e3779b9u * static_cast<std::uint32_t>(o + 1));
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    for (auto& v : oct.lattice) v = dist(rng);
  }

  Frame out(size, size);
  detail::parallel_for(static_cast<std::size_t>(size), [&](std::size_t row) {
    const int y = static_cast<int>(row);
    for (int x = 0; x < size; ++x) {
      double value = 12.0;
      for (const auto& oct : octaves) {
        const int gx = x / oct.cell;
        const int gy = y / oct.cell;
        const double tx = static_cast<double>(x % oct.cell) / oct.cell;
        const double ty = static_cast<double>(y % oct.cell) / oct.cell;
        const double sx = tx * tx * (3.0 - 2.0 * tx);  // smoothstep
        const double sy = ty * ty * (3.0 - 2.0 * ty);
        const auto at = [&](int ix, int iy) {
          return oct.lattice[static_cast<std::size_t>(iy) * oct.lw + ix];
        };
        const double top = at(gx, gy) + sx * (at(gx + 1, gy) - at(gx, gy));
        const double bot = at(gx, gy + 1) + sx * (at(gx + 1, gy + 1) - at(gx, gy + 1));
        value += oct.amplitude * (top + sy * (bot - top));
      }
      out.at(x, y) = static_cast<float>(std::clamp(value, 0.0, 255.0));
    }
  });
  return out;
}

}  // namespace fisheye
