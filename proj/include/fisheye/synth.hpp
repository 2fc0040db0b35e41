#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fisheye/frame.hpp"
#include "fisheye/geometry.hpp"

// Ground-truth synthetic sequences: a large perspective source image warped
// into circular fisheye frames with a known perspective-domain translation
// between consecutive frames.

namespace fisheye {

struct SynthSpec {
  CameraGeometry geom;
  ProjectionModel model;
  Frame source;       // perspective source, larger than the output
  int shift_dx = 0;   // truth translation per frame step, perspective pixels
  int shift_dy = 0;
  int frame_count = 2;
};

// Maps every output pixel inside the fisheye circle to the perspective
// domain, adds the cumulative truth shift and samples the source by cubic
// interpolation; pixels outside the circle stay black. The synthesis FOV is
// limited to 175 degrees (a perspective source cannot supply content at the
// tangent pole). Throws std::out_of_range when a required source sample falls
// outside the source.
std::vector<Frame> generate(const SynthSpec& spec);

// Sidecar CSV "pair_index,truth_dx,truth_dy" with one row per consecutive
// frame pair.
void write_truth_sidecar(const SynthSpec& spec, const std::string& path);

// Deterministic multi-octave value noise, smooth enough for cubic resampling
// and textured at block scale.
Frame make_noise_source(int size, std::uint32_t seed);

}  // namespace fisheye
