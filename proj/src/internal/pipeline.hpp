#pragma once

#include <cmath>
#include <stdexcept>

#include "fisheye/geometry.hpp"

// The per-pixel coordinate pipeline shared by motion estimation, motion
// compensation and dense-field derivation. All three must walk bit-identical
// coordinates, so the math lives here and nowhere else.

namespace fisheye::detail {

struct WarpContext {
  const ProjectionModel* model;
  const CameraGeometry* geom;
  double focal;
  double r_max;
  double r180 = 0.0;  // valid iff has_r180
  bool has_r180 = false;
  ForwardReprojector fwd;

  WarpContext(const ProjectionModel& m, const CameraGeometry& g)
      : model(&m), geom(&g), focal(g.focal_px()), r_max(model_r_max(m, g)), fwd(m, g) {
    if (m.kind == ProjectionKind::calibrated &&
        m.table->theta_max_rad() < kPi / 2.0 - 1e-9) {
      // Candidate addition pushes perspective radii arbitrarily far out, so
      // forward lookups reach any angle below 90 degrees.
      throw std::invalid_argument(
          "calibrated estimation requires a table covering up to 90 degrees");
    }
    if (const auto r = model_r180(m, g)) {
      r180 = *r;
      has_r180 = true;
    }
  }
};

struct PerspPixel {
  double px = 0.0;  // perspective Cartesian, sign of the radius folded in
  double py = 0.0;
  bool flipped = false;
  bool in_circle = false;
};

// Perspective-domain position of one fisheye pixel given in centered
// Cartesian coordinates. Pixels beyond the image circle are only classified,
// never transformed.
inline PerspPixel persp_pixel(const WarpContext& ctx, double xf, double yf) {
  const double r2 = xf * xf + yf * yf;
  if (r2 == 0.0) return {0.0, 0.0, false, true};
  const double r = std::sqrt(r2);
  if (r > ctx.r_max) return {0.0, 0.0, false, false};
  const double theta = unproject_radius(*ctx.model, *ctx.geom, r);
  double rp;
  bool flipped;
  if (std::abs(theta - kPi / 2.0) < kTangentPoleBand) {
    rp = -ctx.focal / kTangentPoleBand;  // finite pole surrogate
    flipped = true;
  } else {
    rp = ctx.focal * std::tan(theta);
    flipped = theta > kPi / 2.0;
  }
  const double s = rp / r;
  return {s * xf, s * yf, flipped, true};
}

// Fisheye-domain position (centered coordinates) reached from pixel `p` under
// motion vector candidate (dx, dy), including the ultra wide-angle steps for
// flipped pixels: candidate inversion, the -pi phase shift after candidate
// addition, and the radial mirror across the critical circle. Requires
// p.in_circle, and ctx.has_r180 whenever p.flipped.
inline void warp_candidate(const WarpContext& ctx, const PerspPixel& p, double dx,
                           double dy, double& out_x, double& out_y) {
  const double ddx = p.flipped ? -dx : dx;
  const double ddy = p.flipped ? -dy : dy;
  const double xm = p.px + ddx;
  const double ym = p.py + ddy;
  const double r2 = xm * xm + ym * ym;
  if (r2 == 0.0) {
    // Displaced point at the perspective origin: phi = 0 by convention.
    if (!p.flipped) {
      out_x = 0.0;
      out_y = 0.0;
    } else {
      out_x = -2.0 * ctx.r180;
      out_y = 0.0;
    }
    return;
  }
  const double r = std::sqrt(r2);
  double rf = ctx.fwd(r);
  double scale;
  if (p.flipped) {
    rf += 2.0 * (ctx.r180 - rf);
    // cos(phi - pi) = -cos(phi): the phase shift is a sign flip.
    scale = -rf / r;
  } else {
    scale = rf / r;
  }
  out_x = scale * xm;
  out_y = scale * ym;
}

}  // namespace fisheye::detail
