#include "fisheye/fruc.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "internal/parallel.hpp"
#include "internal/pipeline.hpp"

namespace fisheye {

const char* to_string(FrucMode mode) {
  switch (mode) {
    case FrucMode::repetition: return "rep";
    case FrucMode::linear_average: return "la";
    case FrucMode::mc_fetch: return "mcf";
    case FrucMode::mc_linear_average: return "mcla";
  }
  return "?";
}

const char* to_string(AdaptKind adapt) {
  switch (adapt) {
    case AdaptKind::none: return "none";
    case AdaptKind::equisolid: return "equisolid";
    case AdaptKind::calibrated: return "calibrated";
  }
  return "?";
}

FrucMode fruc_mode_from_string(const std::string& s) {
  if (s == "rep" || s == "repetition") return FrucMode::repetition;
  if (s == "la") return FrucMode::linear_average;
  if (s == "mcf") return FrucMode::mc_fetch;
  if (s == "mcla") return FrucMode::mc_linear_average;
  throw std::invalid_argument("unknown fruc mode: " + s);
}

AdaptKind adapt_from_string(const std::string& s) {
  if (s == "none") return AdaptKind::none;
  if (s == "equisolid") return AdaptKind::equisolid;
  if (s == "calibrated") return AdaptKind::calibrated;
  throw std::invalid_argument("unknown adaptation: " + s);
}

void FrucConfig::validate() const {
  if (!(alpha > 0.0) || !(alpha < 1.0))
    throw std::invalid_argument("alpha must be in (0, 1)");
  search.validate();
}

std::vector<std::uint8_t> hybrid_region_split(const CameraGeometry& geom,
                                              const ProjectionModel& model,
                                              double hybrid_fov_deg, int blocks_x,
                                              int blocks_y, int block_size) {
  geom.validate();
  if (!(hybrid_fov_deg > 0.0) || hybrid_fov_deg >= geom.fov_deg)
    throw std::invalid_argument("hybrid fov must be in (0, fov)");
  const double radius = project_theta(model, geom, 0.5 * hybrid_fov_deg * kDegToRad);
  const double r2 = radius * radius;
  const int cx = geom.width_px / 2;
  const int cy = geom.height_px / 2;
  std::vector<std::uint8_t> adapted(static_cast<std::size_t>(blocks_x) * blocks_y, 0);
  for (int by = 0; by < blocks_y; ++by) {
    for (int bx = 0; bx < blocks_x; ++bx) {
      const int x0 = bx * block_size;
      const int y0 = by * block_size;
      const int x1 = std::min(x0 + block_size, geom.width_px) - 1;
      const int y1 = std::min(y0 + block_size, geom.height_px) - 1;
      bool inside = true;
      for (const int x : {x0, x1}) {
        for (const int y : {y0, y1}) {
          const double dx = x - cx;
          const double dy = y - cy;
          if (dx * dx + dy * dy > r2) inside = false;
        }
      }
      if (inside) adapted[static_cast<std::size_t>(by) * blocks_x + bx] = 1;
    }
  }
  return adapted;
}

MotionField estimate_hybrid(const Frame& cur, const Frame& ref, const SearchConfig& cfg,
                            const ProjectionModel& model, const CameraGeometry& geom,
                            double hybrid_fov_deg) {
  if (cfg.method == Method::tme)
    throw std::invalid_argument("estimate_hybrid: method must be EME+ or CME+");
  const int b = cfg.block_size;
  const int bx_count = (cur.width() + b - 1) / b;
  const int by_count = (cur.height() + b - 1) / b;
  const auto adapted =
      hybrid_region_split(geom, model, hybrid_fov_deg, bx_count, by_count, b);
  return estimate_mixed(cur, ref, cfg, &model, &geom, &adapted);
}

DenseMotionField densify(const MotionField& field, const ProjectionModel* model,
                         const CameraGeometry* geom) {
  const int w = field.frame_width;
  const int h = field.frame_height;
  if (w <= 0 || h <= 0)
    throw std::invalid_argument("densify: field carries no frame dimensions");

  bool any_adapted = false;
  for (std::size_t i = 0; i < field.methods.size(); ++i)
    if (!field.skipped[i] && field.methods[i] != Method::tme) any_adapted = true;
  std::optional<detail::WarpContext> ctx;
  if (any_adapted) {
    if (!model || !geom)
      throw std::invalid_argument("densify: re-projected field requires model and geometry");
    ctx.emplace(*model, *geom);
  }

  DenseMotionField dense;
  dense.width = w;
  dense.height = h;
  dense.mx.assign(static_cast<std::size_t>(w) * h, 0.0f);
  dense.my.assign(dense.mx.size(), 0.0f);

  const int b = field.config.block_size;
  const int cx = w / 2;
  const int cy = h / 2;
  detail::parallel_for(field.vectors.size(), [&](std::size_t bi) {
    if (field.skipped[bi]) return;  // zero vectors
    const int bx = static_cast<int>(bi) % field.blocks_x;
    const int by = static_cast<int>(bi) / field.blocks_x;
    const int x0 = bx * b;
    const int y0 = by * b;
    const int x1 = std::min(x0 + b, w);
    const int y1 = std::min(y0 + b, h);
    const MotionVector mv = field.vectors[bi];
    if (field.methods[bi] == Method::tme) {
      for (int y = y0; y < y1; ++y) {
        for (int x = x0; x < x1; ++x) {
          dense.mx[dense.index(x, y)] = static_cast<float>(mv.dx);
          dense.my[dense.index(x, y)] = static_cast<float>(mv.dy);
        }
      }
      return;
    }
    for (int y = y0; y < y1; ++y) {
      for (int x = x0; x < x1; ++x) {
        const auto p = detail::persp_pixel(*ctx, x - cx, y - cy);
        if (!p.in_circle) continue;  // zero vector
        double wx, wy;
        detail::warp_candidate(*ctx, p, mv.dx, mv.dy, wx, wy);
        dense.mx[dense.index(x, y)] = static_cast<float>(wx - (x - cx));
        dense.my[dense.index(x, y)] = static_cast<float>(wy - (y - cy));
      }
    }
  });
  return dense;
}

namespace {

// Median with the even case averaged; values.size() <= 38.
double median_of(double* values, int n) {
  std::sort(values, values + n);
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace

DenseMotionField retime_cwm(const DenseMotionField& fwd, const DenseMotionField& bwd,
                            int block_size) {
  if (fwd.width != bwd.width || fwd.height != bwd.height)
    throw std::invalid_argument("retime_cwm: field dimensions differ");
  if (block_size < 1) throw std::invalid_argument("retime_cwm: block size must be >= 1");
  const int w = fwd.width;
  const int h = fwd.height;

  DenseMotionField out;
  out.width = w;
  out.height = h;
  out.time = FieldTime::retimed;
  out.mx.assign(fwd.mx.size(), 0.0f);
  out.my.assign(fwd.my.size(), 0.0f);

  detail::parallel_for(static_cast<std::size_t>(h), [&](std::size_t row) {
    const int y = static_cast<int>(row);
    double vx[38];
    double vy[38];
    for (int x = 0; x < w; ++x) {
      int n = 0;
      const std::size_t c = fwd.index(x, y);
      for (int k = 0; k < 7; ++k) {
        vx[n] = fwd.mx[c];
        vy[n] = fwd.my[c];
        ++n;
        vx[n] = -bwd.mx[c];
        vy[n] = -bwd.my[c];
        ++n;
      }
      for (int arm = 0; arm < 4; ++arm) {
        static constexpr int kDir[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
        for (int step = 1; step <= 3; ++step) {
          const int tx = x + kDir[arm][0] * step * block_size;
          const int ty = y + kDir[arm][1] * step * block_size;
          if (tx < 0 || ty < 0 || tx >= w || ty >= h) continue;  // dropped tap
          const std::size_t t = fwd.index(tx, ty);
          vx[n] = fwd.mx[t];
          vy[n] = fwd.my[t];
          ++n;
          vx[n] = -bwd.mx[t];
          vy[n] = -bwd.my[t];
          ++n;
        }
      }
      out.mx[c] = static_cast<float>(median_of(vx, n));
      out.my[c] = static_cast<float>(median_of(vy, n));
    }
  });
  return out;
}

FrucFrames interpolate_full(const Frame& prev, const Frame& next, const FrucConfig& cfg,
                            const ProjectionModel& model, const CameraGeometry& geom) {
  cfg.validate();
  if (!prev.same_size(next))
    throw std::invalid_argument("interpolate: frames must have equal dimensions");

  if (cfg.mode == FrucMode::repetition) return {prev, std::nullopt, std::nullopt};

  const int w = prev.width();
  const int h = prev.height();
  if (cfg.mode == FrucMode::linear_average) {
    Frame out(w, h);
    const double a = cfg.alpha;
    detail::parallel_for(static_cast<std::size_t>(h), [&](std::size_t y) {
      for (int x = 0; x < w; ++x)
        out.at(x, static_cast<int>(y)) = static_cast<float>(
            a * prev.at(x, static_cast<int>(y)) + (1.0 - a) * next.at(x, static_cast<int>(y)));
    });
    return {std::move(out), std::nullopt, std::nullopt};
  }

  // Motion compensated modes: forward (prev into next) and backward (next
  // into prev) estimation, densification, CWM re-timing, then the fetches.
  SearchConfig me = cfg.search;
  MotionField fwd_field, bwd_field;
  if (cfg.adapt == AdaptKind::none) {
    me.method = Method::tme;
    fwd_field = estimate_tme(prev, next, me);
    bwd_field = estimate_tme(next, prev, me);
  } else {
    me.method = cfg.adapt == AdaptKind::equisolid ? Method::eme_plus : Method::cme_plus;
    fwd_field = estimate_hybrid(prev, next, me, model, geom, cfg.hybrid_fov_deg);
    bwd_field = estimate_hybrid(next, prev, me, model, geom, cfg.hybrid_fov_deg);
  }
  DenseMotionField dense_fwd = densify(fwd_field, &model, &geom);
  dense_fwd.time = FieldTime::forward;
  DenseMotionField dense_bwd = densify(bwd_field, &model, &geom);
  dense_bwd.time = FieldTime::backward;
  const DenseMotionField retimed = retime_cwm(dense_fwd, dense_bwd, me.block_size);

  const UpscaledFrame up_prev(prev, me.precision);
  const UpscaledFrame up_next(next, me.precision);
  Frame fetch_fw(w, h);
  Frame fetch_bw(w, h);
  const double a = cfg.alpha;
  detail::parallel_for(static_cast<std::size_t>(h), [&](std::size_t row) {
    const int y = static_cast<int>(row);
    for (int x = 0; x < w; ++x) {
      const std::size_t i = retimed.index(x, y);
      const double mx = retimed.mx[i];
      const double my = retimed.my[i];
      fetch_fw.at(x, y) = up_next.sample(x + a * mx, y + a * my);
      fetch_bw.at(x, y) = up_prev.sample(x - (1.0 - a) * mx, y - (1.0 - a) * my);
    }
  });

  Frame out(w, h);
  if (cfg.mode == FrucMode::mc_fetch) {
    out = fetch_bw;
  } else {
    detail::parallel_for(static_cast<std::size_t>(h), [&](std::size_t row) {
      const int y = static_cast<int>(row);
      for (int x = 0; x < w; ++x)
        out.at(x, y) =
            static_cast<float>(0.5 * fetch_fw.at(x, y) + 0.5 * fetch_bw.at(x, y));
    });
  }
  return {std::move(out), std::move(fetch_fw), std::move(fetch_bw)};
}

Frame interpolate(const Frame& prev, const Frame& next, const FrucConfig& cfg,
                  const ProjectionModel& model, const CameraGeometry& geom) {
  return interpolate_full(prev, next, cfg, model, geom).intermediate;
}

}  // namespace fisheye
