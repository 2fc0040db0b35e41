#include "fisheye/blockmatch.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "internal/parallel.hpp"
#include "internal/pipeline.hpp"

namespace fisheye {

const char* to_string(Metric metric) {
  return metric == Metric::ssd ? "SSD" : "SAD";
}

const char* to_string(Method method) {
  switch (method) {
    case Method::tme: return "TME";
    case Method::eme_plus: return "EME+";
    case Method::cme_plus: return "CME+";
  }
  return "?";
}

Metric metric_from_string(const std::string& s) {
  std::string t = s;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "ssd") return Metric::ssd;
  if (t == "sad") return Metric::sad;
  throw std::invalid_argument("unknown metric: " + s);
}

Method method_from_string(const std::string& s) {
  std::string t = s;
  std::transform(t.begin(), t.end(), t.begin(), [](unsigned char c) { return std::tolower(c); });
  if (t == "tme") return Method::tme;
  if (t == "eme+" || t == "eme_plus") return Method::eme_plus;
  if (t == "cme+" || t == "cme_plus") return Method::cme_plus;
  throw std::invalid_argument("unknown method: " + s);
}

void SearchConfig::validate() const {
  if (block_size != 8 && block_size != 16 && block_size != 32 && block_size != 64)
    throw std::invalid_argument("block size must be one of 8, 16, 32, 64");
  if (search_range < 1) throw std::invalid_argument("search range must be >= 1");
  if (precision < 1) throw std::invalid_argument("precision must be >= 1");
}

namespace {

struct Best {
  double cost = std::numeric_limits<double>::infinity();
  int abs_sum = 0;
  int dy = 0;
  int dx = 0;
};

// Order-free tie-breaking: cost, then |dx| + |dy|, then raster order
// (dy, dx ascending).
inline bool better(double cost, int abs_sum, int dy, int dx, const Best& b) {
  if (cost != b.cost) return cost < b.cost;
  if (abs_sum != b.abs_sum) return abs_sum < b.abs_sum;
  if (dy != b.dy) return dy < b.dy;
  return dx < b.dx;
}

inline double cost_term(Metric m, double a, double b) {
  const double d = a - b;
  return m == Metric::ssd ? d * d : std::abs(d);
}

struct BlockRect {
  int x0, y0, w, h;
};

BlockRect block_rect(int bx, int by, int block_size, int width, int height) {
  const int x0 = bx * block_size;
  const int y0 = by * block_size;
  return {x0, y0, std::min(block_size, width - x0), std::min(block_size, height - y0)};
}

Best scan_block_tme(const Frame& cur, const Frame& ref, const SearchConfig& cfg,
                    const BlockRect& blk) {
  Best best;
  const int s = cfg.search_range;
  const Metric metric = cfg.metric;
  for (int dy = -s; dy <= s; ++dy) {
    for (int dx = -s; dx <= s; ++dx) {
      double cost = 0.0;
      bool aborted = false;
      for (int row = blk.y0; row < blk.y0 + blk.h; ++row) {
        const int ry = row + dy;
        if (ry < 0 || ry >= ref.height()) {
          for (int col = blk.x0; col < blk.x0 + blk.w; ++col)
            cost += cost_term(metric, cur.at(col, row), 0.0);
        } else {
          for (int col = blk.x0; col < blk.x0 + blk.w; ++col) {
            const int rx = col + dx;
            const double rv = (rx < 0 || rx >= ref.width()) ? 0.0 : ref.at(rx, ry);
            cost += cost_term(metric, cur.at(col, row), rv);
          }
        }
        // A candidate strictly above the incumbent can neither win nor tie.
        if (cost > best.cost) {
          aborted = true;
          break;
        }
      }
      if (aborted) continue;
      const int abs_sum = std::abs(dx) + std::abs(dy);
      if (better(cost, abs_sum, dy, dx, best)) best = {cost, abs_sum, dy, dx};
    }
  }
  return best;
}

// Precomputed per-pixel state of one block for the re-projected search.
struct BlockPixels {
  std::vector<detail::PerspPixel> geo;
  std::vector<float> cur;
  bool all_outside = true;
};

BlockPixels build_block_pixels(const Frame& cur, const detail::WarpContext& ctx,
                               const BlockRect& blk) {
  BlockPixels out;
  out.geo.reserve(static_cast<std::size_t>(blk.w) * blk.h);
  out.cur.reserve(out.geo.capacity());
  const int cx = cur.cx();
  const int cy = cur.cy();
  for (int row = blk.y0; row < blk.y0 + blk.h; ++row) {
    for (int col = blk.x0; col < blk.x0 + blk.w; ++col) {
      const auto p = detail::persp_pixel(ctx, col - cx, row - cy);
      if (p.in_circle) out.all_outside = false;
      out.geo.push_back(p);
      out.cur.push_back(cur.at(col, row));
    }
  }
  return out;
}

Best scan_block_projected(const BlockPixels& pix, const detail::WarpContext& ctx,
                          const UpscaledFrame& up, const SearchConfig& cfg,
                          double ox, double oy) {
  Best best;
  const int s = cfg.search_range;
  const Metric metric = cfg.metric;
  const std::size_t n = pix.geo.size();
  for (int dy = -s; dy <= s; ++dy) {
    for (int dx = -s; dx <= s; ++dx) {
      double cost = 0.0;
      bool aborted = false;
      for (std::size_t i = 0; i < n; ++i) {
        const auto& p = pix.geo[i];
        double rv = 0.0;
        if (p.in_circle) {
          double wx, wy;
          detail::warp_candidate(ctx, p, dx, dy, wx, wy);
          rv = up.sample(wx + ox, wy + oy);
        }
        cost += cost_term(metric, pix.cur[i], rv);
        if (cost > best.cost) {
          aborted = true;
          break;
        }
      }
      if (aborted) continue;
      const int abs_sum = std::abs(dx) + std::abs(dy);
      if (better(cost, abs_sum, dy, dx, best)) best = {cost, abs_sum, dy, dx};
    }
  }
  return best;
}

}  // namespace

double block_cost(const Frame& cur, const UpscaledFrame& ref, int x0, int y0,
                  int block_w, int block_h, MotionVector mv, Metric metric) {
  if (x0 < 0 || y0 < 0 || block_w < 1 || block_h < 1 || x0 + block_w > cur.width() ||
      y0 + block_h > cur.height())
    throw std::invalid_argument("block_cost: block outside the current frame");
  double cost = 0.0;
  for (int row = y0; row < y0 + block_h; ++row) {
    for (int col = x0; col < x0 + block_w; ++col) {
      const double rv = ref.sample(col + static_cast<double>(mv.dx),
                                   row + static_cast<double>(mv.dy));
      cost += cost_term(metric, cur.at(col, row), rv);
    }
  }
  return cost;
}

MotionField estimate_mixed(const Frame& cur, const Frame& ref, const SearchConfig& cfg,
                           const ProjectionModel* model, const CameraGeometry* geom,
                           const std::vector<std::uint8_t>* per_block_adapted) {
  cfg.validate();
  if (!cur.same_size(ref))
    throw std::invalid_argument("estimate: frames must have equal dimensions");
  const int b = cfg.block_size;
  const int bx_count = (cur.width() + b - 1) / b;
  const int by_count = (cur.height() + b - 1) / b;
  const std::size_t n_blocks = static_cast<std::size_t>(bx_count) * by_count;
  if (per_block_adapted && per_block_adapted->size() != n_blocks)
    throw std::invalid_argument("estimate: per-block method mask has wrong size");

  const auto adapted = [&](std::size_t bi) {
    if (per_block_adapted) return (*per_block_adapted)[bi] != 0;
    return cfg.method != Method::tme;
  };
  bool any_adapted = false;
  for (std::size_t bi = 0; bi < n_blocks && !any_adapted; ++bi) any_adapted = adapted(bi);
  if (any_adapted && cfg.method == Method::tme)
    throw std::invalid_argument("estimate: adapted blocks need an EME+/CME+ method tag");

  std::optional<detail::WarpContext> ctx;
  std::optional<UpscaledFrame> up;
  if (any_adapted) {
    if (!model || !geom)
      throw std::invalid_argument("estimate: re-projection requires model and geometry");
    geom->validate();
    if (geom->width_px != cur.width() || geom->height_px != cur.height())
      throw std::invalid_argument("estimate: geometry resolution does not match the frames");
    ctx.emplace(*model, *geom);
    up.emplace(ref, cfg.precision);
  }

  MotionField field;
  field.blocks_x = bx_count;
  field.blocks_y = by_count;
  field.frame_width = cur.width();
  field.frame_height = cur.height();
  field.config = cfg;
  field.vectors.assign(n_blocks, {});
  field.costs.assign(n_blocks, 0.0);
  field.skipped.assign(n_blocks, 0);
  field.methods.assign(n_blocks, Method::tme);

  const double ox = cur.cx();
  const double oy = cur.cy();
  detail::parallel_for(n_blocks, [&](std::size_t bi) {
    const int bx = static_cast<int>(bi) % bx_count;
    const int by = static_cast<int>(bi) / bx_count;
    const BlockRect blk = block_rect(bx, by, b, cur.width(), cur.height());
    if (!adapted(bi)) {
      const Best best = scan_block_tme(cur, ref, cfg, blk);
      field.vectors[bi] = {best.dx, best.dy};
      field.costs[bi] = best.cost;
      field.methods[bi] = Method::tme;
      return;
    }
    field.methods[bi] = cfg.method;
    const BlockPixels pix = build_block_pixels(cur, *ctx, blk);
    if (pix.all_outside) {
      field.skipped[bi] = 1;
      return;  // vector (0,0), cost 0
    }
    const Best best = scan_block_projected(pix, *ctx, *up, cfg, ox, oy);
    field.vectors[bi] = {best.dx, best.dy};
    field.costs[bi] = best.cost;
  });
  return field;
}

MotionField estimate_tme(const Frame& cur, const Frame& ref, const SearchConfig& cfg) {
  SearchConfig c = cfg;
  c.method = Method::tme;
  return estimate_mixed(cur, ref, c, nullptr, nullptr, nullptr);
}

MotionField estimate_projected(const Frame& cur, const Frame& ref,
                               const SearchConfig& cfg, const ProjectionModel& model,
                               const CameraGeometry& geom) {
  if (cfg.method == Method::tme)
    throw std::invalid_argument("estimate_projected: method must be EME+ or CME+");
  return estimate_mixed(cur, ref, cfg, &model, &geom, nullptr);
}

Frame compensate(const Frame& ref, const MotionField& field,
                 const ProjectionModel* model, const CameraGeometry* geom) {
  field.config.validate();
  const int b = field.config.block_size;
  const int bx_count = (ref.width() + b - 1) / b;
  const int by_count = (ref.height() + b - 1) / b;
  if (bx_count != field.blocks_x || by_count != field.blocks_y)
    throw std::invalid_argument("compensate: field does not match the frame grid");
  if (field.frame_width != 0 &&
      (field.frame_width != ref.width() || field.frame_height != ref.height()))
    throw std::invalid_argument("compensate: field was built for other frame dimensions");

  bool any_adapted = false;
  const std::size_t n_blocks = field.vectors.size();
  for (std::size_t bi = 0; bi < n_blocks; ++bi)
    if (!field.skipped[bi] && field.methods[bi] != Method::tme) any_adapted = true;

  std::optional<detail::WarpContext> ctx;
  std::optional<UpscaledFrame> up;
  if (any_adapted) {
    if (!model || !geom)
      throw std::invalid_argument("compensate: re-projected field requires model and geometry");
    geom->validate();
    if (geom->width_px != ref.width() || geom->height_px != ref.height())
      throw std::invalid_argument("compensate: geometry resolution does not match the frame");
    ctx.emplace(*model, *geom);
    up.emplace(ref, field.config.precision);
  }

  Frame out(ref.width(), ref.height(), 0.0f);
  const int cx = ref.cx();
  const int cy = ref.cy();
  detail::parallel_for(n_blocks, [&](std::size_t bi) {
    if (field.skipped[bi]) return;  // stays black
    const int bx = static_cast<int>(bi) % bx_count;
    const int by = static_cast<int>(bi) / bx_count;
    const BlockRect blk = block_rect(bx, by, b, ref.width(), ref.height());
    const MotionVector mv = field.vectors[bi];
    if (field.methods[bi] == Method::tme) {
      for (int row = blk.y0; row < blk.y0 + blk.h; ++row)
        for (int col = blk.x0; col < blk.x0 + blk.w; ++col)
          out.at(col, row) = ref.sample_or_zero(col + static_cast<long>(mv.dx),
                                                row + static_cast<long>(mv.dy));
      return;
    }
    for (int row = blk.y0; row < blk.y0 + blk.h; ++row) {
      for (int col = blk.x0; col < blk.x0 + blk.w; ++col) {
        const auto p = detail::persp_pixel(*ctx, col - cx, row - cy);
        if (!p.in_circle) continue;  // black background
        double wx, wy;
        detail::warp_candidate(*ctx, p, mv.dx, mv.dy, wx, wy);
        out.at(col, row) = up->sample(wx + cx, wy + cy);
      }
    }
  });
  return out;
}

void save_motion_field(const MotionField& field, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("motion field: cannot write " + path);
  out << "bx,by,dx,dy,cost,skipped,method,block,range,precision\n";
  char buf[192];
  for (int by = 0; by < field.blocks_y; ++by) {
    for (int bx = 0; bx < field.blocks_x; ++bx) {
      const std::size_t i = field.index(bx, by);
      std::snprintf(buf, sizeof(buf), "%d,%d,%d,%d,%.17g,%d,%s,%d,%d,%d", bx, by,
                    field.vectors[i].dx, field.vectors[i].dy, field.costs[i],
                    static_cast<int>(field.skipped[i]), to_string(field.methods[i]),
                    field.config.block_size, field.config.search_range,
                    field.config.precision);
      out << buf << '\n';
    }
  }
  if (!out) throw std::runtime_error("motion field: write failed for " + path);
}

MotionField load_motion_field(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("motion field: cannot open " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("motion field: empty file " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "bx,by,dx,dy,cost,skipped,method,block,range,precision")
    throw std::runtime_error("motion field: bad header in " + path);

  struct Row {
    int bx, by, dx, dy, skipped, block, range, precision;
    double cost;
    Method method;
  };
  std::vector<Row> rows;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string item;
    std::vector<std::string> f;
    while (std::getline(ss, item, ',')) f.push_back(item);
    if (f.size() != 10)
      throw std::runtime_error("motion field: bad row in " + path);
    Row r;
    try {
      r.bx = std::stoi(f[0]);
      r.by = std::stoi(f[1]);
      r.dx = std::stoi(f[2]);
      r.dy = std::stoi(f[3]);
      r.cost = std::stod(f[4]);
      r.skipped = std::stoi(f[5]);
      r.method = method_from_string(f[6]);
      r.block = std::stoi(f[7]);
      r.range = std::stoi(f[8]);
      r.precision = std::stoi(f[9]);
    } catch (const std::exception&) {
      throw std::runtime_error("motion field: bad row in " + path);
    }
    rows.push_back(r);
  }
  if (rows.empty()) throw std::runtime_error("motion field: no rows in " + path);

  MotionField field;
  for (const Row& r : rows) {
    field.blocks_x = std::max(field.blocks_x, r.bx + 1);
    field.blocks_y = std::max(field.blocks_y, r.by + 1);
  }
  const std::size_t n = static_cast<std::size_t>(field.blocks_x) * field.blocks_y;
  if (rows.size() != n)
    throw std::runtime_error("motion field: incomplete block grid in " + path);
  field.config.block_size = rows.front().block;
  field.config.search_range = rows.front().range;
  field.config.precision = rows.front().precision;
  field.vectors.assign(n, {});
  field.costs.assign(n, 0.0);
  field.skipped.assign(n, 0);
  field.methods.assign(n, Method::tme);
  std::vector<std::uint8_t> seen(n, 0);
  for (const Row& r : rows) {
    if (r.block != field.config.block_size || r.range != field.config.search_range ||
        r.precision != field.config.precision)
      throw std::runtime_error("motion field: inconsistent config columns in " + path);
    const std::size_t i = field.index(r.bx, r.by);
    if (seen[i])
      throw std::runtime_error("motion field: duplicate block row in " + path);
    seen[i] = 1;
    field.vectors[i] = {r.dx, r.dy};
    field.costs[i] = r.cost;
    field.skipped[i] = static_cast<std::uint8_t>(r.skipped != 0);
    field.methods[i] = r.method;
    if (r.method != Method::tme) field.config.method = r.method;
  }
  return field;
}

}  // namespace fisheye
