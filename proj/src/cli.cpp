#include "fisheye/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <vector>

#include "fisheye/metrics.hpp"
#include "fisheye/synth.hpp"

namespace fisheye::cli {

namespace {

CameraGeometry make_geometry(const GeometryOptions& g, int width, int height) {
  CameraGeometry geom{g.focal_mm, g.fov_deg, g.sensor_mm, width, height};
  geom.validate();
  return geom;
}

// Equisolid unless a calibration table was supplied.
ProjectionModel make_model(const GeometryOptions& g) {
  if (!g.calib_path.empty())
    return ProjectionModel::calibrated(load_calibration(g.calib_path));
  return ProjectionModel::analytic(ProjectionKind::equisolid);
}

std::string fmt_double(double v) {
  if (std::isinf(v)) return "inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

int data_error(const std::exception& e) {
  std::cerr << "error: " << e.what() << "\n";
  return kExitData;
}

int usage_error(const std::exception& e) {
  std::cerr << "usage error: " << e.what() << "\n";
  return kExitUsage;
}

struct EstimateSetup {
  Method method;
  SearchConfig config;
};

// Flag validation shared by estimate and batch; throws std::invalid_argument.
EstimateSetup parse_estimate_flags(const std::string& method_str, int block, int range,
                                   int precision, const std::string& metric_str,
                                   const GeometryOptions& geometry) {
  EstimateSetup s;
  s.method = method_from_string(method_str);
  s.config.block_size = block;
  s.config.search_range = range;
  s.config.precision = precision;
  s.config.metric = metric_from_string(metric_str);
  s.config.method = s.method;
  s.config.validate();
  if (s.method == Method::cme_plus && geometry.calib_path.empty())
    throw std::invalid_argument("method cme+ requires --calib");
  return s;
}

MotionField run_estimate(const Frame& cur, const Frame& ref, const EstimateSetup& s,
                         const ProjectionModel& model, const CameraGeometry& geom) {
  if (s.method == Method::tme) return estimate_tme(cur, ref, s.config);
  return estimate_projected(cur, ref, s.config, model, geom);
}

}  // namespace

int cmd_estimate(const EstimateOptions& o) {
  EstimateSetup setup;
  try {
    setup = parse_estimate_flags(o.method, o.block, o.range, o.precision, o.metric,
                                 o.geometry);
  } catch (const std::exception& e) {
    return usage_error(e);
  }
  try {
    const Frame ref = load_frame(o.ref_path);
    const Frame cur = load_frame(o.cur_path);
    const CameraGeometry geom = make_geometry(o.geometry, cur.width(), cur.height());
    const ProjectionModel model = make_model(o.geometry);

    const MotionField field = run_estimate(cur, ref, setup, model, geom);
    save_motion_field(field, o.out_prefix + "_field.csv");
    const Frame comp = compensate(ref, field, &model, &geom);
    save_frame(comp, o.out_prefix + "_comp.png");

    const CircularMask mask = make_mask(geom, model, o.mask_fov_deg);
    const MetricReport report = evaluate(comp, cur, mask);
    std::cout << "method=" << to_string(setup.method)
              << " psnr_db=" << fmt_double(report.psnr_db)
              << " ssim=" << fmt_double(report.ssim)
              << " masked_pixels=" << report.masked_pixels << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    return data_error(e);
  }
}

int cmd_compensate(const CompensateOptions& o) {
  try {
    const Frame ref = load_frame(o.ref_path);
    const MotionField field = load_motion_field(o.field_path);
    const CameraGeometry geom = make_geometry(o.geometry, ref.width(), ref.height());
    const ProjectionModel model = make_model(o.geometry);
    bool needs_calib = false;
    for (std::size_t i = 0; i < field.methods.size(); ++i)
      if (!field.skipped[i] && field.methods[i] == Method::cme_plus) needs_calib = true;
    if (needs_calib && o.geometry.calib_path.empty())
      throw std::invalid_argument("field contains CME+ blocks; --calib is required");
    const Frame comp = compensate(ref, field, &model, &geom);
    save_frame(comp, o.out_path);
    std::cout << "wrote " << o.out_path << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    return data_error(e);
  }
}

int cmd_fruc(const FrucOptions& o) {
  FrucConfig cfg;
  try {
    cfg.mode = fruc_mode_from_string(o.mode);
    cfg.adapt = adapt_from_string(o.adapt);
    cfg.alpha = o.alpha;
    cfg.hybrid_fov_deg = o.hybrid_fov_deg;
    cfg.search.block_size = o.block;
    cfg.search.search_range = o.range;
    cfg.search.precision = o.precision;
    cfg.search.metric = metric_from_string(o.metric);
    cfg.validate();
    if (cfg.adapt == AdaptKind::calibrated && o.geometry.calib_path.empty())
      throw std::invalid_argument("adapt calibrated requires --calib");
  } catch (const std::exception& e) {
    return usage_error(e);
  }
  try {
    const Frame prev = load_frame(o.prev_path);
    const Frame next = load_frame(o.next_path);
    const CameraGeometry geom = make_geometry(o.geometry, prev.width(), prev.height());
    const ProjectionModel model = make_model(o.geometry);

    const FrucFrames result = interpolate_full(prev, next, cfg, model, geom);
    save_frame(result.intermediate, o.out_path);
    if (!o.debug_prefix.empty() && result.fetch_fw && result.fetch_bw) {
      save_frame(*result.fetch_fw, o.debug_prefix + "_fw.png");
      save_frame(*result.fetch_bw, o.debug_prefix + "_bw.png");
    }
    std::cout << "mode=" << to_string(cfg.mode) << " adapt=" << to_string(cfg.adapt)
              << " wrote " << o.out_path << "\n";
    if (!o.truth_path.empty()) {
      const Frame truth = load_frame(o.truth_path);
      const CircularMask mask = make_mask(geom, model, o.mask_fov_deg);
      const MetricReport report = evaluate(result.intermediate, truth, mask);
      std::cout << "vs_truth psnr_db=" << fmt_double(report.psnr_db)
                << " ssim=" << fmt_double(report.ssim)
                << " masked_pixels=" << report.masked_pixels << "\n";
    }
    return kExitOk;
  } catch (const std::exception& e) {
    return data_error(e);
  }
}

int cmd_generate(const GenerateOptions& o) {
  try {
    SynthSpec spec;
    spec.geom = make_geometry(o.geometry, o.size, o.size);
    spec.model = make_model(o.geometry);
    spec.source = o.source_path.empty() ? make_noise_source(o.source_size, o.noise_seed)
                                        : load_frame(o.source_path);
    spec.shift_dx = o.shift_dx;
    spec.shift_dy = o.shift_dy;
    spec.frame_count = o.frames;

    const std::vector<Frame> frames = generate(spec);
    char name[32];
    for (std::size_t k = 0; k < frames.size(); ++k) {
      std::snprintf(name, sizeof(name), "_%04zu.png", k);
      save_frame(frames[k], o.out_prefix + name);
    }
    write_truth_sidecar(spec, o.out_prefix + "_truth.csv");
    std::cout << "wrote " << frames.size() << " frames to " << o.out_prefix
              << "_NNNN.png and " << o.out_prefix << "_truth.csv\n";
    return kExitOk;
  } catch (const std::exception& e) {
    return data_error(e);
  }
}

int cmd_metrics(const MetricsOptions& o) {
  try {
    const Frame ref = load_frame(o.ref_path);
    const Frame cur = load_frame(o.cur_path);
    const CameraGeometry geom = make_geometry(o.geometry, cur.width(), cur.height());
    const ProjectionModel model = make_model(o.geometry);
    const CircularMask mask = make_mask(geom, model, o.mask_fov_deg);
    const MetricReport report = evaluate(ref, cur, mask);
    std::cout << "frame,psnr_db,ssim,masked_pixels\n";
    std::cout << o.cur_path << ',' << fmt_double(report.psnr_db) << ','
              << fmt_double(report.ssim) << ',' << report.masked_pixels << "\n";
    return kExitOk;
  } catch (const std::exception& e) {
    return data_error(e);
  }
}

int cmd_batch(const BatchOptions& o) {
  EstimateSetup setup;
  try {
    setup = parse_estimate_flags(o.method, o.block, o.range, o.precision, o.metric,
                                 o.geometry);
  } catch (const std::exception& e) {
    return usage_error(e);
  }
  try {
    std::ifstream in(o.manifest_path);
    if (!in) throw std::runtime_error("cannot open manifest " + o.manifest_path);
    std::vector<std::pair<std::string, std::string>> pairs;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
      ++lineno;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      if (line.empty() || line[0] == '#') continue;
      const auto comma = line.find(',');
      if (comma == std::string::npos)
        throw std::runtime_error("manifest line " + std::to_string(lineno) +
                                 ": expected 'reference,current'");
      pairs.emplace_back(line.substr(0, comma), line.substr(comma + 1));
    }
    if (pairs.empty()) throw std::runtime_error("manifest lists no frame pairs");
    // All paths must exist at run start.
    for (const auto& [ref_path, cur_path] : pairs) {
      for (const std::string& p : {ref_path, cur_path}) {
        std::ifstream probe(p, std::ios::binary);
        if (!probe) throw std::runtime_error("manifest references missing file " + p);
      }
    }

    std::ofstream out(o.out_csv);
    if (!out) throw std::runtime_error("cannot write " + o.out_csv);
    out << "pair,reference,current,psnr_db,ssim,masked_pixels,psnr_inf_skipped\n";
    const ProjectionModel model = make_model(o.geometry);
    double psnr_sum = 0.0;
    long psnr_finite = 0;
    long psnr_inf = 0;
    double ssim_sum = 0.0;
    double pixel_sum = 0.0;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
      const auto& [ref_path, cur_path] = pairs[i];
      MetricReport report;
      try {
        const Frame ref = load_frame(ref_path);
        const Frame cur = load_frame(cur_path);
        const CameraGeometry geom = make_geometry(o.geometry, cur.width(), cur.height());
        const MotionField field = run_estimate(cur, ref, setup, model, geom);
        const Frame comp = compensate(ref, field, &model, &geom);
        const CircularMask mask = make_mask(geom, model, o.mask_fov_deg);
        report = evaluate(comp, cur, mask);
      } catch (const std::exception& e) {
        throw std::runtime_error("pair " + std::to_string(i) + " (" + ref_path + "," +
                                 cur_path + "): " + e.what());
      }
      out << i << ',' << ref_path << ',' << cur_path << ','
          << fmt_double(report.psnr_db) << ',' << fmt_double(report.ssim) << ','
          << report.masked_pixels << ",0\n";
      if (std::isinf(report.psnr_db)) {
        ++psnr_inf;
      } else {
        psnr_sum += report.psnr_db;
        ++psnr_finite;
      }
      ssim_sum += report.ssim;
      pixel_sum += static_cast<double>(report.masked_pixels);
    }
    const double n = static_cast<double>(pairs.size());
    const std::string mean_psnr =
        psnr_finite > 0 ? fmt_double(psnr_sum / static_cast<double>(psnr_finite)) : "inf";
    out << "mean,,," << mean_psnr << ',' << fmt_double(ssim_sum / n) << ','
        << fmt_double(pixel_sum / n) << ',' << psnr_inf << "\n";
    if (!out) throw std::runtime_error("write failed for " + o.out_csv);
    std::cout << "wrote " << o.out_csv << " (" << pairs.size() << " pairs)\n";
    return kExitOk;
  } catch (const std::exception& e) {
    return data_error(e);
  }
}

}  // namespace fisheye::cli
