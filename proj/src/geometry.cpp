#include "fisheye/geometry.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace fisheye {

namespace {

constexpr double kHalfPi = kPi / 2.0;

}  // namespace

void CameraGeometry::validate() const {
  if (!(focal_mm > 0.0)) throw std::invalid_argument("focal_mm must be > 0");
  if (!(sensor_mm > 0.0)) throw std::invalid_argument("sensor_mm must be > 0");
  if (!(fov_deg > 0.0) || fov_deg > 360.0)
    throw std::invalid_argument("fov_deg must be in (0, 360]");
  if (width_px <= 0 || height_px <= 0)
    throw std::invalid_argument("resolution must be positive");
}

CalibrationTable::CalibrationTable(double theta_step_deg, std::vector<double> r_mm)
    : theta_step_deg_(theta_step_deg), r_mm_(std::move(r_mm)) {
  if (!(theta_step_deg_ > 0.0))
    throw std::invalid_argument("calibration: theta step must be > 0");
  if (r_mm_.size() < 2)
    throw std::invalid_argument("calibration: need at least two samples");
  if (r_mm_.front() != 0.0)
    throw std::invalid_argument("calibration: first entry must be r = 0");
  for (std::size_t i = 1; i < r_mm_.size(); ++i) {
    if (!(r_mm_[i] > r_mm_[i - 1]))
      throw std::invalid_argument("calibration: r must increase strictly with theta");
  }
}

double CalibrationTable::r_at_theta(double theta_rad) const {
  if (theta_rad < 0.0)
    throw std::domain_error("calibration: theta below sampled range");
  const double pos = theta_rad * kRadToDeg / theta_step_deg_;
  const double last = static_cast<double>(r_mm_.size() - 1);
  // Tolerate radians->degrees rounding at the very end of the table.
  if (pos > last + 1e-6)
    throw std::domain_error("calibration: theta above sampled range");
  if (pos >= last) return r_mm_.back();
  const auto idx = static_cast<std::size_t>(pos);
  const double t = pos - static_cast<double>(idx);
  return r_mm_[idx] + t * (r_mm_[idx + 1] - r_mm_[idx]);
}

double CalibrationTable::theta_at_r(double r) const {
  if (r < 0.0) throw std::domain_error("calibration: negative radius");
  if (r > r_mm_.back())
    throw std::out_of_range("calibration: radius above sampled range");
  const auto it = std::upper_bound(r_mm_.begin(), r_mm_.end(), r);
  const auto hi = static_cast<std::size_t>(it - r_mm_.begin());
  if (hi >= r_mm_.size()) return theta_max_rad();  // r equals the last sample
  const std::size_t lo = hi - 1;
  const double t = (r - r_mm_[lo]) / (r_mm_[hi] - r_mm_[lo]);
  return (static_cast<double>(lo) + t) * theta_step_deg_ * kDegToRad;
}

CalibrationTable load_calibration(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("calibration: cannot open " + path);

  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error("calibration: empty file " + path);
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != "theta_deg,r_mm")
    throw std::runtime_error("calibration: missing 'theta_deg,r_mm' header in " + path);

  std::vector<double> thetas;
  std::vector<double> radii;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos)
      throw std::runtime_error("calibration: bad row at line " + std::to_string(lineno));
    std::size_t used_a = 0, used_b = 0;
    double theta = 0.0, r = 0.0;
    try {
      theta = std::stod(line.substr(0, comma), &used_a);
      r = std::stod(line.substr(comma + 1), &used_b);
    } catch (const std::exception&) {
      throw std::runtime_error("calibration: bad row at line " + std::to_string(lineno));
    }
    thetas.push_back(theta);
    radii.push_back(r);
  }
  if (thetas.size() < 2)
    throw std::runtime_error("calibration: need at least two rows in " + path);
  if (std::abs(thetas.front()) > 1e-12)
    throw std::invalid_argument("calibration: table must start at theta = 0");
  const double step = thetas[1] - thetas[0];
  if (!(step > 0.0))
    throw std::invalid_argument("calibration: theta must ascend");
  for (std::size_t i = 0; i < thetas.size(); ++i) {
    if (std::abs(thetas[i] - static_cast<double>(i) * step) > 1e-6 * step)
      throw std::invalid_argument("calibration: theta step is not uniform");
  }
  return CalibrationTable(step, std::move(radii));
}

void save_calibration(const CalibrationTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("calibration: cannot write " + path);
  out << "theta_deg,r_mm\n";
  char buf[64];
  for (std::size_t i = 0; i < table.size(); ++i) {
    std::snprintf(buf, sizeof(buf), "%.12g,%.17g",
                  static_cast<double>(i) * table.theta_step_deg(), table.r_mm(i));
    out << buf << '\n';
  }
  if (!out) throw std::runtime_error("calibration: write failed for " + path);
}

const char* to_string(ProjectionKind kind) {
  switch (kind) {
    case ProjectionKind::pinhole: return "pinhole";
    case ProjectionKind::equidistant: return "equidistant";
    case ProjectionKind::equisolid: return "equisolid";
    case ProjectionKind::orthographic: return "orthographic";
    case ProjectionKind::stereographic: return "stereographic";
    case ProjectionKind::calibrated: return "calibrated";
  }
  return "?";
}

ProjectionModel ProjectionModel::analytic(ProjectionKind kind) {
  if (kind == ProjectionKind::calibrated)
    throw std::invalid_argument("calibrated model needs a table");
  return ProjectionModel{kind, std::nullopt};
}

ProjectionModel ProjectionModel::calibrated(CalibrationTable table) {
  return ProjectionModel{ProjectionKind::calibrated, std::move(table)};
}

CalibrationTable sample_calibration(const ProjectionModel& model,
                                    const CameraGeometry& geom,
                                    double theta_step_deg, double theta_max_deg) {
  if (!(theta_step_deg > 0.0) || !(theta_max_deg > 0.0))
    throw std::invalid_argument("sample_calibration: step and range must be > 0");
  const auto n = static_cast<std::size_t>(std::llround(theta_max_deg / theta_step_deg)) + 1;
  std::vector<double> r_mm(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double theta = static_cast<double>(i) * theta_step_deg * kDegToRad;
    r_mm[i] = project_theta(model, geom, theta) / geom.px_per_mm();
  }
  return CalibrationTable(theta_step_deg, std::move(r_mm));
}

double project_theta(const ProjectionModel& model, const CameraGeometry& geom,
                     double theta_rad) {
  if (theta_rad < 0.0) throw std::domain_error("project_theta: negative theta");
  const double f = geom.focal_px();
  switch (model.kind) {
    case ProjectionKind::pinhole:
      if (theta_rad >= kHalfPi)
        throw std::domain_error("project_theta: pinhole requires theta < pi/2");
      return f * std::tan(theta_rad);
    case ProjectionKind::equidistant:
      return f * theta_rad;
    case ProjectionKind::equisolid:
      if (theta_rad > kPi)
        throw std::domain_error("project_theta: equisolid requires theta <= pi");
      return 2.0 * f * std::sin(0.5 * theta_rad);
    case ProjectionKind::orthographic:
      if (theta_rad > kHalfPi)
        throw std::domain_error("project_theta: orthographic requires theta <= pi/2");
      return f * std::sin(theta_rad);
    case ProjectionKind::stereographic:
      if (theta_rad >= kPi)
        throw std::domain_error("project_theta: stereographic requires theta < pi");
      return 2.0 * f * std::tan(0.5 * theta_rad);
    case ProjectionKind::calibrated:
      if (!model.table) throw std::invalid_argument("calibrated model needs a table");
      return model.table->r_at_theta(theta_rad) * geom.px_per_mm();
  }
  throw std::invalid_argument("project_theta: unknown projection kind");
}

double unproject_radius(const ProjectionModel& model, const CameraGeometry& geom,
                        double r_px) {
  if (r_px < 0.0) throw std::domain_error("unproject_radius: negative radius");
  const double r_max = model_r_max(model, geom);
  if (r_px > r_max)
    throw std::out_of_range("unproject_radius: radius beyond the image circle");
  const double f = geom.focal_px();
  switch (model.kind) {
    case ProjectionKind::pinhole:
      return std::atan(r_px / f);
    case ProjectionKind::equidistant:
      return r_px / f;
    case ProjectionKind::equisolid:
      return 2.0 * std::asin(std::min(1.0, r_px / (2.0 * f)));
    case ProjectionKind::orthographic:
      return std::asin(std::min(1.0, r_px / f));
    case ProjectionKind::stereographic:
      return 2.0 * std::atan(r_px / (2.0 * f));
    case ProjectionKind::calibrated:
      return model.table->theta_at_r(r_px / geom.px_per_mm());
  }
  throw std::invalid_argument("unproject_radius: unknown projection kind");
}

double model_r_max(const ProjectionModel& model, const CameraGeometry& geom) {
  return project_theta(model, geom, geom.theta_max());
}

std::optional<double> model_r180(const ProjectionModel& model,
                                 const CameraGeometry& geom) {
  if (geom.fov_deg <= 180.0) return std::nullopt;
  return project_theta(model, geom, kHalfPi);
}

PolarCoord cart_to_polar(CartCoord c) {
  const double r = std::hypot(c.x, c.y);
  double phi = 0.0;
  if (c.x > 0.0) {
    phi = std::atan(c.y / c.x);
  } else if (c.x < 0.0 && c.y >= 0.0) {
    phi = std::atan(c.y / c.x) + kPi;
  } else if (c.x < 0.0 && c.y < 0.0) {
    phi = std::atan(c.y / c.x) - kPi;
  } else if (c.y != 0.0) {
    phi = std::copysign(kHalfPi, c.y);
  }
  // x = y = 0 keeps phi = 0
  return {r, phi};
}

CartCoord polar_to_cart(PolarCoord p) {
  return {p.r * std::cos(p.phi), p.r * std::sin(p.phi)};
}

double wrap_angle(double phi) {
  while (phi > kPi) phi -= 2.0 * kPi;
  while (phi <= -kPi) phi += 2.0 * kPi;
  return phi;
}

PolarCoord fisheye_to_perspective(PolarCoord p, const ProjectionModel& model,
                                  const CameraGeometry& geom) {
  const double theta = unproject_radius(model, geom, p.r);
  if (std::abs(theta - kHalfPi) < kTangentPoleBand)
    throw SingularAngleError("fisheye_to_perspective: theta at the tangent pole");
  return {geom.focal_px() * std::tan(theta), p.phi};
}

PolarCoord perspective_to_fisheye(PolarCoord p, const ProjectionModel& model,
                                  const CameraGeometry& geom) {
  if (p.r < 0.0)
    throw std::domain_error("perspective_to_fisheye: negative radius");
  const double theta = std::atan(p.r / geom.focal_px());
  return {project_theta(model, geom, theta), p.phi};
}

PerspectivePoint to_perspective_point(CartCoord fisheye, const ProjectionModel& model,
                                      const CameraGeometry& geom) {
  const double r = std::hypot(fisheye.x, fisheye.y);
  if (r == 0.0) return {0.0, 0.0, false};
  const double theta = unproject_radius(model, geom, r);
  const double f = geom.focal_px();
  double r_p;
  bool flipped;
  if (std::abs(theta - kHalfPi) < kTangentPoleBand) {
    // Finite surrogate for the pole: tan(pi/2 + band) ~ -1/band.
    r_p = -f / kTangentPoleBand;
    flipped = true;
  } else {
    r_p = f * std::tan(theta);
    flipped = theta > kHalfPi;
  }
  const double scale = r_p / r;
  return {scale * fisheye.x, scale * fisheye.y, flipped};
}

UwaVector uwa_candidate(UwaVector mv, bool flipped) {
  return flipped ? UwaVector{-mv.dx, -mv.dy} : mv;
}

double uwa_phase(double phi, bool flipped) {
  return flipped ? wrap_angle(phi - kPi) : phi;
}

double uwa_mirror_radius(double r_f, bool flipped, double r180) {
  return flipped ? r_f + 2.0 * (r180 - r_f) : r_f;
}

CartCoord apply_candidate(const PerspectivePoint& p, double dx, double dy,
                          const ProjectionModel& model, const CameraGeometry& geom) {
  const UwaVector eff = uwa_candidate({dx, dy}, p.flipped);
  const PolarCoord moved = cart_to_polar({p.x + eff.dx, p.y + eff.dy});
  const double phi = uwa_phase(moved.phi, p.flipped);
  PolarCoord fish = perspective_to_fisheye({moved.r, phi}, model, geom);
  if (p.flipped) {
    const auto r180 = model_r180(model, geom);
    if (!r180)
      throw std::logic_error("apply_candidate: flipped coordinate without fov > 180");
    fish.r = uwa_mirror_radius(fish.r, true, *r180);
  }
  return polar_to_cart(fish);
}

ForwardReprojector::ForwardReprojector(const ProjectionModel& model,
                                       const CameraGeometry& geom)
    : kind_(model.kind), focal_(geom.focal_px()), inv_focal_(1.0 / geom.focal_px()) {
  if (kind_ == ProjectionKind::calibrated) {
    if (!model.table) throw std::invalid_argument("calibrated model needs a table");
    table_ = &*model.table;
    px_per_mm_ = geom.px_per_mm();
  }
}

}  // namespace fisheye
