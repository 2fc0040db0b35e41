#pragma once

#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

// Radial projection mathematics for circular fisheye imagery: the pinhole
// model, the four classical fisheye projection functions, a calibrated model
// backed by a lookup table, and the coordinate transforms between the fisheye
// and perspective domains including the ultra wide-angle handling for
// incident angles beyond 90 degrees.
//
// All operations are pure functions of immutable inputs and safe for
// unrestricted concurrent use.

namespace fisheye {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDegToRad = kPi / 180.0;
inline constexpr double kRadToDeg = 180.0 / kPi;

// Incident angles within this band of 90 degrees are treated as lying beyond
// the critical circle; the tangent pole itself never reaches a coordinate
// buffer.
inline constexpr double kTangentPoleBand = 1e-12;

// Raised by fisheye_to_perspective when the incident angle falls on the
// tangent pole (theta = pi/2 within 1e-12).
struct SingularAngleError : std::domain_error {
  using std::domain_error::domain_error;
};

struct CartCoord {
  double x = 0.0;  // pixels, origin at the image center
  double y = 0.0;
};

struct PolarCoord {
  double r = 0.0;    // pixels; negative only as output of the fisheye-to-pinhole
                     // transform for theta > pi/2
  double phi = 0.0;  // radians in (-pi, pi]
};

struct CameraGeometry {
  double focal_mm = 1.8;
  double fov_deg = 185.0;
  double sensor_mm = 5.2;  // width of the square sensor
  int width_px = 1088;
  int height_px = 1088;

  double focal_px() const { return focal_mm * width_px / sensor_mm; }
  double px_per_mm() const { return width_px / sensor_mm; }
  double theta_max() const { return 0.5 * fov_deg * kDegToRad; }

  // Throws std::invalid_argument on out-of-range fields.
  void validate() const;
};

// Monotone theta -> r samples at a fixed angular step, invertible by search.
class CalibrationTable {
 public:
  CalibrationTable() = default;
  // Entries must start at (0, 0), use a uniform step and strictly increase
  // in r. Throws std::invalid_argument otherwise.
  CalibrationTable(double theta_step_deg, std::vector<double> r_mm);

  double theta_step_deg() const { return theta_step_deg_; }
  double theta_max_rad() const {
    return theta_step_deg_ * static_cast<double>(r_mm_.size() - 1) * kDegToRad;
  }
  std::size_t size() const { return r_mm_.size(); }
  double r_mm(std::size_t i) const { return r_mm_[i]; }

  // Forward evaluation by linear interpolation between bracketing samples.
  // O(1) thanks to the uniform step. Throws std::domain_error outside the
  // sampled range.
  double r_at_theta(double theta_rad) const;

  // Inverse evaluation: binary search over the monotone r column, then
  // linear interpolation. Throws std::out_of_range for r beyond the table.
  double theta_at_r(double r_mm) const;

 private:
  double theta_step_deg_ = 0.0;
  std::vector<double> r_mm_;
};

// Text format: required header "theta_deg,r_mm", then one "theta_deg,r" pair
// per line, ascending theta at a uniform step, r in millimeters.
CalibrationTable load_calibration(const std::string& path);
void save_calibration(const CalibrationTable& table, const std::string& path);

enum class ProjectionKind {
  pinhole,
  equidistant,
  equisolid,
  orthographic,
  stereographic,
  calibrated,
};

const char* to_string(ProjectionKind kind);

struct ProjectionModel {
  ProjectionKind kind = ProjectionKind::equisolid;
  std::optional<CalibrationTable> table;  // required iff kind == calibrated

  static ProjectionModel analytic(ProjectionKind kind);
  static ProjectionModel calibrated(CalibrationTable table);
};

// Samples an analytic model into a calibration table (r converted to
// millimeters), e.g. to cross-check the calibrated path against its
// analytic counterpart.
CalibrationTable sample_calibration(const ProjectionModel& model,
                                    const CameraGeometry& geom,
                                    double theta_step_deg,
                                    double theta_max_deg);

// r(theta) in pixels. Strictly increasing on the model's valid theta domain;
// throws std::domain_error outside it.
double project_theta(const ProjectionModel& model, const CameraGeometry& geom,
                     double theta_rad);

// theta(r) for r in [0, r_max]. Throws std::domain_error for r < 0 and
// std::out_of_range for r > r_max: a larger radius indicates a coordinate
// bug upstream and is never clamped.
double unproject_radius(const ProjectionModel& model, const CameraGeometry& geom,
                        double r_px);

// Radius of the image circle (theta = fov/2), pixels.
double model_r_max(const ProjectionModel& model, const CameraGeometry& geom);

// Radius of the critical circle where the FOV exceeds 180 degrees.
// Exists iff fov_deg > 180 for the active model.
std::optional<double> model_r180(const ProjectionModel& model,
                                 const CameraGeometry& geom);

// phi per the sign-dependent case split; phi = 0 at the origin.
PolarCoord cart_to_polar(CartCoord c);
CartCoord polar_to_cart(PolarCoord p);

// Normalizes an angle into (-pi, pi].
double wrap_angle(double phi);

// r_p = f tan(theta(r_f)), phi unchanged. The returned radius is negative for
// theta > pi/2. Throws SingularAngleError within 1e-12 of the tangent pole;
// callers that sweep whole pixel grids use to_perspective_point instead.
PolarCoord fisheye_to_perspective(PolarCoord p, const ProjectionModel& model,
                                  const CameraGeometry& geom);

// r = r(arctan(r_p / f)), phi unchanged. Requires p.r >= 0. The arctan keeps
// the result strictly below the critical circle radius.
PolarCoord perspective_to_fisheye(PolarCoord p, const ProjectionModel& model,
                                  const CameraGeometry& geom);

// Perspective-domain Cartesian position of one fisheye pixel together with
// its ultra wide-angle flag. Pixels within 1e-12 rad of the tangent pole are
// mapped to a large finite surrogate radius and flagged, so coordinate
// buffers never contain infinities.
struct PerspectivePoint {
  double x = 0.0;
  double y = 0.0;
  bool flipped = false;  // theta beyond (or numerically at) 90 degrees
};

PerspectivePoint to_perspective_point(CartCoord fisheye, const ProjectionModel& model,
                                      const CameraGeometry& geom);

// Ultra wide-angle compensation steps. For flipped coordinates the candidate
// is inverted, the polar angle after candidate addition is shifted by -pi,
// and the re-projected radius is mirrored across the critical circle.
// Unflagged coordinates pass through unchanged.
struct UwaVector {
  double dx = 0.0;
  double dy = 0.0;
};

UwaVector uwa_candidate(UwaVector mv, bool flipped);
double uwa_phase(double phi, bool flipped);
double uwa_mirror_radius(double r_f, bool flipped, double r180);

// Applies one motion vector candidate to one perspective-domain coordinate
// and re-projects into the fisheye domain, running the ultra wide-angle steps
// for flipped coordinates. Requires a critical circle (fov > 180) when the
// point is flipped; throws std::logic_error otherwise.
CartCoord apply_candidate(const PerspectivePoint& p, double dx, double dy,
                          const ProjectionModel& model, const CameraGeometry& geom);

// Radius part of the perspective-to-fisheye re-projection with the per-model
// constants resolved up front; algebraically equal to
// project_theta(model, atan(r_p / focal_px)) but free of trigonometric calls
// for every kind except equidistant. This is the form used inside the
// candidate search loops.
class ForwardReprojector {
 public:
  ForwardReprojector(const ProjectionModel& model, const CameraGeometry& geom);

  double operator()(double r_p) const {
    const double t = r_p * inv_focal_;
    switch (kind_) {
      case ProjectionKind::pinhole:
        return r_p;
      case ProjectionKind::equidistant:
        return focal_ * std::atan(t);
      case ProjectionKind::equisolid: {
        // 2f sin(atan(t)/2) = f sqrt(2u / (q (q + 1))), u = t^2, q = sqrt(1+u)
        const double u = t * t;
        const double q = std::sqrt(1.0 + u);
        return focal_ * std::sqrt(2.0 * u / (q * (q + 1.0)));
      }
      case ProjectionKind::orthographic: {
        const double q = std::sqrt(1.0 + t * t);
        return focal_ * t / q;
      }
      case ProjectionKind::stereographic: {
        const double q = std::sqrt(1.0 + t * t);
        return 2.0 * focal_ * t / (1.0 + q);
      }
      case ProjectionKind::calibrated:
        return table_->r_at_theta(std::atan(t)) * px_per_mm_;
    }
    return 0.0;
  }

 private:
  ProjectionKind kind_;
  double focal_;
  double inv_focal_;
  double px_per_mm_ = 0.0;
  const CalibrationTable* table_ = nullptr;
};

}  // namespace fisheye
