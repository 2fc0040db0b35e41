#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>

#include "fisheye/geometry.hpp"
#include "internal/pipeline.hpp"

using namespace fisheye;

namespace {

// Unit-focal geometry: focal_px = 1, px_per_mm = 1.
CameraGeometry unit_geom(double fov_deg) {
  return CameraGeometry{1.0, fov_deg, 100.0, 100, 100};
}

const CameraGeometry kPaperRig{1.8, 185.0, 5.2, 1088, 1088};

std::string temp_path(const char* name) {
  return std::string("/tmp/fisheye_geom_") + name;
}

}  // namespace

TEST_CASE("project_theta matches the projection functions") {
  const auto eq = ProjectionModel::analytic(ProjectionKind::equisolid);
  const auto pin = ProjectionModel::analytic(ProjectionKind::pinhole);

  // r_max of the paper rig, in sensor millimeters
  const double r_px = project_theta(eq, kPaperRig, 92.5 * kDegToRad);
  const double r_mm = r_px / kPaperRig.px_per_mm();
  CHECK(r_mm > 2.59);
  CHECK(r_mm < 2.61);

  for (const auto kind :
       {ProjectionKind::pinhole, ProjectionKind::equidistant, ProjectionKind::equisolid,
        ProjectionKind::orthographic, ProjectionKind::stereographic}) {
    CHECK(project_theta(ProjectionModel::analytic(kind), kPaperRig, 0.0) == 0.0);
  }

  CHECK(project_theta(pin, unit_geom(120.0), 45.0 * kDegToRad) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(project_theta(eq, kPaperRig, kPi / 2.0) ==
        doctest::Approx(std::sqrt(2.0) * kPaperRig.focal_px()).epsilon(1e-12));
}

TEST_CASE("project_theta rejects angles outside the model domain") {
  const auto pin = ProjectionModel::analytic(ProjectionKind::pinhole);
  const auto ortho = ProjectionModel::analytic(ProjectionKind::orthographic);
  CHECK_THROWS_AS(project_theta(pin, unit_geom(90.0), kPi / 2.0), std::domain_error);
  CHECK_THROWS_AS(project_theta(ortho, unit_geom(180.0), kPi / 2.0 + 0.01),
                  std::domain_error);
  CHECK_THROWS_AS(project_theta(pin, unit_geom(90.0), -0.1), std::domain_error);
}

TEST_CASE("unproject_radius inverts project_theta") {
  const auto eq = ProjectionModel::analytic(ProjectionKind::equisolid);
  const auto geom = unit_geom(220.0);
  CHECK(unproject_radius(eq, geom, std::sqrt(2.0)) ==
        doctest::Approx(kPi / 2.0).epsilon(1e-12));
  CHECK(unproject_radius(eq, geom, 0.0) == 0.0);
  CHECK_THROWS_AS(unproject_radius(eq, geom, model_r_max(eq, geom) + 1e-6),
                  std::out_of_range);
  CHECK_THROWS_AS(unproject_radius(eq, geom, -1.0), std::domain_error);
}

TEST_CASE("calibrated inversion stays within one table step") {
  const auto eq = ProjectionModel::analytic(ProjectionKind::equisolid);
  const auto table = sample_calibration(eq, kPaperRig, 0.01, 92.5);
  CHECK(table.size() == 9251);
  const auto cal = ProjectionModel::calibrated(table);

  const double r = project_theta(eq, kPaperRig, 0.7);
  // Oracle: the analytic equisolid inverse 2 asin(r / 2f).
  const double theta = unproject_radius(cal, kPaperRig, r);
  CHECK(std::abs(theta - 0.7) < 2e-4);
}

TEST_CASE("cart_to_polar follows the sign-dependent case split") {
  const auto p1 = cart_to_polar({0.0, 5.0});
  CHECK(p1.r == doctest::Approx(5.0));
  CHECK(p1.phi == doctest::Approx(kPi / 2.0));

  const auto p0 = cart_to_polar({0.0, 0.0});
  CHECK(p0.r == 0.0);
  CHECK(p0.phi == 0.0);

  // Oracle: quadrant-aware arctangent, atan(4 / -3) + pi.
  const auto p2 = cart_to_polar({-3.0, 4.0});
  CHECK(p2.r == doctest::Approx(5.0).epsilon(1e-12));
  CHECK(p2.phi == doctest::Approx(std::atan(4.0 / -3.0) + kPi).epsilon(1e-12));

  std::mt19937 rng(11);
  std::uniform_real_distribution<double> dist(-50.0, 50.0);
  for (int i = 0; i < 2000; ++i) {
    const double x = dist(rng);
    const double y = dist(rng);
    const auto p = cart_to_polar({x, y});
    CHECK(p.phi == doctest::Approx(std::atan2(y, x)).epsilon(1e-12));
    CHECK(p.phi <= kPi);
    CHECK(p.phi > -kPi);
  }
}

TEST_CASE("polar_to_cart and the negative radius convention") {
  const auto c1 = polar_to_cart({5.0, kPi / 2.0});
  CHECK(c1.x == doctest::Approx(0.0).scale(1.0));
  CHECK(c1.y == doctest::Approx(5.0));

  const auto c0 = polar_to_cart({0.0, 1.234});
  CHECK(c0.x == 0.0);
  CHECK(c0.y == 0.0);

  const auto c2 = polar_to_cart({-2.0, 0.0});
  CHECK(c2.x == -2.0);
  CHECK(c2.y == 0.0);
  const auto back = cart_to_polar(c2);
  CHECK(back.r == doctest::Approx(2.0));
  CHECK(back.phi == doctest::Approx(kPi));
}

TEST_CASE("fisheye_to_perspective closed forms and the tangent pole") {
  const auto eq = ProjectionModel::analytic(ProjectionKind::equisolid);
  const auto geom = unit_geom(280.0);

  const double r45 = 2.0 * std::sin(22.5 * kDegToRad);
  const auto p = fisheye_to_perspective({r45, 0.3}, eq, geom);
  CHECK(p.r == doctest::Approx(1.0).epsilon(1e-9));
  CHECK(p.phi == 0.3);

  const auto origin = fisheye_to_perspective({0.0, -2.5}, eq, geom);
  CHECK(origin.r == 0.0);
  CHECK(origin.phi == -2.5);

  // theta = 135 degrees: negative radius
  const double r135 = 2.0 * std::sin(67.5 * kDegToRad);
  const auto n = fisheye_to_perspective({r135, 0.0}, eq, geom);
  CHECK(n.r == doctest::Approx(-1.0).epsilon(1e-9));

  const double r90 = project_theta(eq, geom, kPi / 2.0);
  CHECK_THROWS_AS(fisheye_to_perspective({r90, 0.0}, eq, geom), SingularAngleError);
}

TEST_CASE("perspective_to_fisheye closed forms and the radius limit") {
  const auto eq = ProjectionModel::analytic(ProjectionKind::equisolid);
  const auto geom = unit_geom(185.0);

  const auto p = perspective_to_fisheye({1.0, 1.1}, eq, geom);
  CHECK(p.r == doctest::Approx(2.0 * std::sin(22.5 * kDegToRad)).epsilon(1e-12));
  CHECK(p.phi == 1.1);

  CHECK(perspective_to_fisheye({0.0, 0.0}, eq, geom).r == 0.0);

  // Very large perspective radii approach sqrt(2) f.
  const auto lim = perspective_to_fisheye({1e12, 0.0}, eq, geom);
  CHECK(std::abs(lim.r - std::sqrt(2.0)) < 1e-6);

  CHECK_THROWS_AS(perspective_to_fisheye({-1.0, 0.0}, eq, geom), std::domain_error);
}

TEST_CASE("ultra wide-angle steps") {
  const auto id = uwa_candidate({3.0, -4.0}, false);
  CHECK(id.dx == 3.0);
  CHECK(id.dy == -4.0);
  const auto inv = uwa_candidate({3.0, -4.0}, true);
  CHECK(inv.dx == -3.0);
  CHECK(inv.dy == 4.0);

  CHECK(uwa_phase(0.25, false) == 0.25);
  CHECK(uwa_phase(0.25, true) == doctest::Approx(0.25 - kPi));
  CHECK(uwa_phase(-3.0, true) == doctest::Approx(-3.0 - kPi + 2.0 * kPi));
  CHECK(uwa_mirror_radius(1.2, false, 1.4) == 1.2);
  CHECK(uwa_mirror_radius(1.2, true, 1.4) == doctest::Approx(1.6));
}

TEST_CASE("ultra wide-angle mirror is approximate, with the documented error") {
  // theta = 100 degrees, candidate (0,0), equisolid with f = 1.
  const auto eq = ProjectionModel::analytic(ProjectionKind::equisolid);
  const auto geom = unit_geom(220.0);
  const double r100 = project_theta(eq, geom, 100.0 * kDegToRad);
  const auto pp = to_perspective_point({r100, 0.0}, eq, geom);
  CHECK(pp.flipped);
  CHECK(pp.x == doctest::Approx(std::tan(100.0 * kDegToRad)).epsilon(1e-9));

  const auto out = apply_candidate(pp, 0.0, 0.0, eq, geom);
  const double mirrored = 2.0 * std::sqrt(2.0) - 2.0 * std::sin(40.0 * kDegToRad);
  CHECK(out.x == doctest::Approx(mirrored).epsilon(1e-9));
  CHECK(std::abs(out.y) < 1e-9);

  // The paper's mirror step is approximate: the exact radius at 100 degrees
  // differs by about 0.011 f, and the error grows with theta - 90.
  const double truth = 2.0 * std::sin(50.0 * kDegToRad);
  CHECK(std::abs(mirrored - truth) == doctest::Approx(0.0107630).epsilon(1e-3));
}

TEST_CASE("flagged coordinates require a critical circle") {
  const auto eq = ProjectionModel::analytic(ProjectionKind::equisolid);
  const auto geom = unit_geom(160.0);  // no r_180
  CHECK(!model_r180(eq, geom));
  PerspectivePoint fake{1.0, 0.0, true};
  CHECK_THROWS_AS(apply_candidate(fake, 0.0, 0.0, eq, geom), std::logic_error);
}

TEST_CASE("hot-path warp agrees with the canonical candidate application") {
  const auto eq = ProjectionModel::analytic(ProjectionKind::equisolid);
  const auto geom = unit_geom(220.0);
  const detail::WarpContext ctx(eq, geom);
  std::mt19937 rng(23);
  std::uniform_real_distribution<double> pos(-1.9, 1.9);
  std::uniform_int_distribution<int> cand(-6, 6);
  int flipped_seen = 0;
  for (int i = 0; i < 5000; ++i) {
    const double xf = pos(rng);
    const double yf = pos(rng);
    const auto pix = detail::persp_pixel(ctx, xf, yf);
    if (!pix.in_circle) continue;
    flipped_seen += pix.flipped ? 1 : 0;
    const double dx = cand(rng);
    const double dy = cand(rng);
    double wx, wy;
    detail::warp_candidate(ctx, pix, dx, dy, wx, wy);
    const auto ref = apply_candidate({pix.px, pix.py, pix.flipped}, dx, dy, eq, geom);
    CHECK(std::abs(wx - ref.x) < 1e-9);
    CHECK(std::abs(wy - ref.y) < 1e-9);
  }
  CHECK(flipped_seen > 100);  // the ultra-wide band was actually exercised
}

TEST_CASE("round trip through the perspective domain") {
  struct Case {
    ProjectionKind kind;
    double fov;
    double cap;  // sup of the valid radius band, focal units
  };
  const Case cases[] = {
      {ProjectionKind::equidistant, 185.0, kPi / 2.0},
      {ProjectionKind::equisolid, 185.0, std::sqrt(2.0)},
      {ProjectionKind::orthographic, 180.0, 1.0},
      {ProjectionKind::stereographic, 185.0, 2.0},
  };
  std::mt19937 rng(5);
  for (const auto& c : cases) {
    const auto model = ProjectionModel::analytic(c.kind);
    const auto geom = unit_geom(c.fov);
    std::uniform_real_distribution<double> dist(0.0, 0.999 * c.cap);
    for (int i = 0; i < 2000; ++i) {
      const double r = dist(rng);
      const auto persp = fisheye_to_perspective({r, 0.5}, model, geom);
      const auto back = perspective_to_fisheye({std::abs(persp.r), 0.5}, model, geom);
      CHECK(std::abs(back.r - r) < 1e-6 * c.cap);
    }
  }
}

TEST_CASE("projection functions increase strictly") {
  const auto eq = ProjectionModel::analytic(ProjectionKind::equisolid);
  const auto geomTable = unit_geom(185.0);
  const auto cal =
      ProjectionModel::calibrated(sample_calibration(eq, geomTable, 0.01, 92.5));
  struct Case {
    ProjectionModel model;
    double fov;
  };
  const Case cases[] = {
      {ProjectionModel::analytic(ProjectionKind::pinhole), 170.0},
      {ProjectionModel::analytic(ProjectionKind::equidistant), 300.0},
      {ProjectionModel::analytic(ProjectionKind::equisolid), 300.0},
      {ProjectionModel::analytic(ProjectionKind::orthographic), 180.0},
      {ProjectionModel::analytic(ProjectionKind::stereographic), 300.0},
      {cal, 185.0},
  };
  for (const auto& c : cases) {
    const auto geom = unit_geom(c.fov);
    const double theta_hi = geom.theta_max();
    double prev = -1.0;
    for (int i = 0; i < 1000; ++i) {
      const double theta = theta_hi * (static_cast<double>(i) / 999.0);
      const double r = project_theta(c.model, geom, theta);
      CHECK(r > prev);
      prev = r;
    }
  }
}

TEST_CASE("phi passes through the domain transforms bitwise") {
  const auto eq = ProjectionModel::analytic(ProjectionKind::equisolid);
  const auto geom = unit_geom(185.0);
  std::mt19937 rng(17);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  std::uniform_real_distribution<double> rad(0.0, 1.40);
  for (int i = 0; i < 500; ++i) {
    const double phi = ang(rng);
    const double r = rad(rng);
    CHECK(fisheye_to_perspective({r, phi}, eq, geom).phi == phi);
    CHECK(perspective_to_fisheye({r, phi}, eq, geom).phi == phi);
  }
}

TEST_CASE("equisolid projects below the pinhole radius") {
  const auto eq = ProjectionModel::analytic(ProjectionKind::equisolid);
  const auto pin = ProjectionModel::analytic(ProjectionKind::pinhole);
  const auto geom = unit_geom(170.0);
  for (int i = 1; i < 100; ++i) {
    const double theta = (kPi / 2.0) * (static_cast<double>(i) / 100.0);
    CHECK(project_theta(eq, geom, theta) < project_theta(pin, geom, theta));
  }
}

TEST_CASE("calibrated transforms track the analytic equisolid model") {
  const auto eq = ProjectionModel::analytic(ProjectionKind::equisolid);
  const auto geom = kPaperRig;
  const auto cal = ProjectionModel::calibrated(sample_calibration(eq, geom, 0.01, 92.5));

  const double r180_eq = *model_r180(eq, geom);
  const double r180_cal = *model_r180(cal, geom);
  CHECK(r180_cal == doctest::Approx(r180_eq).epsilon(1e-9));
  CHECK(model_r_max(cal, geom) == doctest::Approx(model_r_max(eq, geom)).epsilon(1e-9));

  const double step_px = geom.focal_px() * 0.01 * kDegToRad;  // ~ one table step
  for (int i = 0; i <= 200; ++i) {
    const double r = 0.999 * r180_eq * (static_cast<double>(i) / 200.0);
    const auto pa = fisheye_to_perspective({r, 0.0}, eq, geom);
    const auto pc = fisheye_to_perspective({r, 0.0}, cal, geom);
    // tan amplifies near 90 degrees; compare the angles instead
    CHECK(std::abs(std::atan(pc.r / geom.focal_px()) -
                   std::atan(pa.r / geom.focal_px())) < 2e-4);
    const auto fa = perspective_to_fisheye({std::abs(pa.r), 0.0}, eq, geom);
    const auto fc = perspective_to_fisheye({std::abs(pa.r), 0.0}, cal, geom);
    CHECK(std::abs(fa.r - fc.r) < step_px);
    // round trip within 1e-3 relative for the table-backed model
    const auto back = perspective_to_fisheye({std::abs(pc.r), 0.0}, cal, geom);
    CHECK(std::abs(back.r - r) < 1e-3 * r180_eq);
  }
}

TEST_CASE("calibration files round trip and reject bad tables") {
  const auto eq = ProjectionModel::analytic(ProjectionKind::equisolid);
  const auto table = sample_calibration(eq, kPaperRig, 0.01, 92.5);
  const std::string path = temp_path("lut.csv");
  save_calibration(table, path);
  const auto loaded = load_calibration(path);
  CHECK(loaded.size() == table.size());
  CHECK(loaded.theta_step_deg() == doctest::Approx(0.01));
  for (std::size_t i = 0; i < table.size(); i += 997)
    CHECK(loaded.r_mm(i) == table.r_mm(i));

  {
    std::ofstream out(temp_path("empty.csv"));
  }
  CHECK_THROWS_AS(load_calibration(temp_path("empty.csv")), std::runtime_error);

  {
    std::ofstream out(temp_path("nohdr.csv"));
    out << "0,0\n0.01,1\n";
  }
  CHECK_THROWS_AS(load_calibration(temp_path("nohdr.csv")), std::runtime_error);

  {
    std::ofstream out(temp_path("nonmono.csv"));
    out << "theta_deg,r_mm\n0,0\n0.01,2\n0.02,1.5\n";
  }
  CHECK_THROWS_AS(load_calibration(temp_path("nonmono.csv")), std::invalid_argument);

  CHECK_THROWS_AS(load_calibration(temp_path("does_not_exist.csv")),
                  std::runtime_error);
}

TEST_CASE("wrap_angle lands in (-pi, pi]") {
  CHECK(wrap_angle(kPi) == kPi);
  CHECK(wrap_angle(-kPi) == kPi);
  CHECK(wrap_angle(3.5 * kPi) == doctest::Approx(-0.5 * kPi));
  CHECK(wrap_angle(0.1) == 0.1);
}

TEST_CASE("geometry validation") {
  CHECK_THROWS_AS((CameraGeometry{0.0, 185.0, 5.2, 10, 10}.validate()),
                  std::invalid_argument);
  CHECK_THROWS_AS((CameraGeometry{1.8, 0.0, 5.2, 10, 10}.validate()),
                  std::invalid_argument);
  CHECK_THROWS_AS((CameraGeometry{1.8, 400.0, 5.2, 10, 10}.validate()),
                  std::invalid_argument);
  CHECK_THROWS_AS((CameraGeometry{1.8, 185.0, 5.2, 0, 10}.validate()),
                  std::invalid_argument);
  CHECK(kPaperRig.focal_px() == doctest::Approx(1.8 * 1088.0 / 5.2));
}
