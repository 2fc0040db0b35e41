#include <doctest.h>
#include <png.h>

#include <cstdio>
#include <cstring>
#include <fstream>
#include <random>
#include <vector>

#include "fisheye/frame.hpp"

using namespace fisheye;

namespace {

std::string temp_path(const char* name) {
  return std::string("/tmp/fisheye_frame_") + name;
}

Frame random_frame(int w, int h, unsigned seed) {
  Frame f(w, h);
  std::mt19937 rng(seed);
  std::uniform_int_distribution<int> dist(0, 255);
  for (auto& v : f.data()) v = static_cast<float>(dist(rng));
  return f;
}

void write_rgb_png(const std::string& path, int w, int h,
                   const std::vector<std::uint8_t>& rgb) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(w);
  image.height = static_cast<png_uint_32>(h);
  image.format = PNG_FORMAT_RGB;
  REQUIRE(png_image_write_to_file(&image, path.c_str(), 0, rgb.data(), 0, nullptr));
}

void write_gray16_png(const std::string& path, int w, int h) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(w);
  image.height = static_cast<png_uint_32>(h);
  image.format = PNG_FORMAT_LINEAR_Y;
  std::vector<std::uint16_t> pixels(static_cast<std::size_t>(w) * h, 1234);
  REQUIRE(png_image_write_to_file(&image, path.c_str(), 0, pixels.data(), 0, nullptr));
}

}  // namespace

TEST_CASE("png round trip is lossless for 8-bit data") {
  Frame f(16, 16);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) f.at(x, y) = static_cast<float>(x + 16 * y - 1);
  f.at(0, 0) = 0.0f;  // keep everything in [0, 255]
  const auto path = temp_path("grad.png");
  save_frame(f, path);
  const Frame g = load_frame(path);
  REQUIRE(g.same_size(f));
  CHECK(g.data() == f.data());
}

TEST_CASE("pgm round trip is lossless for 8-bit data") {
  const Frame f = random_frame(33, 17, 3);
  const auto path = temp_path("rt.pgm");
  save_frame(f, path);
  const Frame g = load_frame(path);
  REQUIRE(g.same_size(f));
  CHECK(g.data() == f.data());
}

TEST_CASE("color png converts to luminance with BT.601 weights") {
  const int w = 4, h = 2;
  std::vector<std::uint8_t> rgb(static_cast<std::size_t>(w) * h * 3);
  for (std::size_t i = 0; i < rgb.size(); i += 3) {
    rgb[i] = 100;
    rgb[i + 1] = 100;
    rgb[i + 2] = 100;
  }
  rgb[0] = 10;
  rgb[1] = 20;
  rgb[2] = 30;
  const auto path = temp_path("rgb.png");
  write_rgb_png(path, w, h, rgb);
  const Frame f = load_frame(path);
  CHECK(f.at(0, 0) ==
        doctest::Approx((299.0 * 10 + 587.0 * 20 + 114.0 * 30) / 1000.0));
  for (int x = 1; x < w; ++x) CHECK(f.at(x, 0) == 100.0f);
}

TEST_CASE("broken inputs are rejected") {
  const Frame f = random_frame(24, 24, 9);
  const auto path = temp_path("trunc.png");
  save_frame(f, path);
  std::ifstream in(path, std::ios::binary);
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)),
                          std::istreambuf_iterator<char>());
  in.close();
  {
    std::ofstream out(path, std::ios::binary);
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size() / 2));
  }
  CHECK_THROWS_AS(load_frame(path), std::runtime_error);

  const auto p16 = temp_path("deep.png");
  write_gray16_png(p16, 8, 8);
  try {
    load_frame(p16);
    FAIL("16-bit png must be rejected");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("bit depth") != std::string::npos);
  }

  {
    std::ofstream out(temp_path("deep.pgm"), std::ios::binary);
    out << "P5\n4 4\n65535\n";
    for (int i = 0; i < 32; ++i) out.put('\0');
  }
  try {
    load_frame(temp_path("deep.pgm"));
    FAIL("16-bit pgm must be rejected");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("bit depth") != std::string::npos);
  }

  {
    std::ofstream out(temp_path("short.pgm"), std::ios::binary);
    out << "P5\n8 8\n255\n";
    out.put('\0');
  }
  CHECK_THROWS_AS(load_frame(temp_path("short.pgm")), std::runtime_error);

  CHECK_THROWS_AS(load_frame(temp_path("missing.png")), std::runtime_error);
  CHECK_THROWS_AS(save_frame(f, temp_path("image.bmp")), std::invalid_argument);
}

TEST_CASE("upscale reproduces constants and the source grid") {
  const Frame c(20, 12, 42.0f);
  const UpscaledFrame up(c, 8);
  CHECK(up.grid_width() == 19 * 8 + 1);
  CHECK(up.grid_height() == 11 * 8 + 1);
  for (long gy = 0; gy < up.grid_height(); gy += 7)
    for (long gx = 0; gx < up.grid_width(); gx += 5) CHECK(up.at_grid(gx, gy) == 42.0f);

  const Frame r = random_frame(31, 22, 4);
  const UpscaledFrame up8(r, 8);
  for (int y = 0; y < r.height(); ++y)
    for (int x = 0; x < r.width(); ++x)
      CHECK(up8.at_grid(8L * x, 8L * y) == r.at(x, y));

  const UpscaledFrame up1(r, 1);
  CHECK(up1.grid_width() == r.width());
  for (int y = 0; y < r.height(); ++y)
    for (int x = 0; x < r.width(); ++x) CHECK(up1.at_grid(x, y) == r.at(x, y));
}

TEST_CASE("cubic interpolation reproduces interior linear ramps") {
  Frame f(16, 6);
  for (int y = 0; y < 6; ++y)
    for (int x = 0; x < 16; ++x) f.at(x, y) = static_cast<float>(8 * x);
  const UpscaledFrame up(f, 8);
  // half-pel between the samples 8 and 16
  CHECK(up.at_grid(12, 16) == doctest::Approx(12.0).epsilon(1e-9));
  // finer positions across the interior stay on the ramp
  for (long gx = 8; gx <= 14 * 8; ++gx)
    CHECK(up.at_grid(gx, 24) == doctest::Approx(static_cast<double>(gx)).epsilon(1e-9));
}

TEST_CASE("sample quantizes half away from zero and pads with black") {
  const Frame r = random_frame(9, 9, 5);
  const UpscaledFrame up(r, 8);
  CHECK(up.sample(3.0, 4.0) == r.at(3, 4));
  CHECK(up.sample(1000.0, 0.0) == 0.0f);
  CHECK(up.sample(-1000.0, 2.0) == 0.0f);
  CHECK(up.sample(0.0625, 0.0) == up.at_grid(1, 0));    // 0.5/8 rounds up
  CHECK(up.sample(-0.0625, 0.0) == 0.0f);               // -0.5/8 rounds to -1: outside
  CHECK(up.sample(3.0625, 4.0) == up.at_grid(25, 32));  // 3 + 0.5/8 rounds away from zero
}

TEST_CASE("make_mask radius follows the projected fov limit") {
  const CameraGeometry geom{1.8, 185.0, 5.2, 1088, 1088};
  const auto eq = ProjectionModel::analytic(ProjectionKind::equisolid);
  const CircularMask mask = make_mask(geom, eq);
  const double expect = 2.0 * geom.focal_px() * std::sin(92.5 * kDegToRad / 2.0);
  CHECK(mask.radius() == doctest::Approx(expect).epsilon(1e-12));
  CHECK(mask.radius() == doctest::Approx(2.6005 / 5.2 * 1088.0).epsilon(1e-3));

  const CircularMask inner = make_mask(geom, eq, 170.0);
  CHECK(inner.count() < mask.count());
  CHECK(inner.count() > 0);

  CHECK_THROWS_AS(make_mask(geom, eq, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_mask(geom, eq, 200.0), std::invalid_argument);
}

TEST_CASE("mask is symmetric under 180 degree rotation") {
  const CameraGeometry geom{1.8, 185.0, 5.2, 64, 64};
  const auto eq = ProjectionModel::analytic(ProjectionKind::equisolid);
  const CircularMask mask = make_mask(geom, eq, 120.0);
  const int cx = 32, cy = 32;
  for (int y = 1; y < 64; ++y)
    for (int x = 1; x < 64; ++x)
      CHECK(mask.contains(x, y) == mask.contains(2 * cx - x, 2 * cy - y));
}

TEST_CASE("frame validation") {
  CHECK_THROWS_AS(Frame(0, 4), std::invalid_argument);
  CHECK_THROWS_AS(UpscaledFrame(Frame(4, 4), 0), std::invalid_argument);
  CHECK_THROWS_AS(CircularMask(8, 8, 0.0), std::invalid_argument);
  const Frame f(5, 4, 1.0f);
  CHECK(f.cx() == 2);
  CHECK(f.cy() == 2);
  CHECK(f.sample_or_zero(-1, 0) == 0.0f);
  CHECK(f.sample_or_zero(0, 0) == 1.0f);
}
