#include <png.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <stdexcept>
#include <vector>

#include "fisheye/frame.hpp"

namespace fisheye {

namespace {

bool has_suffix(const std::string& s, const char* suffix) {
  const std::size_t n = std::strlen(suffix);
  if (s.size() < n) return false;
  std::string tail = s.substr(s.size() - n);
  std::transform(tail.begin(), tail.end(), tail.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return tail == suffix;
}

Frame load_png(const std::string& path) {
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_file(&image, path.c_str()))
    throw std::runtime_error("png: cannot read " + path + ": " + image.message);
  if (image.format & PNG_FORMAT_FLAG_LINEAR) {
    png_image_free(&image);
    throw std::runtime_error("png: unsupported bit depth (> 8) in " + path);
  }
  // Request RGB so the luminance conversion below controls the weights.
  image.format = PNG_FORMAT_RGB;
  std::vector<std::uint8_t> rgb(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, rgb.data(), 0, nullptr)) {
    const std::string msg = image.message;
    png_image_free(&image);
    throw std::runtime_error("png: failed to decode " + path + ": " + msg);
  }
  Frame frame(static_cast<int>(image.width), static_cast<int>(image.height));
  const std::size_t n = static_cast<std::size_t>(image.width) * image.height;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = rgb[3 * i];
    const double g = rgb[3 * i + 1];
    const double b = rgb[3 * i + 2];
    // ITU-R BT.601; exact for r = g = b.
    frame.data()[i] = static_cast<float>((299.0 * r + 587.0 * g + 114.0 * b) / 1000.0);
  }
  return frame;
}

int pgm_token(std::istream& in) {
  // Skips whitespace and '#' comments, then reads one non-negative integer.
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (std::isspace(c)) {
      c = in.get();
    } else {
      break;
    }
  }
  if (c == EOF || !std::isdigit(c)) return -1;
  int value = 0;
  while (c != EOF && std::isdigit(c)) {
    value = value * 10 + (c - '0');
    if (value > 1 << 20) return -1;
    c = in.get();
  }
  return value;
}

Frame load_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("pgm: cannot open " + path);
  char magic[2] = {0, 0};
  in.read(magic, 2);
  if (magic[0] != 'P' || magic[1] != '5')
    throw std::runtime_error("pgm: not a P5 file: " + path);
  const int w = pgm_token(in);
  const int h = pgm_token(in);
  const int maxval = pgm_token(in);
  if (w <= 0 || h <= 0 || maxval <= 0)
    throw std::runtime_error("pgm: bad header in " + path);
  if (maxval > 255)
    throw std::runtime_error("pgm: unsupported bit depth (maxval > 255) in " + path);
  // Header ends with exactly one whitespace byte, already consumed by the
  // token reader.
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(w) * h);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (in.gcount() != static_cast<std::streamsize>(bytes.size()))
    throw std::runtime_error("pgm: truncated file " + path);
  Frame frame(w, h);
  for (std::size_t i = 0; i < bytes.size(); ++i)
    frame.data()[i] = static_cast<float>(bytes[i]);
  return frame;
}

std::vector<std::uint8_t> quantize(const Frame& frame) {
  std::vector<std::uint8_t> bytes(frame.data().size());
  for (std::size_t i = 0; i < bytes.size(); ++i) {
    const float v = std::clamp(frame.data()[i], 0.0f, 255.0f);
    bytes[i] = static_cast<std::uint8_t>(std::llround(v));
  }
  return bytes;
}

}  // namespace

Frame load_frame(const std::string& path) {
  std::ifstream probe(path, std::ios::binary);
  if (!probe) throw std::runtime_error("cannot open " + path);
  unsigned char sig[8] = {0};
  probe.read(reinterpret_cast<char*>(sig), 8);
  probe.close();
  if (png_sig_cmp(sig, 0, 8) == 0) return load_png(path);
  if (sig[0] == 'P' && sig[1] == '5') return load_pgm(path);
  throw std::runtime_error("unsupported image format: " + path);
}

void save_frame(const Frame& frame, const std::string& path) {
  if (frame.width() <= 0 || frame.height() <= 0)
    throw std::invalid_argument("cannot save an empty frame");
  const std::vector<std::uint8_t> bytes = quantize(frame);
  if (has_suffix(path, ".png")) {
    png_image image;
    std::memset(&image, 0, sizeof(image));
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(frame.width());
    image.height = static_cast<png_uint_32>(frame.height());
    image.format = PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&image, path.c_str(), 0, bytes.data(), 0, nullptr))
      throw std::runtime_error("png: failed to write " + path + ": " + image.message);
    return;
  }
  if (has_suffix(path, ".pgm")) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("pgm: cannot write " + path);
    out << "P5\n" << frame.width() << ' ' << frame.height() << "\n255\n";
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw std::runtime_error("pgm: write failed for " + path);
    return;
  }
  throw std::invalid_argument("unsupported output extension: " + path);
}

}  // namespace fisheye
