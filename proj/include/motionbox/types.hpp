#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace motionbox {

/// Base error type for all failures surfaced by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A frame pair with no detectable motion (identical frames, empty mask).
/// Callers treat this as a reportable condition rather than a bug.
class NoMotionError : public Error {
 public:
  NoMotionError() : Error("no motion: difference mask is empty") {}
  explicit NoMotionError(const std::string& what) : Error(what) {}
};

/// 8-bit RGB raster, row-major, interleaved channels. Grayscale sources are
/// replicated to three channels at load time so the struct always holds
/// exactly three channels.
struct Frame {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> data;

  Frame() = default;
  Frame(int w, int h) {
    if (w <= 0 || h <= 0) throw Error("Frame: dimensions must be positive");
    width = w;
    height = h;
    data.assign(static_cast<std::size_t>(w) * h * 3, 0);
  }

  std::size_t index(int x, int y, int c) const {
    return (static_cast<std::size_t>(y) * width + x) * 3 + c;
  }
  std::uint8_t at(int x, int y, int c) const { return data[index(x, y, c)]; }
  std::uint8_t& at(int x, int y, int c) { return data[index(x, y, c)]; }

  void set_pixel(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    data[index(x, y, 0)] = r;
    data[index(x, y, 1)] = g;
    data[index(x, y, 2)] = b;
  }

  void fill(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) set_pixel(x, y, r, g, b);
  }
};

/// Axis-aligned rectangle with real-valued center and extent, in pixel units.
/// Rounding to the pixel grid happens only where a discrete pixel set is
/// needed (see box_to_rect); the optimizer works on the real-valued form.
struct Box {
  double x = 0;  // center x
  double y = 0;  // center y
  double w = 0;
  double h = 0;

  double left() const { return x - w / 2.0; }
  double right() const { return x + w / 2.0; }
  double top() const { return y - h / 2.0; }
  double bottom() const { return y + h / 2.0; }
};

/// Discrete half-open pixel rectangle [x0, x1) x [y0, y1).
struct PixelRect {
  int x0 = 0;
  int y0 = 0;
  int x1 = 0;
  int y1 = 0;

  int width() const { return x1 - x0; }
  int height() const { return y1 - y0; }
  long long area() const { return static_cast<long long>(width()) * height(); }
  bool operator==(const PixelRect&) const = default;
};

/// Rounding convention: pixel rectangle = [round(x-w/2), round(x+w/2)) x
/// [round(y-h/2), round(y+h/2)). Half-open intervals keep lookups into the
/// integral image unambiguous.
inline PixelRect box_to_rect(const Box& b) {
  PixelRect r;
  r.x0 = static_cast<int>(std::llround(b.left()));
  r.x1 = static_cast<int>(std::llround(b.right()));
  r.y0 = static_cast<int>(std::llround(b.top()));
  r.y1 = static_cast<int>(std::llround(b.bottom()));
  return r;
}

/// Clamp a box so it lies fully inside a frameW x frameH frame, with sides no
/// smaller than minSide. Extent is clamped first, then the center is moved.
inline Box clamp_box(Box b, int frameW, int frameH, double minSide) {
  b.w = std::clamp(b.w, std::min<double>(minSide, frameW), static_cast<double>(frameW));
  b.h = std::clamp(b.h, std::min<double>(minSide, frameH), static_cast<double>(frameH));
  b.x = std::clamp(b.x, b.w / 2.0, frameW - b.w / 2.0);
  b.y = std::clamp(b.y, b.h / 2.0, frameH - b.h / 2.0);
  return b;
}

/// Dense H x W grid of doubles, row-major. The workhorse scalar raster.
struct Raster {
  int width = 0;
  int height = 0;
  std::vector<double> values;

  Raster() = default;
  Raster(int w, int h, double v = 0.0) {
    if (w <= 0 || h <= 0) throw Error("Raster: dimensions must be positive");
    width = w;
    height = h;
    values.assign(static_cast<std::size_t>(w) * h, v);
  }

  double at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
  double& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }

  double max_value() const {
    double m = values.empty() ? 0.0 : values[0];
    for (double v : values) m = std::max(m, v);
    return m;
  }
};

/// Binary raster with entries in {0, 1}.
struct BinaryMask {
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> values;

  BinaryMask() = default;
  BinaryMask(int w, int h, std::uint8_t v = 0) {
    if (w <= 0 || h <= 0) throw Error("BinaryMask: dimensions must be positive");
    width = w;
    height = h;
    values.assign(static_cast<std::size_t>(w) * h, v);
  }

  std::uint8_t at(int x, int y) const { return values[static_cast<std::size_t>(y) * width + x]; }
  std::uint8_t& at(int x, int y) { return values[static_cast<std::size_t>(y) * width + x]; }

  std::size_t count_set() const {
    std::size_t n = 0;
    for (auto v : values) n += (v != 0);
    return n;
  }
};

/// Scalar raster constrained to [0, 1]. Every construction path in the
/// pipeline goes through checked() so the bound is asserted everywhere.
struct ProbabilityMap : Raster {
  ProbabilityMap() = default;

  static ProbabilityMap checked(Raster r) {
    for (double v : r.values) {
      if (!(v >= 0.0 && v <= 1.0))
        throw Error("ProbabilityMap: value " + std::to_string(v) + " outside [0,1]");
    }
    ProbabilityMap m;
    static_cast<Raster&>(m) = std::move(r);
    return m;
  }
};

}  // namespace motionbox
