#include "motionbox/resample.hpp"

#include <cmath>

namespace motionbox {

namespace {

// Catmull-Rom weights for the four taps around a sample at fractional offset
// t in [0,1) from tap p1: taps (p0, p1, p2, p3).
inline void cubic_weights(double t, double w[4]) {
  const double t2 = t * t;
  const double t3 = t2 * t;
  w[0] = -0.5 * t + t2 - 0.5 * t3;
  w[1] = 1.0 - 2.5 * t2 + 1.5 * t3;
  w[2] = 0.5 * t + 2.0 * t2 - 1.5 * t3;
  w[3] = -0.5 * t2 + 0.5 * t3;
}

inline int clamp_index(int i, int n) { return i < 0 ? 0 : (i >= n ? n - 1 : i); }

}  // namespace

Raster bicubic_resize(const Raster& src, int dstWidth, int dstHeight) {
  if (src.width <= 0 || src.height <= 0 || src.values.empty())
    throw Error("bicubic_resize: empty source");
  if (dstWidth <= 0 || dstHeight <= 0)
    throw Error("bicubic_resize: destination dimensions must be >= 1");

  // Horizontal pass into a src.height x dstWidth intermediate, then vertical.
  const double sx = static_cast<double>(src.width) / dstWidth;
  const double sy = static_cast<double>(src.height) / dstHeight;

  Raster mid(dstWidth, src.height);
  for (int dx = 0; dx < dstWidth; ++dx) {
    double fx = (dx + 0.5) * sx - 0.5;
    fx = std::clamp(fx, 0.0, static_cast<double>(src.width - 1));
    const int ix = static_cast<int>(std::floor(fx));
    const double t = fx - ix;
    double w[4];
    cubic_weights(t, w);
    int taps[4];
    for (int k = 0; k < 4; ++k) taps[k] = clamp_index(ix - 1 + k, src.width);
    for (int y = 0; y < src.height; ++y) {
      double acc = 0.0;
      for (int k = 0; k < 4; ++k) acc += w[k] * src.at(taps[k], y);
      mid.at(dx, y) = acc;
    }
  }

  Raster out(dstWidth, dstHeight);
  for (int dy = 0; dy < dstHeight; ++dy) {
    double fy = (dy + 0.5) * sy - 0.5;
    fy = std::clamp(fy, 0.0, static_cast<double>(src.height - 1));
    const int iy = static_cast<int>(std::floor(fy));
    const double t = fy - iy;
    double w[4];
    cubic_weights(t, w);
    int taps[4];
    for (int k = 0; k < 4; ++k) taps[k] = clamp_index(iy - 1 + k, src.height);
    for (int dx = 0; dx < dstWidth; ++dx) {
      double acc = 0.0;
      for (int k = 0; k < 4; ++k) acc += w[k] * mid.at(dx, taps[k]);
      out.at(dx, dy) = acc;
    }
  }
  return out;
}

}  // namespace motionbox
