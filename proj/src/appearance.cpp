#include "motionbox/appearance.hpp"

#include <cmath>
#include <cstddef>

namespace motionbox::appearance {

int color_bin(std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  return (r / kBinsPerChannel) * kBinsPerChannel * kBinsPerChannel +
         (g / kBinsPerChannel) * kBinsPerChannel + (b / kBinsPerChannel);
}

ColorHistogram masked_histogram(const Frame& frame, const BinaryMask* mask) {
  if (mask != nullptr && (mask->width != frame.width || mask->height != frame.height)) {
    throw Error("histogram: mask dimensions do not match frame");
  }
  ColorHistogram hist;
  for (int y = 0; y < frame.height; ++y) {
    for (int x = 0; x < frame.width; ++x) {
      if (mask != nullptr && mask->at(x, y) == 0) {
        continue;
      }
      const int bin = color_bin(frame.at(x, y, 0), frame.at(x, y, 1), frame.at(x, y, 2));
      hist.bins[static_cast<std::size_t>(bin)] += 1.0;
      hist.total += 1.0;
    }
  }
  return hist;
}

ColorPosterior bayes_posterior(const ColorHistogram& hMoving, const ColorHistogram& hFull) {
  if (hFull.total <= 0.0) {
    throw Error("color posterior: full-frame histogram is empty");
  }
  if (hMoving.total <= 0.0) {
    throw NoMotionError("no motion: moving-area histogram is empty");
  }
  ColorPosterior posterior;
  posterior.pMovingArea = hMoving.total / hFull.total;
  for (int c = 0; c < kHistogramSize; ++c) {
    const double full = hFull.bins[static_cast<std::size_t>(c)];
    const double moving = hMoving.bins[static_cast<std::size_t>(c)];
    if (moving > full) {
      throw Error("color posterior: moving-area count exceeds full-frame count");
    }
    if (full <= 0.0) {
      continue;  // color never seen, probability stays 0
    }
    posterior.probability[static_cast<std::size_t>(c)] = moving / full;
  }
  return posterior;
}

ProbabilityMap color_probability_map(const Frame& frame, const ColorPosterior& posterior) {
  Raster map(frame.width, frame.height);
  for (int y = 0; y < frame.height; ++y) {
    for (int x = 0; x < frame.width; ++x) {
      const int bin = color_bin(frame.at(x, y, 0), frame.at(x, y, 1), frame.at(x, y, 2));
      map.at(x, y) = posterior.probability[static_cast<std::size_t>(bin)];
    }
  }
  return ProbabilityMap::checked(std::move(map));
}

BinaryMask erode_cross(const BinaryMask& mask) {
  BinaryMask out(mask.width, mask.height);
  const auto bit = [&](int x, int y) -> std::uint8_t {
    if (x < 0 || y < 0 || x >= mask.width || y >= mask.height) {
      return 0;
    }
    return mask.at(x, y);
  };
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      out.at(x, y) = (bit(x, y) && bit(x - 1, y) && bit(x + 1, y) && bit(x, y - 1) &&
                      bit(x, y + 1))
                         ? 1
                         : 0;
    }
  }
  return out;
}

namespace {

MotionCenter rounded_centroid(const BinaryMask& mask) {
  double sx = 0.0;
  double sy = 0.0;
  double n = 0.0;
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (mask.at(x, y)) {
        sx += x;
        sy += y;
        n += 1.0;
      }
    }
  }
  MotionCenter c;
  c.x = static_cast<int>(std::llround(sx / n));
  c.y = static_cast<int>(std::llround(sy / n));
  return c;
}

MotionCenter sole_pixel(const BinaryMask& mask) {
  for (int y = 0; y < mask.height; ++y) {
    for (int x = 0; x < mask.width; ++x) {
      if (mask.at(x, y)) {
        return {x, y};
      }
    }
  }
  throw Error("motion center: expected exactly one set pixel");
}

}  // namespace

MotionCenter motion_center(const BinaryMask& mask) {
  if (mask.count_set() == 0) {
    throw NoMotionError("no motion: mask is empty");
  }
  BinaryMask current = mask;
  while (true) {
    if (current.count_set() == 1) {
      return sole_pixel(current);
    }
    BinaryMask next = erode_cross(current);
    const std::size_t n = next.count_set();
    if (n == 0) {
      return rounded_centroid(current);
    }
    current = std::move(next);
  }
}

ProbabilityMap location_probability_map(MotionCenter center, int width, int height,
                                        double sigmaFraction) {
  if (width <= 0 || height <= 0) {
    throw Error("location map: dimensions must be positive");
  }
  if (!(sigmaFraction > 0.0)) {
    throw Error("location map: sigma fraction must be positive");
  }
  const double sigmaX = sigmaFraction * width;
  const double sigmaY = sigmaFraction * height;
  const double invVarX = 1.0 / (2.0 * sigmaX * sigmaX);
  const double invVarY = 1.0 / (2.0 * sigmaY * sigmaY);
  Raster map(width, height);
  for (int y = 0; y < height; ++y) {
    const double dy = static_cast<double>(y) - center.y;
    const double ey = dy * dy * invVarY;
    for (int x = 0; x < width; ++x) {
      const double dx = static_cast<double>(x) - center.x;
      map.at(x, y) = std::exp(-(dx * dx * invVarX + ey));
    }
  }
  return ProbabilityMap::checked(std::move(map));
}

}  // namespace motionbox::appearance
