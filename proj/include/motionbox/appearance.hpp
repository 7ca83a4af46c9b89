#pragma once

#include <vector>

#include "motionbox/types.hpp"

namespace motionbox::appearance {

inline constexpr int kBinsPerChannel = 16;
inline constexpr int kHistogramSize = kBinsPerChannel * kBinsPerChannel * kBinsPerChannel;

/// Quantized RGB occupancy counts. Counts are integral but stored as doubles
/// because every consumer divides them.
struct ColorHistogram {
  std::vector<double> bins = std::vector<double>(kHistogramSize, 0.0);
  double total = 0.0;
};

/// Bin index for an RGB triple: 16x16x16 cube, R major.
int color_bin(std::uint8_t r, std::uint8_t g, std::uint8_t b);

/// Histogram over the whole frame, or over the pixels set in `mask` when one
/// is given. Mask dimensions must match the frame.
ColorHistogram masked_histogram(const Frame& frame, const BinaryMask* mask = nullptr);

/// Per-bin probability that a pixel of that color belongs to the moving
/// area. pMovingArea is the mask occupancy used as the prior.
struct ColorPosterior {
  std::vector<double> probability = std::vector<double>(kHistogramSize, 0.0);
  double pMovingArea = 0.0;
};

/// Posterior from the moving-area histogram and the full-frame histogram.
/// With the prior taken as hMoving.total / hFull.total, the posterior
/// reduces to the per-bin count ratio. Bins absent from the full frame get
/// probability zero. Throws NoMotionError when hMoving is empty.
ColorPosterior bayes_posterior(const ColorHistogram& hMoving, const ColorHistogram& hFull);

/// Back-projection: each pixel gets the posterior of its color bin.
ProbabilityMap color_probability_map(const Frame& frame, const ColorPosterior& posterior);

struct MotionCenter {
  int x = 0;
  int y = 0;
};

/// One erosion step with a 3x3 cross element and zero padding, so border
/// pixels never survive and the mask strictly shrinks.
BinaryMask erode_cross(const BinaryMask& mask);

/// Repeated erosion until a single pixel remains; if a step empties the mask
/// instead, the rounded centroid of the last non-empty mask is used.
MotionCenter motion_center(const BinaryMask& mask);

/// Axis-aligned Gaussian bump centered on (center.x, center.y) with
/// sigmaX = sigmaFraction * width and sigmaY = sigmaFraction * height.
/// Unnormalized: the peak value is exactly 1.
ProbabilityMap location_probability_map(MotionCenter center, int width, int height,
                                        double sigmaFraction);

}  // namespace motionbox::appearance
