#pragma once

#include <span>

#include "motionbox/config.hpp"
#include "motionbox/features.hpp"
#include "motionbox/types.hpp"

namespace motionbox::motion {

/// Channel-accumulated feature difference, one non-negative scalar per cell.
struct DifferenceMap : Raster {
  DifferenceMap() = default;
  explicit DifferenceMap(Raster r) { static_cast<Raster&>(*this) = std::move(r); }
};

/// Binarized moving area at feature resolution plus its upsampled
/// frame-resolution form.
struct MotionMask {
  BinaryMask featureMask;
  BinaryMask frameMask;
  std::size_t nonZeroCount = 0;  // set pixels of frameMask
};

/// Per-cell sum of absolute channel differences. Absolute accumulation keeps
/// the map symmetric in the two frames and non-negative.
DifferenceMap feature_difference(const features::FeatureMap& f1, const features::FeatureMap& f2);

/// Threshold at ratio x max(diff), comparison >=, so the maximum cell is
/// always set when any difference exists. An all-zero map stays all-zero.
BinaryMask binarize(const DifferenceMap& diff, double ratio);

/// Cubic upsampling of a binary mask with clamping to [0,1] and a mid-level
/// re-binarization that restores the indicator property.
BinaryMask upsample_mask(const BinaryMask& mask, int dstWidth, int dstHeight, double threshold);

struct MotionExtraction {
  DifferenceMap difference;  // feature-resolution
  MotionMask mask;
};

/// STEP1 composition: extract features from both frames with one backend,
/// difference, binarize, upsample to frame resolution.
MotionExtraction extract_motion(const Frame& frame1, const Frame& frame2,
                                const features::FeatureBackend& backend,
                                const DetectorConfig& cfg);

MotionMask extract_motion_mask(const Frame& frame1, const Frame& frame2,
                               const features::FeatureBackendSpec& spec,
                               const DetectorConfig& cfg);

/// Pixelwise OR of frame-resolution masks (multi-feature fusion). All masks
/// must share dimensions; the fused featureMask is the frame-resolution mask.
MotionMask fuse_masks(std::span<const MotionMask> masks);

}  // namespace motionbox::motion
