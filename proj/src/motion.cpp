#include "motionbox/motion.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>

#include "motionbox/resample.hpp"

namespace motionbox::motion {

DifferenceMap feature_difference(const features::FeatureMap& f1, const features::FeatureMap& f2) {
  if (!f1.same_shape(f2)) {
    throw Error("feature difference: shape mismatch between frame features");
  }
  Raster out(f1.width, f1.height);
  const std::size_t cells = static_cast<std::size_t>(f1.width) * f1.height;
  const int channels = f1.channels;
  for (std::size_t i = 0; i < cells; ++i) {
    double acc = 0.0;
    const std::size_t base = i * channels;
    for (int c = 0; c < channels; ++c) {
      acc += std::abs(static_cast<double>(f1.values[base + c]) - f2.values[base + c]);
    }
    out.values[i] = acc;
  }
  return DifferenceMap(std::move(out));
}

BinaryMask binarize(const DifferenceMap& diff, double ratio) {
  if (!(ratio > 0.0 && ratio < 1.0)) {
    throw Error("binarize: ratio must lie in (0, 1)");
  }
  BinaryMask mask(diff.width, diff.height);
  const double maxVal = diff.max_value();
  if (maxVal <= 0.0) {
    return mask;  // all zero
  }
  const double threshold = ratio * maxVal;
  for (std::size_t i = 0; i < diff.values.size(); ++i) {
    mask.values[i] = diff.values[i] >= threshold ? 1 : 0;
  }
  return mask;
}

BinaryMask upsample_mask(const BinaryMask& mask, int dstWidth, int dstHeight, double threshold) {
  Raster src(mask.width, mask.height);
  for (std::size_t i = 0; i < mask.values.size(); ++i) {
    src.values[i] = static_cast<double>(mask.values[i]);
  }
  Raster up = bicubic_resize(src, dstWidth, dstHeight);
  BinaryMask out(dstWidth, dstHeight);
  for (std::size_t i = 0; i < up.values.size(); ++i) {
    const double v = std::clamp(up.values[i], 0.0, 1.0);
    out.values[i] = v >= threshold ? 1 : 0;
  }
  return out;
}

MotionExtraction extract_motion(const Frame& frame1, const Frame& frame2,
                                const features::FeatureBackend& backend,
                                const DetectorConfig& cfg) {
  if (frame1.width != frame2.width || frame1.height != frame2.height) {
    throw Error("motion: frames must share dimensions");
  }
  const features::FeatureMap f1 = backend.extract(frame1);
  const features::FeatureMap f2 = backend.extract(frame2);
  MotionExtraction result;
  result.difference = feature_difference(f1, f2);
  result.mask.featureMask = binarize(result.difference, cfg.binarizationRatio);
  if (result.mask.featureMask.width == frame1.width &&
      result.mask.featureMask.height == frame1.height) {
    result.mask.frameMask = result.mask.featureMask;
  } else {
    result.mask.frameMask = upsample_mask(result.mask.featureMask, frame1.width, frame1.height,
                                          cfg.upsampleRebinarizeThreshold);
  }
  result.mask.nonZeroCount = result.mask.frameMask.count_set();
  return result;
}

MotionMask extract_motion_mask(const Frame& frame1, const Frame& frame2,
                               const features::FeatureBackendSpec& spec,
                               const DetectorConfig& cfg) {
  features::FeatureBackend backend(spec);
  return extract_motion(frame1, frame2, backend, cfg).mask;
}

MotionMask fuse_masks(std::span<const MotionMask> masks) {
  if (masks.empty()) {
    throw Error("mask fusion: need at least one mask");
  }
  const int w = masks[0].frameMask.width;
  const int h = masks[0].frameMask.height;
  BinaryMask fused(w, h);
  for (const MotionMask& m : masks) {
    if (m.frameMask.width != w || m.frameMask.height != h) {
      throw Error("mask fusion: masks must share frame dimensions");
    }
    for (std::size_t i = 0; i < fused.values.size(); ++i) {
      fused.values[i] = fused.values[i] | m.frameMask.values[i];
    }
  }
  MotionMask out;
  out.featureMask = fused;
  out.frameMask = std::move(fused);
  out.nonZeroCount = out.frameMask.count_set();
  return out;
}

}  // namespace motionbox::motion
