#pragma once

#include <span>
#include <utility>
#include <vector>

#include "motionbox/appearance.hpp"
#include "motionbox/config.hpp"
#include "motionbox/features.hpp"
#include "motionbox/integral.hpp"
#include "motionbox/motion.hpp"
#include "motionbox/types.hpp"

namespace motionbox::boxopt {

/// Score surface plus its integral image so box sums are O(1).
struct TargetMap {
  ProbabilityMap map;
  IntegralImage integral;

  static TargetMap from(ProbabilityMap m) {
    TargetMap t;
    t.integral = integral_image(m);
    t.map = std::move(m);
    return t;
  }
};

enum class TerminationReason { Converged, MaxIterations };

struct TraceEntry {
  int iteration = 0;  // 0 is the initial box
  Box box;
  double score = 0.0;
};

struct OptimizerTrace {
  int iterations = 0;  // update steps performed
  TerminationReason terminationReason = TerminationReason::Converged;
  std::vector<TraceEntry> steps;
};

/// Square seed box at the motion center sized sqrt(2 * nonZeroCount) per
/// side, clamped into the frame.
Box initial_box(appearance::MotionCenter center, std::size_t nonZeroCount, int frameWidth,
                int frameHeight);

/// Mean target value inside the rounded box plus a perimeter reward
/// lambda * (w + h) / (W + H) on the real-valued extents.
double score_box(const TargetMap& target, const Box& box, double lambda);

struct OptimizeOptions {
  bool freezeSize = false;  // adjust position only, keep w and h fixed
};

/// Finite-difference ascent on (x, y, w, h): every coordinate is probed with
/// a forward difference from the same base score and all four move together.
/// Stops when an update leaves the rounded box unchanged, or after
/// cfg.maxIterations. Returns the best-scoring box visited.
std::pair<Box, OptimizerTrace> optimize_box(const TargetMap& target, const Box& init,
                                            const DetectorConfig& cfg,
                                            OptimizeOptions options = {});

/// Which pipeline stages participate; all on is the full detector.
struct PipelineOptions {
  bool useColorPosterior = true;  // color probability from Bayes back-projection
  bool useLocationPrior = true;   // Gaussian bump at the motion center
  bool useOptimizer = true;       // refine the seed box by score ascent
};

/// Everything the pipeline computed, for dumps and ablation checks. Maps a
/// disabled stage never builds are left empty.
struct Diagnostics {
  motion::DifferenceMap difference;
  motion::MotionMask mask;
  appearance::MotionCenter center;
  appearance::ColorPosterior posterior;
  ProbabilityMap colorMap;
  ProbabilityMap locationMap;
  ProbabilityMap targetMap;
  Box initialBox;
  OptimizerTrace trace;
};

struct Detection {
  Box box;
  double score = 0.0;
  Diagnostics diagnostics;
};

/// Full pipeline with one feature backend.
Detection detect(const Frame& frame1, const Frame& frame2,
                 const features::FeatureBackend& backend, const DetectorConfig& cfg);

Detection detect(const Frame& frame1, const Frame& frame2,
                 const features::FeatureBackendSpec& spec, const DetectorConfig& cfg);

/// Pipeline with stage toggles and optional multi-backend mask fusion.
/// With several backends the motion masks are OR-fused at frame resolution;
/// a raw-difference target (location prior without the color term) needs a
/// single backend because it reuses the difference map directly.
Detection detect_with_options(const Frame& frame1, const Frame& frame2,
                              std::span<const features::FeatureBackend> backends,
                              const DetectorConfig& cfg, const PipelineOptions& options);

}  // namespace motionbox::boxopt
