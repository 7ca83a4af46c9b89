#include "motionbox/boxopt.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>

#include "motionbox/resample.hpp"

namespace motionbox::boxopt {

namespace {

constexpr double kMinOptimizerSide = 4.0;
constexpr int kMinDetectSide = 32;
constexpr double kMaxStepScale = 8.0;
constexpr int kStepScaleRungs = 11;  // step scales 8, 4, ..., 1/128
constexpr double kMinAreaFraction = 0.45;

template <typename F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const NoMotionError&) {
    throw;
  } catch (const Error& e) {
    throw Error(std::string(name) + " stage: " + e.what());
  }
}

}  // namespace

Box initial_box(appearance::MotionCenter center, std::size_t nonZeroCount, int frameWidth,
                int frameHeight) {
  if (nonZeroCount == 0) {
    throw NoMotionError("no motion: moving area has zero pixels");
  }
  const double side = std::sqrt(2.0 * static_cast<double>(nonZeroCount));
  Box b{static_cast<double>(center.x), static_cast<double>(center.y), side, side};
  return clamp_box(b, frameWidth, frameHeight, 1.0);
}

double score_box(const TargetMap& target, const Box& box, double lambda) {
  const PixelRect rect = box_to_rect(box);
  const double sum = rect_sum(target.integral, rect);
  const double coverage = sum / static_cast<double>(rect.area());
  const double sizeReward =
      lambda * (box.w + box.h) / static_cast<double>(target.map.width + target.map.height);
  return coverage + sizeReward;
}

std::pair<Box, OptimizerTrace> optimize_box(const TargetMap& target, const Box& init,
                                            const DetectorConfig& cfg, OptimizeOptions options) {
  const int W = target.map.width;
  const int H = target.map.height;
  const double minSide = options.freezeSize ? 1.0 : kMinOptimizerSide;
  const double lambda = cfg.penaltyLambda;
  const double delta = cfg.perturbation;
  const double lr = cfg.learningRate;

  Box current = init;
  double currentScore = score_box(target, current, lambda);  // throws on degenerate init

  // The average-probability score keeps improving as the box shrinks onto the
  // densest pixels, so an unbounded search collapses to a sliver covering
  // part of the target. The seed area (2N) is the pipeline's scale estimate;
  // refusing to drop below a fraction of it keeps refinement at target scale.
  const double floorArea =
      options.freezeSize ? 0.0 : kMinAreaFraction * init.w * init.h;

  OptimizerTrace trace;
  trace.steps.push_back({0, current, currentScore});
  Box best = current;
  double bestScore = currentScore;

  const auto probe_score = [&](Box probe) {
    // Probes only need to stay inside the frame; the min-side rule applies to
    // accepted updates.
    probe = clamp_box(probe, W, H, 1.0);
    return score_box(target, probe, lambda);
  };

  const auto clamp_accept = [&](Box cand) {
    cand = clamp_box(cand, W, H, minSide);
    if (cand.w * cand.h < floorArea) {
      const double grow = std::sqrt(floorArea / (cand.w * cand.h));
      cand.w *= grow;
      cand.h *= grow;
      cand = clamp_box(cand, W, H, minSide);
    }
    return cand;
  };

  // Forward difference first; box edges move in half-pixel steps, so a +1
  // probe can round to the identical pixel rect and read exactly zero even
  // when the opposite direction improves. Fall back to the backward probe in
  // that case.
  const auto gradient = [&](double Box::* member) {
    Box fwd = current;
    fwd.*member += delta;
    const double g = (probe_score(fwd) - currentScore) / delta;
    if (g != 0.0) return g;
    Box bwd = current;
    bwd.*member -= delta;
    return (currentScore - probe_score(bwd)) / delta;
  };

  trace.terminationReason = TerminationReason::MaxIterations;
  for (int it = 1; it <= cfg.maxIterations; ++it) {
    const double gx = gradient(&Box::x);
    const double gy = gradient(&Box::y);
    const double gw = options.freezeSize ? 0.0 : gradient(&Box::w);
    const double gh = options.freezeSize ? 0.0 : gradient(&Box::h);

    // The raw lr-sized step is a poor fit for this landscape: box edges only
    // change the covered pixels when they cross a rounding boundary, so tiny
    // steps stall between boundaries and large ones jump far past the score
    // plateau. Probe the update direction over a ladder of step scales and
    // take the best-scoring candidate; ties go to the smallest move, which
    // lands the box on the plateau edge instead of deep inside it. Each
    // coordinate is also probed alone so that one misestimated component
    // cannot veto an otherwise improving step.
    Box next = current;
    double nextScore = -std::numeric_limits<double>::infinity();
    double nextMove = 0.0;
    const auto consider = [&](double sx, double sy, double sw, double sh) {
      Box cand = current;
      cand.x += sx;
      cand.y += sy;
      cand.w += sw;
      cand.h += sh;
      cand = clamp_accept(cand);
      const double candScore = score_box(target, cand, lambda);
      const double move = std::fabs(cand.x - current.x) + std::fabs(cand.y - current.y) +
                          std::fabs(cand.w - current.w) + std::fabs(cand.h - current.h);
      if (candScore > nextScore || (candScore == nextScore && move < nextMove)) {
        next = cand;
        nextScore = candScore;
        nextMove = move;
      }
    };
    double scale = kMaxStepScale;
    for (int rung = 0; rung < kStepScaleRungs; ++rung, scale *= 0.5) {
      const double sx = scale * lr * gx;
      const double sy = scale * lr * gy;
      const double sw = scale * lr * gw;
      const double sh = scale * lr * gh;
      consider(sx, sy, sw, sh);
      consider(sx, 0.0, 0.0, 0.0);
      consider(0.0, sy, 0.0, 0.0);
      consider(0.0, 0.0, sw, 0.0);
      consider(0.0, 0.0, 0.0, sh);
    }
    if (nextScore <= currentScore) {
      // No scaled step beats staying put: the box is unchanged this
      // iteration, which is the stopping condition.
      trace.terminationReason = TerminationReason::Converged;
      break;
    }

    trace.steps.push_back({it, next, nextScore});
    trace.iterations = it;
    if (nextScore > bestScore) {
      best = next;
      bestScore = nextScore;
    }
    current = next;
    currentScore = nextScore;
  }
  return {best, trace};
}

Detection detect_with_options(const Frame& frame1, const Frame& frame2,
                              std::span<const features::FeatureBackend> backends,
                              const DetectorConfig& cfg, const PipelineOptions& options) {
  cfg.validate();
  if (backends.empty()) {
    throw Error("detect: need at least one feature backend");
  }
  if (frame1.width != frame2.width || frame1.height != frame2.height) {
    throw Error("detect: frames must share dimensions");
  }
  if (frame1.width < kMinDetectSide || frame1.height < kMinDetectSide) {
    throw Error("detect: frames must be at least " + std::to_string(kMinDetectSide) +
                " px per side");
  }
  const int W = frame1.width;
  const int H = frame1.height;

  Detection det;
  Diagnostics& diag = det.diagnostics;

  stage("motion", [&] {
    if (backends.size() == 1) {
      motion::MotionExtraction ext = motion::extract_motion(frame1, frame2, backends[0], cfg);
      diag.difference = std::move(ext.difference);
      diag.mask = std::move(ext.mask);
    } else {
      std::vector<motion::MotionMask> masks;
      masks.reserve(backends.size());
      for (const features::FeatureBackend& backend : backends) {
        masks.push_back(motion::extract_motion(frame1, frame2, backend, cfg).mask);
      }
      diag.mask = motion::fuse_masks(masks);
    }
    if (diag.mask.nonZeroCount == 0) {
      throw NoMotionError();
    }
    return 0;
  });

  stage("center", [&] {
    diag.center = appearance::motion_center(diag.mask.frameMask);
    return 0;
  });

  stage("appearance", [&] {
    if (options.useColorPosterior) {
      const appearance::ColorHistogram hFull = appearance::masked_histogram(frame2);
      const appearance::ColorHistogram hMoving =
          appearance::masked_histogram(frame2, &diag.mask.frameMask);
      diag.posterior = appearance::bayes_posterior(hMoving, hFull);
      diag.colorMap = appearance::color_probability_map(frame2, diag.posterior);
    }
    if (options.useLocationPrior) {
      diag.locationMap =
          appearance::location_probability_map(diag.center, W, H, cfg.gaussianSigmaFraction);
    }
    return 0;
  });

  stage("target", [&] {
    if (options.useColorPosterior && options.useLocationPrior) {
      Raster product(W, H);
      for (std::size_t i = 0; i < product.values.size(); ++i) {
        product.values[i] = diag.colorMap.values[i] * diag.locationMap.values[i];
      }
      diag.targetMap = ProbabilityMap::checked(std::move(product));
    } else if (options.useColorPosterior) {
      diag.targetMap = diag.colorMap;
    } else if (options.useLocationPrior) {
      // Difference-driven target: the normalized upsampled difference stands
      // in for the color term.
      if (backends.size() != 1) {
        throw Error("difference-driven target needs a single feature backend");
      }
      Raster up = (diag.difference.width == W && diag.difference.height == H)
                      ? static_cast<const Raster&>(diag.difference)
                      : bicubic_resize(diag.difference, W, H);
      double maxVal = 0.0;
      for (double& v : up.values) {
        v = std::max(v, 0.0);
        maxVal = std::max(maxVal, v);
      }
      if (maxVal <= 0.0) {
        throw NoMotionError("no motion: difference map is all zero");
      }
      Raster product(W, H);
      for (std::size_t i = 0; i < product.values.size(); ++i) {
        product.values[i] = up.values[i] / maxVal * diag.locationMap.values[i];
      }
      diag.targetMap = ProbabilityMap::checked(std::move(product));
    } else {
      Raster asMap(W, H);
      for (std::size_t i = 0; i < asMap.values.size(); ++i) {
        asMap.values[i] = static_cast<double>(diag.mask.frameMask.values[i]);
      }
      diag.targetMap = ProbabilityMap::checked(std::move(asMap));
    }
    return 0;
  });

  diag.initialBox = stage("seed", [&] {
    return initial_box(diag.center, diag.mask.nonZeroCount, W, H);
  });

  return stage("optimize", [&] {
    TargetMap target = TargetMap::from(diag.targetMap);
    if (options.useOptimizer) {
      auto [box, trace] = optimize_box(target, diag.initialBox, cfg);
      det.box = box;
      det.score = score_box(target, box, cfg.penaltyLambda);
      diag.trace = std::move(trace);
    } else {
      det.box = diag.initialBox;
      det.score = score_box(target, det.box, cfg.penaltyLambda);
      diag.trace.iterations = 0;
      diag.trace.terminationReason = TerminationReason::Converged;
      diag.trace.steps.push_back({0, det.box, det.score});
    }
    return std::move(det);
  });
}

Detection detect(const Frame& frame1, const Frame& frame2,
                 const features::FeatureBackend& backend, const DetectorConfig& cfg) {
  return detect_with_options(frame1, frame2, std::span<const features::FeatureBackend>(&backend, 1),
                             cfg, PipelineOptions{});
}

Detection detect(const Frame& frame1, const Frame& frame2,
                 const features::FeatureBackendSpec& spec, const DetectorConfig& cfg) {
  features::FeatureBackend backend(spec);
  return detect(frame1, frame2, backend, cfg);
}

}  // namespace motionbox::boxopt
