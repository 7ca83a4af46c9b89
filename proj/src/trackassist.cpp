#include "motionbox/trackassist.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "motionbox/boxopt.hpp"
#include "motionbox/motion.hpp"

namespace motionbox::trackassist {

namespace {

constexpr double kContainSlack = 1e-6;

Box search_region_for(const Box& previousBox, int frameW, int frameH) {
  Box region{previousBox.x, previousBox.y, kSearchRegionScale * previousBox.w,
             kSearchRegionScale * previousBox.h};
  return clamp_box(region, frameW, frameH, 1.0);
}

Frame crop_frame(const Frame& frame, const PixelRect& rect) {
  if (rect.x0 < 0 || rect.y0 < 0 || rect.x1 > frame.width || rect.y1 > frame.height ||
      rect.area() <= 0) {
    throw Error("crop: rectangle outside frame");
  }
  Frame crop(rect.width(), rect.height());
  for (int y = rect.y0; y < rect.y1; ++y) {
    for (int x = rect.x0; x < rect.x1; ++x) {
      for (int c = 0; c < 3; ++c) {
        crop.at(x - rect.x0, y - rect.y0, c) = frame.at(x, y, c);
      }
    }
  }
  return crop;
}

std::vector<double> gray_crop(const Frame& frame, const PixelRect& rect) {
  std::vector<double> gray(static_cast<std::size_t>(rect.area()));
  std::size_t i = 0;
  for (int y = rect.y0; y < rect.y1; ++y) {
    for (int x = rect.x0; x < rect.x1; ++x) {
      gray[i++] = 0.299 * frame.at(x, y, 0) + 0.587 * frame.at(x, y, 1) +
                  0.114 * frame.at(x, y, 2);
    }
  }
  return gray;
}

bool box_inside(const Box& inner, const Box& outer, double slack) {
  return inner.left() >= outer.left() - slack && inner.right() <= outer.right() + slack &&
         inner.top() >= outer.top() - slack && inner.bottom() <= outer.bottom() + slack;
}

}  // namespace

AssistState make_state(const Frame& frame, const Box& previousBox, const DetectorConfig& cfg) {
  cfg.validate();
  if (previousBox.w <= 0.0 || previousBox.h <= 0.0) {
    throw Error("assist: previous box must have positive size");
  }
  const Box frameBox{frame.width / 2.0, frame.height / 2.0, static_cast<double>(frame.width),
                     static_cast<double>(frame.height)};
  if (!box_inside(previousBox, frameBox, kContainSlack)) {
    throw Error("assist: previous box must lie inside the frame");
  }

  AssistState state;
  state.previousBox = previousBox;
  state.searchRegion = search_region_for(previousBox, frame.width, frame.height);

  const PixelRect regionRect = box_to_rect(state.searchRegion);
  const Frame regionCrop = crop_frame(frame, regionRect);

  Box localPrev = previousBox;
  localPrev.x -= regionRect.x0;
  localPrev.y -= regionRect.y0;
  PixelRect prevRect = box_to_rect(localPrev);
  prevRect.x0 = std::clamp(prevRect.x0, 0, regionCrop.width);
  prevRect.x1 = std::clamp(prevRect.x1, 0, regionCrop.width);
  prevRect.y0 = std::clamp(prevRect.y0, 0, regionCrop.height);
  prevRect.y1 = std::clamp(prevRect.y1, 0, regionCrop.height);
  if (prevRect.area() <= 0) {
    throw Error("assist: previous box has no pixels inside the search region");
  }
  BinaryMask prevMask(regionCrop.width, regionCrop.height);
  for (int y = prevRect.y0; y < prevRect.y1; ++y) {
    for (int x = prevRect.x0; x < prevRect.x1; ++x) {
      prevMask.at(x, y) = 1;
    }
  }

  const appearance::ColorHistogram hFull = appearance::masked_histogram(regionCrop);
  const appearance::ColorHistogram hBox = appearance::masked_histogram(regionCrop, &prevMask);
  state.posterior = appearance::bayes_posterior(hBox, hFull);
  return state;
}

Box assist_refine(const Frame& frame1, const Frame& frame2, const AssistState& state,
                  const Box& trackerBox, const DetectorConfig& cfg,
                  const features::FeatureBackend* backend) {
  cfg.validate();
  if (frame1.width != frame2.width || frame1.height != frame2.height) {
    throw Error("assist: frames must share dimensions");
  }
  if (!box_inside(trackerBox, state.searchRegion, 1e-6)) {
    throw Error("assist: tracker box outside the search region");
  }

  const PixelRect regionRect = box_to_rect(state.searchRegion);
  if (trackerBox.w > regionRect.width() || trackerBox.h > regionRect.height()) {
    return trackerBox;  // no room to move; advisory passthrough
  }

  try {
    const Frame crop1 = crop_frame(frame1, regionRect);
    const Frame crop2 = crop_frame(frame2, regionRect);

    features::FeatureBackend rawBackend{
        features::FeatureBackendSpec{features::BackendKind::Raw, "", ""}};
    const features::FeatureBackend& be = backend != nullptr ? *backend : rawBackend;
    const motion::MotionExtraction ext = motion::extract_motion(crop1, crop2, be, cfg);
    if (ext.mask.nonZeroCount == 0) {
      return trackerBox;
    }

    const appearance::MotionCenter center = appearance::motion_center(ext.mask.frameMask);
    const ProbabilityMap colorMap = appearance::color_probability_map(crop2, state.posterior);
    const ProbabilityMap locationMap = appearance::location_probability_map(
        center, crop2.width, crop2.height, cfg.gaussianSigmaFraction);
    Raster product(crop2.width, crop2.height);
    for (std::size_t i = 0; i < product.values.size(); ++i) {
      product.values[i] = colorMap.values[i] * locationMap.values[i];
    }
    const boxopt::TargetMap target =
        boxopt::TargetMap::from(ProbabilityMap::checked(std::move(product)));

    Box init = trackerBox;
    init.x -= regionRect.x0;
    init.y -= regionRect.y0;
    init = clamp_box(init, crop2.width, crop2.height, 1.0);

    boxopt::OptimizeOptions options;
    options.freezeSize = true;
    const auto [local, trace] = boxopt::optimize_box(target, init, cfg, options);

    Box refined = trackerBox;
    refined.x = local.x + regionRect.x0;
    refined.y = local.y + regionRect.y0;
    // Exact containment in the real-valued region (the crop is its rounded
    // form and can stick out by up to half a pixel).
    refined.x = std::clamp(refined.x, state.searchRegion.left() + refined.w / 2.0,
                           state.searchRegion.right() - refined.w / 2.0);
    refined.y = std::clamp(refined.y, state.searchRegion.top() + refined.h / 2.0,
                           state.searchRegion.bottom() - refined.h / 2.0);
    return refined;
  } catch (const NoMotionError&) {
    return trackerBox;
  }
}

std::vector<Box> baseline_track(std::span<const Frame> frames, const Box& initBox, bool assist,
                                const DetectorConfig& cfg) {
  if (frames.empty()) {
    throw Error("track: no frames");
  }
  if (initBox.w <= 0.0 || initBox.h <= 0.0) {
    throw Error("track: initial box must have positive size");
  }
  const int W = frames[0].width;
  const int H = frames[0].height;

  std::vector<Box> boxes;
  boxes.reserve(frames.size());
  boxes.push_back(clamp_box(initBox, W, H, 1.0));

  for (std::size_t t = 1; t < frames.size(); ++t) {
    if (frames[t].width != W || frames[t].height != H) {
      throw Error("track: all frames must share dimensions");
    }
    const Box prev = boxes.back();
    const Box region = search_region_for(prev, W, H);
    const PixelRect searchRect = box_to_rect(region);

    PixelRect tmplRect = box_to_rect(prev);
    tmplRect.x0 = std::clamp(tmplRect.x0, 0, W - 1);
    tmplRect.y0 = std::clamp(tmplRect.y0, 0, H - 1);
    tmplRect.x1 = std::clamp(tmplRect.x1, tmplRect.x0 + 1, W);
    tmplRect.y1 = std::clamp(tmplRect.y1, tmplRect.y0 + 1, H);

    const std::vector<double> tmpl = gray_crop(frames[t - 1], tmplRect);
    const std::vector<double> search = gray_crop(frames[t], searchRect);
    const int tw = tmplRect.width();
    const int th = tmplRect.height();
    const int sw = searchRect.width();
    const int sh = searchRect.height();

    Box matched = prev;
    if (tw <= sw && th <= sh) {
      double tMean = 0.0;
      for (double v : tmpl) tMean += v;
      tMean /= static_cast<double>(tmpl.size());
      double tVar = 0.0;
      for (double v : tmpl) tVar += (v - tMean) * (v - tMean);

      double bestScore = -2.0;
      double bestDisp = 0.0;
      int bestDx = 0;
      int bestDy = 0;
      for (int dy = 0; dy + th <= sh; ++dy) {
        for (int dx = 0; dx + tw <= sw; ++dx) {
          double pMean = 0.0;
          for (int y = 0; y < th; ++y) {
            for (int x = 0; x < tw; ++x) {
              pMean += search[static_cast<std::size_t>(dy + y) * sw + (dx + x)];
            }
          }
          pMean /= static_cast<double>(tw) * th;
          double cross = 0.0;
          double pVar = 0.0;
          for (int y = 0; y < th; ++y) {
            for (int x = 0; x < tw; ++x) {
              const double p = search[static_cast<std::size_t>(dy + y) * sw + (dx + x)] - pMean;
              const double q = tmpl[static_cast<std::size_t>(y) * tw + x] - tMean;
              cross += p * q;
              pVar += p * p;
            }
          }
          const double denom = std::sqrt(tVar * pVar);
          const double score = denom > 1e-12 ? cross / denom : 0.0;
          const double cx = searchRect.x0 + dx + tw / 2.0;
          const double cy = searchRect.y0 + dy + th / 2.0;
          const double disp = (cx - prev.x) * (cx - prev.x) + (cy - prev.y) * (cy - prev.y);
          if (score > bestScore + 1e-12 ||
              (std::abs(score - bestScore) <= 1e-12 && disp < bestDisp - 1e-12)) {
            bestScore = score;
            bestDisp = disp;
            bestDx = dx;
            bestDy = dy;
          }
        }
      }
      matched.x = searchRect.x0 + bestDx + tw / 2.0;
      matched.y = searchRect.y0 + bestDy + th / 2.0;
      matched.x = std::clamp(matched.x, region.left() + matched.w / 2.0,
                             region.right() - matched.w / 2.0);
      matched.y = std::clamp(matched.y, region.top() + matched.h / 2.0,
                             region.bottom() - matched.h / 2.0);
    }

    if (assist) {
      AssistState state = make_state(frames[t - 1], prev, cfg);
      boxes.push_back(assist_refine(frames[t - 1], frames[t], state, matched, cfg));
    } else {
      boxes.push_back(matched);
    }
  }
  return boxes;
}

}  // namespace motionbox::trackassist
