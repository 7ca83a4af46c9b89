#pragma once

#include <span>
#include <vector>

#include "motionbox/appearance.hpp"
#include "motionbox/config.hpp"
#include "motionbox/features.hpp"
#include "motionbox/types.hpp"

namespace motionbox::trackassist {

/// How much larger than the previous box the search region is, per side.
inline constexpr double kSearchRegionScale = 2.5;

/// Per-frame assist context: where to look and what the target looked like.
/// The posterior compares the previous box's interior against the whole
/// search region, so it stays valid even when the motion mask is noisy.
struct AssistState {
  Box previousBox;
  Box searchRegion;
  appearance::ColorPosterior posterior;
};

/// Build the state from the frame the previous box was found in.
AssistState make_state(const Frame& frame, const Box& previousBox, const DetectorConfig& cfg);

/// Nudge the tracker's box toward the target probability mode inside the
/// search region. Position-only: the returned box keeps trackerBox's w and
/// h. When the region shows no motion the tracker box is returned unchanged.
/// The feature backend for the motion mask defaults to raw pixels.
Box assist_refine(const Frame& frame1, const Frame& frame2, const AssistState& state,
                  const Box& trackerBox, const DetectorConfig& cfg,
                  const features::FeatureBackend* backend = nullptr);

/// Template matcher used to demonstrate the assist: normalized
/// cross-correlation of the previous frame's box content over a search
/// region, fixed scale. With assist on, every match is refined.
std::vector<Box> baseline_track(std::span<const Frame> frames, const Box& initBox, bool assist,
                                const DetectorConfig& cfg);

}  // namespace motionbox::trackassist
