#pragma once

#include "motionbox/types.hpp"

namespace motionbox {

/// Cubic (Catmull-Rom, a = -0.5) resampling of a scalar raster. Pixel centers
/// are aligned between the two grids and the continuous source coordinate is
/// clamped to the valid range, so constants are preserved exactly and corner
/// samples land on the source corners. Interior overshoot is NOT clamped
/// here; callers that need a bounded result clamp afterwards.
Raster bicubic_resize(const Raster& src, int dstWidth, int dstHeight);

}  // namespace motionbox
