#pragma once

#include <string>

#include "motionbox/types.hpp"

namespace motionbox::imageio {

/// Decode a PNG or JPEG file (detected from the file's magic bytes) to an
/// 8-bit RGB frame. Grayscale images are replicated to three channels;
/// alpha is dropped. Frames smaller than 32 x 32 are rejected, the minimum
/// for stride-16 feature grids to be non-degenerate.
Frame load_frame(const std::string& path);

/// Minimum side length enforced by load_frame.
inline constexpr int kMinFrameSide = 32;

void save_png(const std::string& path, const Frame& frame);

/// Write a scalar raster as 8-bit grayscale; values are clamped to [0,1] and
/// scaled to 0..255. Used by the --dump-masks / --dump-maps debug flags.
void save_png_gray(const std::string& path, const Raster& raster);
void save_png_gray(const std::string& path, const BinaryMask& mask);

void save_jpeg(const std::string& path, const Frame& frame, int quality = 95);

}  // namespace motionbox::imageio
