#pragma once

#include "motionbox/types.hpp"

namespace motionbox {

/// Summed-area table. Entry (row i, col j) holds the sum of map values over
/// all pixels with row < i and column < j, so row 0 and column 0 are zero and
/// rectangle sums reduce to four lookups.
struct IntegralImage {
  int width = 0;   // source map width
  int height = 0;  // source map height
  std::vector<double> sums;  // (height+1) x (width+1)

  double at(int row, int col) const {
    return sums[static_cast<std::size_t>(row) * (width + 1) + col];
  }
};

IntegralImage integral_image(const Raster& map);

/// Sum over a discrete pixel rectangle. The rect must lie within the map
/// bounds and have positive area.
double rect_sum(const IntegralImage& integral, const PixelRect& rect);

/// Sum of map values over the pixel set covered by the rounded box.
/// Out-of-bounds and degenerate (zero rounded area) boxes are errors; callers
/// clamp first.
double box_sum(const IntegralImage& integral, const Box& box);

}  // namespace motionbox
