#include "motionbox/integral.hpp"

#include <cmath>

namespace motionbox {

IntegralImage integral_image(const Raster& map) {
  for (double v : map.values) {
    if (!std::isfinite(v)) throw Error("integral_image: non-finite map value");
  }
  IntegralImage out;
  out.width = map.width;
  out.height = map.height;
  out.sums.assign(static_cast<std::size_t>(map.height + 1) * (map.width + 1), 0.0);
  const int w1 = map.width + 1;
  for (int y = 0; y < map.height; ++y) {
    double rowAcc = 0.0;
    for (int x = 0; x < map.width; ++x) {
      rowAcc += map.at(x, y);
      out.sums[static_cast<std::size_t>(y + 1) * w1 + (x + 1)] =
          out.sums[static_cast<std::size_t>(y) * w1 + (x + 1)] + rowAcc;
    }
  }
  return out;
}

double rect_sum(const IntegralImage& integral, const PixelRect& rect) {
  if (rect.x0 < 0 || rect.y0 < 0 || rect.x1 > integral.width || rect.y1 > integral.height)
    throw Error("rect_sum: rectangle out of bounds, clamp the box first");
  if (rect.width() <= 0 || rect.height() <= 0)
    throw Error("rect_sum: degenerate rectangle");
  return integral.at(rect.y1, rect.x1) - integral.at(rect.y0, rect.x1) -
         integral.at(rect.y1, rect.x0) + integral.at(rect.y0, rect.x0);
}

double box_sum(const IntegralImage& integral, const Box& box) {
  return rect_sum(integral, box_to_rect(box));
}

}  // namespace motionbox
