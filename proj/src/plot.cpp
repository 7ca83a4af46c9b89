#include "motionbox/plot.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <cstdio>

#include "motionbox/imageio.hpp"

namespace motionbox::plot {

namespace {

// 5x7 glyphs, one byte per row, bit 4 is the leftmost column.
struct Glyph {
  char ch;
  std::array<std::uint8_t, 7> rows;
};

constexpr Glyph kFont[] = {
    {'0', {0x0E, 0x11, 0x13, 0x15, 0x19, 0x11, 0x0E}},
    {'1', {0x04, 0x0C, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'2', {0x0E, 0x11, 0x01, 0x02, 0x04, 0x08, 0x1F}},
    {'3', {0x1F, 0x02, 0x04, 0x02, 0x01, 0x11, 0x0E}},
    {'4', {0x02, 0x06, 0x0A, 0x12, 0x1F, 0x02, 0x02}},
    {'5', {0x1F, 0x10, 0x1E, 0x01, 0x01, 0x11, 0x0E}},
    {'6', {0x06, 0x08, 0x10, 0x1E, 0x11, 0x11, 0x0E}},
    {'7', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x08, 0x08}},
    {'8', {0x0E, 0x11, 0x11, 0x0E, 0x11, 0x11, 0x0E}},
    {'9', {0x0E, 0x11, 0x11, 0x0F, 0x01, 0x02, 0x0C}},
    {'A', {0x0E, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
    {'B', {0x1E, 0x11, 0x11, 0x1E, 0x11, 0x11, 0x1E}},
    {'C', {0x0E, 0x11, 0x10, 0x10, 0x10, 0x11, 0x0E}},
    {'D', {0x1C, 0x12, 0x11, 0x11, 0x11, 0x12, 0x1C}},
    {'E', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x1F}},
    {'F', {0x1F, 0x10, 0x10, 0x1E, 0x10, 0x10, 0x10}},
    {'G', {0x0E, 0x11, 0x10, 0x17, 0x11, 0x11, 0x0F}},
    {'H', {0x11, 0x11, 0x11, 0x1F, 0x11, 0x11, 0x11}},
    {'I', {0x0E, 0x04, 0x04, 0x04, 0x04, 0x04, 0x0E}},
    {'J', {0x07, 0x02, 0x02, 0x02, 0x02, 0x12, 0x0C}},
    {'K', {0x11, 0x12, 0x14, 0x18, 0x14, 0x12, 0x11}},
    {'L', {0x10, 0x10, 0x10, 0x10, 0x10, 0x10, 0x1F}},
    {'M', {0x11, 0x1B, 0x15, 0x15, 0x11, 0x11, 0x11}},
    {'N', {0x11, 0x19, 0x15, 0x13, 0x11, 0x11, 0x11}},
    {'O', {0x0E, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}},
    {'P', {0x1E, 0x11, 0x11, 0x1E, 0x10, 0x10, 0x10}},
    {'Q', {0x0E, 0x11, 0x11, 0x11, 0x15, 0x12, 0x0D}},
    {'R', {0x1E, 0x11, 0x11, 0x1E, 0x14, 0x12, 0x11}},
    {'S', {0x0F, 0x10, 0x10, 0x0E, 0x01, 0x01, 0x1E}},
    {'T', {0x1F, 0x04, 0x04, 0x04, 0x04, 0x04, 0x04}},
    {'U', {0x11, 0x11, 0x11, 0x11, 0x11, 0x11, 0x0E}},
    {'V', {0x11, 0x11, 0x11, 0x11, 0x11, 0x0A, 0x04}},
    {'W', {0x11, 0x11, 0x11, 0x15, 0x15, 0x1B, 0x11}},
    {'X', {0x11, 0x11, 0x0A, 0x04, 0x0A, 0x11, 0x11}},
    {'Y', {0x11, 0x11, 0x0A, 0x04, 0x04, 0x04, 0x04}},
    {'Z', {0x1F, 0x01, 0x02, 0x04, 0x08, 0x10, 0x1F}},
    {'.', {0x00, 0x00, 0x00, 0x00, 0x00, 0x0C, 0x0C}},
    {',', {0x00, 0x00, 0x00, 0x00, 0x0C, 0x04, 0x08}},
    {'-', {0x00, 0x00, 0x00, 0x1F, 0x00, 0x00, 0x00}},
    {':', {0x00, 0x0C, 0x0C, 0x00, 0x0C, 0x0C, 0x00}},
    {'(', {0x02, 0x04, 0x08, 0x08, 0x08, 0x04, 0x02}},
    {')', {0x08, 0x04, 0x02, 0x02, 0x02, 0x04, 0x08}},
    {'/', {0x01, 0x01, 0x02, 0x04, 0x08, 0x10, 0x10}},
    {'%', {0x19, 0x19, 0x02, 0x04, 0x08, 0x13, 0x13}},
    {'=', {0x00, 0x1F, 0x00, 0x1F, 0x00, 0x00, 0x00}},
    {'+', {0x00, 0x04, 0x04, 0x1F, 0x04, 0x04, 0x00}},
    {'_', {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x1F}},
    {' ', {0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00}},
};

const Glyph* find_glyph(char c) {
  for (const Glyph& g : kFont) {
    if (g.ch == c) {
      return &g;
    }
  }
  return nullptr;
}

void put_pixel(Frame& frame, int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  if (x >= 0 && y >= 0 && x < frame.width && y < frame.height) {
    frame.set_pixel(x, y, r, g, b);
  }
}

void draw_line(Frame& frame, int x0, int y0, int x1, int y1, std::uint8_t r, std::uint8_t g,
               std::uint8_t b, int thickness = 1) {
  const int dx = std::abs(x1 - x0);
  const int dy = -std::abs(y1 - y0);
  const int sx = x0 < x1 ? 1 : -1;
  const int sy = y0 < y1 ? 1 : -1;
  int err = dx + dy;
  while (true) {
    for (int ox = 0; ox < thickness; ++ox) {
      for (int oy = 0; oy < thickness; ++oy) {
        put_pixel(frame, x0 + ox, y0 + oy, r, g, b);
      }
    }
    if (x0 == x1 && y0 == y1) {
      break;
    }
    const int e2 = 2 * err;
    if (e2 >= dy) {
      err += dy;
      x0 += sx;
    }
    if (e2 <= dx) {
      err += dx;
      y0 += sy;
    }
  }
}

std::string format_tick(double v) {
  char buf[32];
  if (std::abs(v - std::round(v)) < 1e-9 && std::abs(v) < 1e6) {
    std::snprintf(buf, sizeof(buf), "%d", static_cast<int>(std::llround(v)));
  } else {
    std::snprintf(buf, sizeof(buf), "%.2f", v);
  }
  return buf;
}

struct Palette {
  std::uint8_t r, g, b;
};

constexpr Palette kPalette[] = {
    {31, 119, 180}, {255, 127, 14}, {44, 160, 44}, {214, 39, 40},
    {148, 103, 189}, {140, 86, 75}, {227, 119, 194}, {127, 127, 127},
};

}  // namespace

void draw_text(Frame& frame, int x, int y, const std::string& text, std::uint8_t r, std::uint8_t g,
               std::uint8_t b, int scale) {
  int penX = x;
  for (char raw : text) {
    const char c = static_cast<char>(std::toupper(static_cast<unsigned char>(raw)));
    const Glyph* glyph = find_glyph(c);
    if (glyph != nullptr) {
      for (int row = 0; row < 7; ++row) {
        for (int col = 0; col < 5; ++col) {
          if ((glyph->rows[static_cast<std::size_t>(row)] >> (4 - col)) & 1) {
            for (int oy = 0; oy < scale; ++oy) {
              for (int ox = 0; ox < scale; ++ox) {
                put_pixel(frame, penX + col * scale + ox, y + row * scale + oy, r, g, b);
              }
            }
          }
        }
      }
    }
    penX += 6 * scale;
  }
}

Frame render_plot(const PlotSpec& spec, const std::vector<Series>& series) {
  if (spec.width < 160 || spec.height < 120) {
    throw Error("plot: canvas too small");
  }
  if (!(spec.xMax > spec.xMin) || !(spec.yMax > spec.yMin)) {
    throw Error("plot: empty axis range");
  }
  Frame canvas(spec.width, spec.height);
  canvas.fill(255, 255, 255);

  const int left = 64;
  const int right = spec.width - 24;
  const int top = 40;
  const int bottom = spec.height - 48;

  const auto toX = [&](double v) {
    return left + static_cast<int>(std::llround((v - spec.xMin) / (spec.xMax - spec.xMin) *
                                                (right - left)));
  };
  const auto toY = [&](double v) {
    return bottom - static_cast<int>(std::llround((v - spec.yMin) / (spec.yMax - spec.yMin) *
                                                  (bottom - top)));
  };

  constexpr int kTicks = 5;
  for (int i = 0; i <= kTicks; ++i) {
    const double fx = spec.xMin + (spec.xMax - spec.xMin) * i / kTicks;
    const double fy = spec.yMin + (spec.yMax - spec.yMin) * i / kTicks;
    const int gx = toX(fx);
    const int gy = toY(fy);
    draw_line(canvas, gx, top, gx, bottom, 225, 225, 225);
    draw_line(canvas, left, gy, right, gy, 225, 225, 225);
    const std::string xs = format_tick(fx);
    draw_text(canvas, gx - static_cast<int>(xs.size()) * 3, bottom + 6, xs, 60, 60, 60);
    const std::string ys = format_tick(fy);
    draw_text(canvas, left - 8 - static_cast<int>(ys.size()) * 6, gy - 3, ys, 60, 60, 60);
    draw_line(canvas, gx, bottom, gx, bottom + 3, 30, 30, 30);
    draw_line(canvas, left - 3, gy, left, gy, 30, 30, 30);
  }

  draw_line(canvas, left, top, left, bottom, 30, 30, 30);
  draw_line(canvas, left, bottom, right, bottom, 30, 30, 30);

  draw_text(canvas, (left + right) / 2 - static_cast<int>(spec.title.size()) * 6, 12, spec.title,
            20, 20, 20, 2);
  draw_text(canvas,
            (left + right) / 2 - static_cast<int>(spec.xLabel.size()) * 3, spec.height - 18,
            spec.xLabel, 60, 60, 60);
  draw_text(canvas, 6, top - 14, spec.yLabel, 60, 60, 60);

  int legendY = top + 8;
  for (std::size_t s = 0; s < series.size(); ++s) {
    const Palette color = kPalette[s % std::size(kPalette)];
    const Series& ser = series[s];
    if (ser.xs.size() != ser.ys.size()) {
      throw Error("plot: series '" + ser.label + "' has mismatched x/y lengths");
    }
    int prevX = 0;
    int prevY = 0;
    bool have = false;
    for (std::size_t i = 0; i < ser.xs.size(); ++i) {
      const int px = std::clamp(toX(ser.xs[i]), left, right);
      const int py = std::clamp(toY(ser.ys[i]), top, bottom);
      if (have) {
        draw_line(canvas, prevX, prevY, px, py, color.r, color.g, color.b, 2);
      }
      prevX = px;
      prevY = py;
      have = true;
    }
    if (!ser.label.empty()) {
      const int lx = right - 150;
      draw_line(canvas, lx, legendY + 3, lx + 18, legendY + 3, color.r, color.g, color.b, 2);
      draw_text(canvas, lx + 24, legendY, ser.label, 40, 40, 40);
      legendY += 12;
    }
  }
  return canvas;
}

void write_plot_png(const std::filesystem::path& path, const PlotSpec& spec,
                    const std::vector<Series>& series) {
  imageio::save_png(path.string(), render_plot(spec, series));
}

}  // namespace motionbox::plot
