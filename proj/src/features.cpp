#include "motionbox/features.hpp"

#include <cmath>
#include <fstream>

#include "json.hpp"
#include "motionbox/onnx_model.hpp"
#include "motionbox/resample.hpp"

namespace motionbox::features {

BackendKind parse_backend_kind(const std::string& name) {
  if (name == "raw") return BackendKind::Raw;
  if (name == "hog") return BackendKind::Hog;
  if (name == "deep") return BackendKind::Deep;
  throw Error("features: unknown backend '" + name + "' (expected raw, hog or deep)");
}

std::string backend_kind_name(BackendKind kind) {
  switch (kind) {
    case BackendKind::Raw: return "raw";
    case BackendKind::Hog: return "hog";
    case BackendKind::Deep: return "deep";
  }
  return "?";
}

namespace {

int ceil_div(int a, int b) { return (a + b - 1) / b; }

FeatureMap extract_raw(const Frame& frame) {
  FeatureMap map;
  map.height = frame.height;
  map.width = frame.width;
  map.channels = 3;
  map.stride = 1;
  map.values.resize(frame.data.size());
  for (std::size_t i = 0; i < frame.data.size(); ++i)
    map.values[i] = frame.data[i] / 255.0;
  return map;
}

// Dalal-Triggs style descriptor reduced back to one 9-vector per cell: each
// cell histogram is L2-hys normalized inside every 2x2 block containing it
// and the normalized copies are averaged.
FeatureMap extract_hog(const Frame& frame) {
  const int W = frame.width, H = frame.height;
  if (W < kHogCellSize || H < kHogCellSize)
    throw Error("features: frame smaller than one HOG cell");
  const int cellsX = ceil_div(W, kHogCellSize);
  const int cellsY = ceil_div(H, kHogCellSize);

  // Per-pixel gradient: central differences with replicated borders, taking
  // the channel with the largest magnitude.
  std::vector<double> hist(static_cast<std::size_t>(cellsX) * cellsY * kHogBins, 0.0);
  const double binWidth = M_PI / kHogBins;
  for (int y = 0; y < H; ++y) {
    const int ym = std::max(y - 1, 0), yp = std::min(y + 1, H - 1);
    for (int x = 0; x < W; ++x) {
      const int xm = std::max(x - 1, 0), xp = std::min(x + 1, W - 1);
      double gx = 0, gy = 0, mag2 = -1;
      for (int c = 0; c < 3; ++c) {
        const double dx = static_cast<double>(frame.at(xp, y, c)) - frame.at(xm, y, c);
        const double dy = static_cast<double>(frame.at(x, yp, c)) - frame.at(x, ym, c);
        const double m2 = dx * dx + dy * dy;
        if (m2 > mag2) {
          mag2 = m2;
          gx = dx;
          gy = dy;
        }
      }
      const double mag = std::sqrt(mag2);
      if (mag <= 0.0) continue;
      double angle = std::atan2(gy, gx);  // unsigned orientation in [0, pi)
      if (angle < 0) angle += M_PI;
      if (angle >= M_PI) angle -= M_PI;
      // Linear vote between the two nearest bin centers (centers at
      // (k + 0.5) * binWidth, wrapping).
      double pos = angle / binWidth - 0.5;
      if (pos < 0) pos += kHogBins;
      const int b0 = static_cast<int>(pos) % kHogBins;
      const int b1 = (b0 + 1) % kHogBins;
      const double frac = pos - std::floor(pos);
      double* cellHist =
          hist.data() +
          (static_cast<std::size_t>(y / kHogCellSize) * cellsX + (x / kHogCellSize)) * kHogBins;
      cellHist[b0] += mag * (1.0 - frac);
      cellHist[b1] += mag * frac;
    }
  }

  // Block normalization, then average each cell's normalized copies.
  FeatureMap map;
  map.height = cellsY;
  map.width = cellsX;
  map.channels = kHogBins;
  map.stride = kHogCellSize;
  map.values.assign(hist.size(), 0.0);
  std::vector<int> contributions(static_cast<std::size_t>(cellsX) * cellsY, 0);
  const double eps = 1e-10;
  const int blocksY = cellsY - kHogBlockCells + 1;
  const int blocksX = cellsX - kHogBlockCells + 1;
  for (int by = 0; by < blocksY; ++by) {
    for (int bx = 0; bx < blocksX; ++bx) {
      double norm2 = 0.0;
      for (int cy = 0; cy < kHogBlockCells; ++cy)
        for (int cx = 0; cx < kHogBlockCells; ++cx) {
          const double* h = hist.data() +
                            (static_cast<std::size_t>(by + cy) * cellsX + (bx + cx)) * kHogBins;
          for (int b = 0; b < kHogBins; ++b) norm2 += h[b] * h[b];
        }
      double norm = std::sqrt(norm2);
      std::array<double, kHogBlockCells * kHogBlockCells * kHogBins> block{};
      for (int cy = 0; cy < kHogBlockCells; ++cy)
        for (int cx = 0; cx < kHogBlockCells; ++cx) {
          const double* h = hist.data() +
                            (static_cast<std::size_t>(by + cy) * cellsX + (bx + cx)) * kHogBins;
          for (int b = 0; b < kHogBins; ++b) {
            double v = norm > eps ? h[b] / norm : 0.0;
            block[(static_cast<std::size_t>(cy) * kHogBlockCells + cx) * kHogBins + b] =
                std::min(v, kHogClip);
          }
        }
      norm2 = 0.0;
      for (double v : block) norm2 += v * v;
      norm = std::sqrt(norm2);
      for (int cy = 0; cy < kHogBlockCells; ++cy)
        for (int cx = 0; cx < kHogBlockCells; ++cx) {
          double* out = map.values.data() +
                        (static_cast<std::size_t>(by + cy) * cellsX + (bx + cx)) * kHogBins;
          for (int b = 0; b < kHogBins; ++b) {
            const double v =
                block[(static_cast<std::size_t>(cy) * kHogBlockCells + cx) * kHogBins + b];
            out[b] += norm > eps ? v / norm : 0.0;
          }
          ++contributions[static_cast<std::size_t>(by + cy) * cellsX + (bx + cx)];
        }
    }
  }
  for (int cy = 0; cy < cellsY; ++cy)
    for (int cx = 0; cx < cellsX; ++cx) {
      const int n = contributions[static_cast<std::size_t>(cy) * cellsX + cx];
      double* out = map.values.data() + (static_cast<std::size_t>(cy) * cellsX + cx) * kHogBins;
      if (n > 0) {
        for (int b = 0; b < kHogBins; ++b) out[b] /= n;
      } else {
        // Grid too small for any block: L2-hys the lone cell.
        const double* h = hist.data() + (static_cast<std::size_t>(cy) * cellsX + cx) * kHogBins;
        double norm2 = 0.0;
        for (int b = 0; b < kHogBins; ++b) norm2 += h[b] * h[b];
        double norm = std::sqrt(norm2);
        std::array<double, kHogBins> v{};
        for (int b = 0; b < kHogBins; ++b)
          v[b] = norm > eps ? std::min(h[b] / norm, kHogClip) : 0.0;
        norm2 = 0.0;
        for (double q : v) norm2 += q * q;
        norm = std::sqrt(norm2);
        for (int b = 0; b < kHogBins; ++b) out[b] = norm > eps ? v[b] / norm : 0.0;
      }
    }
  return map;
}

}  // namespace

FeatureBackend::FeatureBackend(const FeatureBackendSpec& spec) : spec_(spec) {
  if (spec.kind != BackendKind::Deep) return;
  if (spec.modelPath.empty()) throw Error("features: deep backend requires a model path");
  model_ = std::make_shared<onnx::Model>(onnx::Model::load(spec.modelPath));
  deepStride_ = model_->stride_to(spec.layerTag);
  if (deepStride_ < 1) throw Error("features: model reports stride < 1");

  // Optional sidecar written by the export script: input normalization in
  // [0,1] units. Absent sidecar means identity normalization.
  std::ifstream meta(spec.modelPath + ".json");
  if (meta) {
    nlohmann::json j;
    try {
      meta >> j;
    } catch (const std::exception& e) {
      throw Error("features: bad model sidecar " + spec.modelPath + ".json: " + e.what());
    }
    if (j.contains("input_mean")) {
      const auto& m = j["input_mean"];
      if (!m.is_array() || m.size() != 3) throw Error("features: input_mean must have 3 entries");
      for (int c = 0; c < 3; ++c) inputMean_[c] = m[c].get<double>();
    }
    if (j.contains("input_std")) {
      const auto& s = j["input_std"];
      if (!s.is_array() || s.size() != 3) throw Error("features: input_std must have 3 entries");
      for (int c = 0; c < 3; ++c) {
        inputStd_[c] = s[c].get<double>();
        if (inputStd_[c] == 0.0) throw Error("features: input_std entry is zero");
      }
    }
  }
}

FeatureBackend::~FeatureBackend() = default;
FeatureBackend::FeatureBackend(FeatureBackend&&) noexcept = default;
FeatureBackend& FeatureBackend::operator=(FeatureBackend&&) noexcept = default;

FeatureMap FeatureBackend::extract(const Frame& frame) const {
  if (frame.width <= 0 || frame.height <= 0) throw Error("features: empty frame");
  switch (spec_.kind) {
    case BackendKind::Raw:
      return extract_raw(frame);
    case BackendKind::Hog:
      return extract_hog(frame);
    case BackendKind::Deep:
      break;
  }

  const int s = deepStride_;
  if (frame.width < s || frame.height < s)
    throw Error("features: frame smaller than one stride-" + std::to_string(s) + " cell");
  // Pad each side up to a stride multiple so the feature grid has no ragged
  // boundary cells; the pipeline resizes masks back to the true frame size.
  const int W2 = ceil_div(frame.width, s) * s;
  const int H2 = ceil_div(frame.height, s) * s;

  onnx::Tensor input;
  input.dims = {1, 3, H2, W2};
  input.data.resize(static_cast<std::size_t>(3) * H2 * W2);
  for (int c = 0; c < 3; ++c) {
    Raster plane(frame.width, frame.height);
    for (int y = 0; y < frame.height; ++y)
      for (int x = 0; x < frame.width; ++x) plane.at(x, y) = frame.at(x, y, c) / 255.0;
    if (W2 != frame.width || H2 != frame.height) plane = bicubic_resize(plane, W2, H2);
    float* dst = input.data.data() + static_cast<std::size_t>(c) * H2 * W2;
    for (int y = 0; y < H2; ++y)
      for (int x = 0; x < W2; ++x) {
        const double v = std::clamp(plane.at(x, y), 0.0, 1.0);
        dst[static_cast<std::size_t>(y) * W2 + x] =
            static_cast<float>((v - inputMean_[c]) / inputStd_[c]);
      }
  }

  const onnx::Tensor out = model_->run(input, spec_.layerTag);
  if (out.dims.size() != 4 || out.dims[0] != 1)
    throw Error("features: model tap is not a 1xCxHxW tensor");
  const int C = static_cast<int>(out.dims[1]);
  const int h = static_cast<int>(out.dims[2]);
  const int w = static_cast<int>(out.dims[3]);
  if (h != ceil_div(frame.height, s) || w != ceil_div(frame.width, s))
    throw Error("features: model/tap mismatch: output " + std::to_string(w) + "x" +
                std::to_string(h) + " does not cover the frame at stride " + std::to_string(s));

  FeatureMap map;
  map.height = h;
  map.width = w;
  map.channels = C;
  map.stride = s;
  map.values.resize(static_cast<std::size_t>(h) * w * C);
  for (int c = 0; c < C; ++c) {
    const float* plane = out.data.data() + static_cast<std::size_t>(c) * h * w;
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x)
        map.at(x, y, c) = plane[static_cast<std::size_t>(y) * w + x];
  }
  for (double v : map.values)
    if (!std::isfinite(v)) throw Error("features: non-finite value in feature map");
  return map;
}

FeatureMap extract(const Frame& frame, const FeatureBackendSpec& spec) {
  return FeatureBackend(spec).extract(frame);
}

}  // namespace motionbox::features
