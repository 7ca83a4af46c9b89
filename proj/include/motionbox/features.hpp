#pragma once

#include <array>
#include <memory>
#include <string>
#include <vector>

#include "motionbox/types.hpp"

namespace motionbox::onnx {
class Model;
}

namespace motionbox::features {

enum class BackendKind { Raw, Hog, Deep };

/// Selects a feature extraction path. Deep backends need a model file; the
/// layer tag picks the tap tensor inside the exported graph (empty = the
/// graph's declared output).
struct FeatureBackendSpec {
  BackendKind kind = BackendKind::Raw;
  std::string layerTag;
  std::string modelPath;
};

BackendKind parse_backend_kind(const std::string& name);  // "raw" | "hog" | "deep"
std::string backend_kind_name(BackendKind kind);

/// Dense h x w x C feature grid with an integer pixel stride relative to the
/// source frame: h = ceil(H / stride), w = ceil(W / stride).
struct FeatureMap {
  int height = 0;
  int width = 0;
  int channels = 0;
  int stride = 1;
  std::vector<double> values;  // (y, x, c) with c fastest

  double at(int x, int y, int c) const {
    return values[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  double& at(int x, int y, int c) {
    return values[(static_cast<std::size_t>(y) * width + x) * channels + c];
  }
  bool same_shape(const FeatureMap& o) const {
    return height == o.height && width == o.width && channels == o.channels &&
           stride == o.stride;
  }
};

/// One constructed backend. Immutable after construction; extract() is a pure
/// function, so one instance may serve concurrent calls.
class FeatureBackend {
 public:
  explicit FeatureBackend(const FeatureBackendSpec& spec);
  ~FeatureBackend();
  FeatureBackend(FeatureBackend&&) noexcept;
  FeatureBackend& operator=(FeatureBackend&&) noexcept;

  FeatureMap extract(const Frame& frame) const;
  const FeatureBackendSpec& spec() const { return spec_; }

 private:
  FeatureBackendSpec spec_;
  std::shared_ptr<const onnx::Model> model_;   // Deep only
  std::array<double, 3> inputMean_{0.0, 0.0, 0.0};
  std::array<double, 3> inputStd_{1.0, 1.0, 1.0};
  int deepStride_ = 1;
};

/// Convenience form of the extraction contract. Constructs the backend per
/// call, so hot paths should hold a FeatureBackend instead.
FeatureMap extract(const Frame& frame, const FeatureBackendSpec& spec);

// HOG parameters (canonical defaults: 8 px cells, 2x2 cell blocks, 9 unsigned
// orientation bins, L2-hys normalization).
inline constexpr int kHogCellSize = 8;
inline constexpr int kHogBins = 9;
inline constexpr int kHogBlockCells = 2;
inline constexpr double kHogClip = 0.2;

}  // namespace motionbox::features
