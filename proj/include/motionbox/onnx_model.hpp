#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "motionbox/types.hpp"

namespace motionbox::onnx {

/// Dense float tensor with explicit dims (row-major / C order).
struct Tensor {
  std::vector<std::int64_t> dims;
  std::vector<float> data;

  std::size_t numel() const {
    std::size_t n = 1;
    for (auto d : dims) n *= static_cast<std::size_t>(d);
    return n;
  }
};

struct Attribute {
  std::string name;
  float f = 0.0f;
  std::int64_t i = 0;
  std::string s;
  std::vector<std::int64_t> ints;
};

struct Node {
  std::string opType;
  std::string name;
  std::vector<std::string> inputs;
  std::vector<std::string> outputs;
  std::map<std::string, Attribute> attributes;
};

struct Graph {
  std::vector<Node> nodes;                    // topological order as serialized
  std::map<std::string, Tensor> initializers;
  std::vector<std::string> inputNames;        // graph inputs minus initializers
  std::vector<std::string> outputNames;
};

/// Inference over a serialized ONNX graph restricted to the plain
/// convolutional subset (Conv / Relu / MaxPool in a single chain, plus the
/// Identity aliases exporters add for tapped tensors), which covers
/// VGG-style feature stacks. The file is parsed directly from the protobuf
/// wire format, so no protobuf or runtime dependency is needed.
///
/// Any intermediate tensor can be tapped by name, which is how one exported
/// file serves several feature tap points.
class Model {
 public:
  static Model load(const std::string& path);
  static Model parse(const std::uint8_t* bytes, std::size_t size);

  const Graph& graph() const { return graph_; }

  /// Run the graph on a 1xCxHxW input until `tap` is produced and return it.
  /// An empty tap means the graph's first declared output. Pure function:
  /// concurrent calls on one Model are safe.
  Tensor run(const Tensor& input, const std::string& tap = {}) const;

  /// Cumulative spatial stride from the graph input to the tap tensor
  /// (product of conv/pool strides along the chain).
  int stride_to(const std::string& tap = {}) const;

 private:
  std::string resolve_tap(const std::string& tap) const;
  Graph graph_;
};

}  // namespace motionbox::onnx
