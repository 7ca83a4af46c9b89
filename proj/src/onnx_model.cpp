#include "motionbox/onnx_model.hpp"

#include <algorithm>
#include <cstring>
#include <fstream>
#include <limits>

namespace motionbox::onnx {

namespace {

// --- protobuf wire-format reader -------------------------------------------
//
// Field header = varint(fieldNumber << 3 | wireType). Wire types used by the
// ONNX messages we read: 0 varint, 1 fixed64, 2 length-delimited, 5 fixed32.

class WireReader {
 public:
  WireReader(const std::uint8_t* p, std::size_t n) : p_(p), end_(p + n) {}

  bool done() const { return p_ >= end_; }

  std::uint64_t varint() {
    std::uint64_t v = 0;
    int shift = 0;
    while (true) {
      if (p_ >= end_) throw Error("onnx: truncated varint");
      const std::uint8_t b = *p_++;
      if (shift < 64) v |= static_cast<std::uint64_t>(b & 0x7f) << shift;
      if ((b & 0x80) == 0) break;
      shift += 7;
      if (shift > 70) throw Error("onnx: varint too long");
    }
    return v;
  }

  void header(std::uint32_t& field, std::uint32_t& wireType) {
    const std::uint64_t key = varint();
    field = static_cast<std::uint32_t>(key >> 3);
    wireType = static_cast<std::uint32_t>(key & 7);
  }

  std::uint32_t fixed32() {
    if (end_ - p_ < 4) throw Error("onnx: truncated fixed32");
    std::uint32_t v;
    std::memcpy(&v, p_, 4);
    p_ += 4;
    return v;
  }

  std::uint64_t fixed64() {
    if (end_ - p_ < 8) throw Error("onnx: truncated fixed64");
    std::uint64_t v;
    std::memcpy(&v, p_, 8);
    p_ += 8;
    return v;
  }

  WireReader bytes() {
    const std::uint64_t len = varint();
    if (static_cast<std::uint64_t>(end_ - p_) < len) throw Error("onnx: truncated field");
    WireReader sub(p_, static_cast<std::size_t>(len));
    p_ += len;
    return sub;
  }

  std::string str() {
    WireReader sub = bytes();
    return std::string(reinterpret_cast<const char*>(sub.p_), sub.end_ - sub.p_);
  }

  void skip(std::uint32_t wireType) {
    switch (wireType) {
      case 0: varint(); break;
      case 1: fixed64(); break;
      case 2: bytes(); break;
      case 5: fixed32(); break;
      default: throw Error("onnx: unsupported wire type " + std::to_string(wireType));
    }
  }

  const std::uint8_t* data() const { return p_; }
  std::size_t size() const { return static_cast<std::size_t>(end_ - p_); }

 private:
  const std::uint8_t* p_;
  const std::uint8_t* end_;
};

std::int64_t as_i64(std::uint64_t v) { return static_cast<std::int64_t>(v); }

// Repeated int64 fields may arrive packed (one LEN payload) or one-by-one.
void read_repeated_i64(WireReader& r, std::uint32_t wireType, std::vector<std::int64_t>& out) {
  if (wireType == 2) {
    WireReader sub = r.bytes();
    while (!sub.done()) out.push_back(as_i64(sub.varint()));
  } else {
    out.push_back(as_i64(r.varint()));
  }
}

Tensor parse_tensor(WireReader r, std::string& name) {
  Tensor t;
  std::int64_t dataType = 1;
  std::vector<float> floatData;
  std::string rawData;
  while (!r.done()) {
    std::uint32_t field, wt;
    r.header(field, wt);
    switch (field) {
      case 1: read_repeated_i64(r, wt, t.dims); break;
      case 2: dataType = as_i64(r.varint()); break;
      case 4: {  // float_data
        if (wt == 2) {
          WireReader sub = r.bytes();
          while (!sub.done()) {
            const std::uint32_t bits = sub.fixed32();
            float f;
            std::memcpy(&f, &bits, 4);
            floatData.push_back(f);
          }
        } else {
          const std::uint32_t bits = r.fixed32();
          float f;
          std::memcpy(&f, &bits, 4);
          floatData.push_back(f);
        }
        break;
      }
      case 8: name = r.str(); break;
      case 9: rawData = r.str(); break;
      default: r.skip(wt); break;
    }
  }
  if (dataType != 1)
    throw Error("onnx: initializer '" + name + "' has unsupported data type " +
                std::to_string(dataType) + " (only float32)");
  if (!rawData.empty()) {
    if (rawData.size() % 4 != 0) throw Error("onnx: raw_data size not a multiple of 4");
    t.data.resize(rawData.size() / 4);
    std::memcpy(t.data.data(), rawData.data(), rawData.size());
  } else {
    t.data = std::move(floatData);
  }
  if (t.data.size() != t.numel())
    throw Error("onnx: initializer '" + name + "' data/dims mismatch");
  return t;
}

Attribute parse_attribute(WireReader r) {
  Attribute a;
  while (!r.done()) {
    std::uint32_t field, wt;
    r.header(field, wt);
    switch (field) {
      case 1: a.name = r.str(); break;
      case 2: {
        const std::uint32_t bits = r.fixed32();
        std::memcpy(&a.f, &bits, 4);
        break;
      }
      case 3: a.i = as_i64(r.varint()); break;
      case 4: a.s = r.str(); break;
      case 8: read_repeated_i64(r, wt, a.ints); break;
      default: r.skip(wt); break;
    }
  }
  return a;
}

Node parse_node(WireReader r) {
  Node n;
  while (!r.done()) {
    std::uint32_t field, wt;
    r.header(field, wt);
    switch (field) {
      case 1: n.inputs.push_back(r.str()); break;
      case 2: n.outputs.push_back(r.str()); break;
      case 3: n.name = r.str(); break;
      case 4: n.opType = r.str(); break;
      case 5: {
        Attribute a = parse_attribute(r.bytes());
        n.attributes[a.name] = std::move(a);
        break;
      }
      default: r.skip(wt); break;
    }
  }
  return n;
}

std::string parse_value_info_name(WireReader r) {
  std::string name;
  while (!r.done()) {
    std::uint32_t field, wt;
    r.header(field, wt);
    if (field == 1)
      name = r.str();
    else
      r.skip(wt);
  }
  return name;
}

Graph parse_graph(WireReader r) {
  Graph g;
  std::vector<std::string> declaredInputs;
  while (!r.done()) {
    std::uint32_t field, wt;
    r.header(field, wt);
    switch (field) {
      case 1: g.nodes.push_back(parse_node(r.bytes())); break;
      case 5: {
        std::string name;
        Tensor t = parse_tensor(r.bytes(), name);
        g.initializers[name] = std::move(t);
        break;
      }
      case 11: declaredInputs.push_back(parse_value_info_name(r.bytes())); break;
      case 12: g.outputNames.push_back(parse_value_info_name(r.bytes())); break;
      default: r.skip(wt); break;
    }
  }
  // Older exports list initializers among the graph inputs; drop them.
  for (auto& name : declaredInputs)
    if (!g.initializers.count(name)) g.inputNames.push_back(name);
  return g;
}

// --- attribute helpers ------------------------------------------------------

std::vector<std::int64_t> ints_attr(const Node& n, const std::string& name,
                                    std::vector<std::int64_t> fallback) {
  const auto it = n.attributes.find(name);
  return it == n.attributes.end() ? fallback : it->second.ints;
}

std::int64_t int_attr(const Node& n, const std::string& name, std::int64_t fallback) {
  const auto it = n.attributes.find(name);
  return it == n.attributes.end() ? fallback : it->second.i;
}

void require_spatial_2d(const Node& n, const std::vector<std::int64_t>& v,
                        const std::string& what) {
  if (v.size() != 2)
    throw Error("onnx: node '" + n.name + "' " + what + " must be 2-D");
}

struct ConvParams {
  std::int64_t padTop, padLeft, padBottom, padRight;
  std::int64_t strideH, strideW;
  std::int64_t kernelH, kernelW;
};

ConvParams conv_params(const Node& n, std::int64_t kh, std::int64_t kw) {
  const auto strides = ints_attr(n, "strides", {1, 1});
  require_spatial_2d(n, strides, "strides");
  auto pads = ints_attr(n, "pads", {0, 0, 0, 0});
  if (pads.size() != 4) throw Error("onnx: node '" + n.name + "' pads must have 4 entries");
  const auto dilations = ints_attr(n, "dilations", {1, 1});
  for (auto d : dilations)
    if (d != 1) throw Error("onnx: node '" + n.name + "': dilations != 1 unsupported");
  const auto it = n.attributes.find("auto_pad");
  if (it != n.attributes.end() && !it->second.s.empty() && it->second.s != "NOTSET")
    throw Error("onnx: node '" + n.name + "': auto_pad unsupported, export explicit pads");
  return ConvParams{pads[0], pads[1], pads[2], pads[3], strides[0], strides[1], kh, kw};
}

// --- op kernels (NCHW, batch 1) ---------------------------------------------

Tensor op_conv(const Node& n, const Tensor& x, const Tensor& w, const Tensor* bias) {
  if (x.dims.size() != 4 || x.dims[0] != 1)
    throw Error("onnx: Conv expects a 1xCxHxW input");
  if (w.dims.size() != 4) throw Error("onnx: Conv weight must be 4-D");
  if (int_attr(n, "group", 1) != 1)
    throw Error("onnx: node '" + n.name + "': grouped convolution unsupported");
  const std::int64_t cIn = x.dims[1], H = x.dims[2], W = x.dims[3];
  const std::int64_t cOut = w.dims[0], kh = w.dims[2], kw = w.dims[3];
  if (w.dims[1] != cIn)
    throw Error("onnx: node '" + n.name + "': weight channel mismatch");
  const ConvParams p = conv_params(n, kh, kw);
  const std::int64_t Ho = (H + p.padTop + p.padBottom - kh) / p.strideH + 1;
  const std::int64_t Wo = (W + p.padLeft + p.padRight - kw) / p.strideW + 1;
  if (Ho < 1 || Wo < 1)
    throw Error("onnx: node '" + n.name + "': input smaller than the kernel");

  Tensor y;
  y.dims = {1, cOut, Ho, Wo};
  y.data.assign(y.numel(), 0.0f);
  const float* xd = x.data.data();
  const float* wd = w.data.data();
  for (std::int64_t f = 0; f < cOut; ++f) {
    const float b = bias ? bias->data[static_cast<std::size_t>(f)] : 0.0f;
    float* yplane = y.data.data() + static_cast<std::size_t>(f) * Ho * Wo;
    for (std::int64_t oy = 0; oy < Ho; ++oy) {
      for (std::int64_t ox = 0; ox < Wo; ++ox) {
        double acc = b;
        const std::int64_t iy0 = oy * p.strideH - p.padTop;
        const std::int64_t ix0 = ox * p.strideW - p.padLeft;
        for (std::int64_t c = 0; c < cIn; ++c) {
          const float* xplane = xd + static_cast<std::size_t>(c) * H * W;
          const float* wplane = wd + (static_cast<std::size_t>(f) * cIn + c) * kh * kw;
          for (std::int64_t ky = 0; ky < kh; ++ky) {
            const std::int64_t iy = iy0 + ky;
            if (iy < 0 || iy >= H) continue;
            for (std::int64_t kx = 0; kx < kw; ++kx) {
              const std::int64_t ix = ix0 + kx;
              if (ix < 0 || ix >= W) continue;
              acc += static_cast<double>(xplane[iy * W + ix]) * wplane[ky * kw + kx];
            }
          }
        }
        yplane[oy * Wo + ox] = static_cast<float>(acc);
      }
    }
  }
  return y;
}

Tensor op_maxpool(const Node& n, const Tensor& x) {
  if (x.dims.size() != 4 || x.dims[0] != 1)
    throw Error("onnx: MaxPool expects a 1xCxHxW input");
  if (int_attr(n, "ceil_mode", 0) != 0)
    throw Error("onnx: node '" + n.name + "': ceil_mode unsupported");
  const auto kernel = ints_attr(n, "kernel_shape", {});
  require_spatial_2d(n, kernel, "kernel_shape");
  const ConvParams p = conv_params(n, kernel[0], kernel[1]);
  const std::int64_t C = x.dims[1], H = x.dims[2], W = x.dims[3];
  const std::int64_t Ho = (H + p.padTop + p.padBottom - p.kernelH) / p.strideH + 1;
  const std::int64_t Wo = (W + p.padLeft + p.padRight - p.kernelW) / p.strideW + 1;
  if (Ho < 1 || Wo < 1)
    throw Error("onnx: node '" + n.name + "': input smaller than the pooling kernel");

  Tensor y;
  y.dims = {1, C, Ho, Wo};
  y.data.assign(y.numel(), 0.0f);
  for (std::int64_t c = 0; c < C; ++c) {
    const float* xplane = x.data.data() + static_cast<std::size_t>(c) * H * W;
    float* yplane = y.data.data() + static_cast<std::size_t>(c) * Ho * Wo;
    for (std::int64_t oy = 0; oy < Ho; ++oy) {
      for (std::int64_t ox = 0; ox < Wo; ++ox) {
        float best = -std::numeric_limits<float>::infinity();
        bool any = false;
        for (std::int64_t ky = 0; ky < p.kernelH; ++ky) {
          const std::int64_t iy = oy * p.strideH - p.padTop + ky;
          if (iy < 0 || iy >= H) continue;
          for (std::int64_t kx = 0; kx < p.kernelW; ++kx) {
            const std::int64_t ix = ox * p.strideW - p.padLeft + kx;
            if (ix < 0 || ix >= W) continue;
            best = std::max(best, xplane[iy * W + ix]);
            any = true;
          }
        }
        if (!any) throw Error("onnx: node '" + n.name + "': pooling window entirely in padding");
        yplane[oy * Wo + ox] = best;
      }
    }
  }
  return y;
}

Tensor op_relu(const Tensor& x) {
  Tensor y = x;
  for (float& v : y.data) v = std::max(v, 0.0f);
  return y;
}

}  // namespace

Model Model::parse(const std::uint8_t* bytes, std::size_t size) {
  WireReader r(bytes, size);
  Model m;
  bool haveGraph = false;
  while (!r.done()) {
    std::uint32_t field, wt;
    r.header(field, wt);
    if (field == 7 && wt == 2) {  // ModelProto.graph
      m.graph_ = parse_graph(r.bytes());
      haveGraph = true;
    } else {
      r.skip(wt);
    }
  }
  if (!haveGraph) throw Error("onnx: no graph found in model file");
  if (m.graph_.inputNames.size() != 1)
    throw Error("onnx: model must have exactly one input, found " +
                std::to_string(m.graph_.inputNames.size()));
  if (m.graph_.outputNames.empty()) throw Error("onnx: model declares no outputs");
  for (const auto& n : m.graph_.nodes) {
    if (n.opType != "Conv" && n.opType != "Relu" && n.opType != "MaxPool" &&
        n.opType != "Identity")
      throw Error("onnx: unsupported op '" + n.opType +
                  "' (supported: Conv, Relu, MaxPool, Identity)");
    if (n.outputs.empty()) throw Error("onnx: node without outputs");
  }
  return m;
}

Model Model::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("onnx: cannot open model file " + path);
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (bytes.empty()) throw Error("onnx: model file is empty: " + path);
  try {
    return parse(bytes.data(), bytes.size());
  } catch (const Error& e) {
    throw Error(std::string(e.what()) + " (while loading " + path + ")");
  }
}

std::string Model::resolve_tap(const std::string& tap) const {
  if (tap.empty()) return graph_.outputNames.front();
  for (const auto& n : graph_.nodes)
    for (const auto& out : n.outputs)
      if (out == tap) return tap;
  if (tap == graph_.inputNames.front()) return tap;
  throw Error("onnx: tap tensor '" + tap + "' not produced by any node");
}

Tensor Model::run(const Tensor& input, const std::string& tap) const {
  const std::string target = resolve_tap(tap);
  std::map<std::string, Tensor> tensors = graph_.initializers;
  tensors[graph_.inputNames.front()] = input;
  if (target == graph_.inputNames.front()) return input;

  for (const auto& n : graph_.nodes) {
    const auto fetch = [&](std::size_t idx) -> const Tensor& {
      if (idx >= n.inputs.size()) throw Error("onnx: node '" + n.name + "' missing input");
      const auto it = tensors.find(n.inputs[idx]);
      if (it == tensors.end())
        throw Error("onnx: node '" + n.name + "' input '" + n.inputs[idx] + "' not available");
      return it->second;
    };
    Tensor out;
    if (n.opType == "Conv") {
      const bool hasBias = n.inputs.size() >= 3 && !n.inputs[2].empty();
      const Tensor* bias = hasBias ? &fetch(2) : nullptr;
      out = op_conv(n, fetch(0), fetch(1), bias);
    } else if (n.opType == "Relu") {
      out = op_relu(fetch(0));
    } else if (n.opType == "Identity") {
      out = fetch(0);
    } else {
      out = op_maxpool(n, fetch(0));
    }
    tensors[n.outputs.front()] = std::move(out);
    if (n.outputs.front() == target) return tensors[n.outputs.front()];
  }
  throw Error("onnx: execution finished without producing '" + target + "'");
}

int Model::stride_to(const std::string& tap) const {
  const std::string target = resolve_tap(tap);
  std::map<std::string, std::int64_t> stride;
  stride[graph_.inputNames.front()] = 1;
  if (target == graph_.inputNames.front()) return 1;

  for (const auto& n : graph_.nodes) {
    const auto it = stride.find(n.inputs.empty() ? std::string() : n.inputs[0]);
    if (it == stride.end()) {
      // Identity nodes that alias a deduplicated constant are off the
      // activation chain; their outputs carry no stride.
      if (n.opType == "Identity" && graph_.initializers.count(n.inputs[0])) continue;
      throw Error("onnx: node '" + n.name + "' is not on the chain from the graph input");
    }
    std::int64_t s = it->second;
    if (n.opType == "Conv" || n.opType == "MaxPool") {
      const auto strides = ints_attr(n, "strides", {1, 1});
      require_spatial_2d(n, strides, "strides");
      if (strides[0] != strides[1])
        throw Error("onnx: node '" + n.name + "': asymmetric stride unsupported");
      s *= strides[0];
    }
    stride[n.outputs.front()] = s;
    if (n.outputs.front() == target) {
      if (s > std::numeric_limits<int>::max()) throw Error("onnx: stride overflow");
      return static_cast<int>(s);
    }
  }
  throw Error("onnx: tap '" + target + "' unreachable from the graph input");
}

}  // namespace motionbox::onnx
