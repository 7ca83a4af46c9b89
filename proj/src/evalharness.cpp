#include "motionbox/evalharness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <thread>

#include "motionbox/boxopt.hpp"
#include "motionbox/imageio.hpp"

namespace fs = std::filesystem;

namespace motionbox::evalharness {

double iou(const Box& a, const Box& b) {
  if (a.w <= 0.0 || a.h <= 0.0 || b.w <= 0.0 || b.h <= 0.0) {
    throw Error("iou: boxes must have positive area");
  }
  const double ix = std::min(a.right(), b.right()) - std::max(a.left(), b.left());
  const double iy = std::min(a.bottom(), b.bottom()) - std::max(a.top(), b.top());
  if (ix <= 0.0 || iy <= 0.0) {
    return 0.0;
  }
  const double inter = ix * iy;
  const double uni = a.w * a.h + b.w * b.h - inter;
  return inter / uni;
}

double center_error(const Box& a, const Box& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

EvalResult aggregate(std::vector<PairOutcome> outcomes) {
  if (outcomes.empty()) {
    throw Error("evaluate: no pairs");
  }
  std::sort(outcomes.begin(), outcomes.end(),
            [](const PairOutcome& a, const PairOutcome& b) { return a.pairId < b.pairId; });
  EvalResult result;
  result.perPair = std::move(outcomes);
  const double n = static_cast<double>(result.perPair.size());

  result.successCurve.assign(kSuccessSamples, 0.0);
  for (int i = 0; i < kSuccessSamples; ++i) {
    const double threshold = i * 0.01;
    int hits = 0;
    for (const PairOutcome& p : result.perPair) {
      hits += p.iou > threshold ? 1 : 0;
    }
    result.successCurve[static_cast<std::size_t>(i)] = hits / n;
  }

  result.precisionCurve.assign(kPrecisionSamples, 0.0);
  for (int i = 0; i < kPrecisionSamples; ++i) {
    int hits = 0;
    for (const PairOutcome& p : result.perPair) {
      hits += p.centerError <= static_cast<double>(i) ? 1 : 0;
    }
    result.precisionCurve[static_cast<std::size_t>(i)] = hits / n;
  }

  double area = 0.0;
  for (int i = 0; i + 1 < kSuccessSamples; ++i) {
    area += (result.successCurve[static_cast<std::size_t>(i)] +
             result.successCurve[static_cast<std::size_t>(i + 1)]) /
            2.0 * 0.01;
  }
  result.auc = area;
  result.pre30 = result.precisionCurve[30];
  return result;
}

EvalResult evaluate(const std::vector<dataset::PairRecord>& pairs, const Detector& detector,
                    int jobs) {
  if (pairs.empty()) {
    throw Error("evaluate: no pairs");
  }
  std::vector<PairOutcome> outcomes(pairs.size());
  std::atomic<std::size_t> cursor{0};

  const auto worker = [&]() {
    while (true) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= pairs.size()) {
        return;
      }
      const dataset::PairRecord& rec = pairs[i];
      PairOutcome out;
      out.pairId = rec.id();
      try {
        const Frame f1 = imageio::load_frame(rec.pathA);
        const Frame f2 = imageio::load_frame(rec.pathB);
        try {
          const Box detected = detector(f1, f2);
          out.iou = iou(detected, rec.groundTruth);
          out.centerError = center_error(detected, rec.groundTruth);
        } catch (const NoMotionError& e) {
          out.iou = 0.0;
          out.centerError = std::hypot(f2.width, f2.height);
          out.note = e.what();
        }
      } catch (const Error& e) {
        out.iou = 0.0;
        out.centerError = kUnreadablePairError;
        out.note = e.what();
      }
      outcomes[i] = std::move(out);
    }
  };

  const int threads = std::clamp(jobs, 1, static_cast<int>(pairs.size()));
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) {
      pool.emplace_back(worker);
    }
    for (std::thread& t : pool) {
      t.join();
    }
  }
  return aggregate(std::move(outcomes));
}

std::vector<AblationMethod> ablation_methods(const std::string& deepModelPath) {
  using features::BackendKind;
  using features::FeatureBackendSpec;
  const FeatureBackendSpec raw{BackendKind::Raw, "", ""};
  const FeatureBackendSpec hog{BackendKind::Hog, "", ""};
  const FeatureBackendSpec layer3{BackendKind::Deep, "layer3", deepModelPath};
  const FeatureBackendSpec layer14{BackendKind::Deep, "layer14", deepModelPath};

  std::vector<AblationMethod> methods;
  const auto add = [&](int id, std::string label, std::vector<FeatureBackendSpec> specs, bool lpc,
                       bool cpc, bool sgd) {
    methods.push_back({id, std::move(label), std::move(specs), lpc, cpc, sgd});
  };
  add(0, "RAW", {raw}, false, false, false);
  add(1, "RAW", {raw}, true, true, true);
  add(2, "Layer14", {layer14}, true, true, true);
  add(3, "Layer3", {layer3}, true, true, true);
  add(4, "HOG", {hog}, true, true, true);
  add(5, "Layer3+Layer14", {layer3, layer14}, true, true, true);
  add(6, "Layer3+Layer14+HOG", {layer3, layer14, hog}, true, true, true);
  add(7, "Layer14", {layer14}, false, false, true);
  add(8, "Layer14", {layer14}, false, true, true);
  add(9, "Layer14", {layer14}, true, false, true);
  add(10, "Layer14", {layer14}, true, true, false);
  return methods;
}

std::vector<AblationOutcome> run_ablation(const std::vector<dataset::PairRecord>& pairs,
                                          const std::vector<AblationMethod>& methods,
                                          const DetectorConfig& cfg, int jobs) {
  std::vector<AblationOutcome> outcomes;
  outcomes.reserve(methods.size());
  for (const AblationMethod& method : methods) {
    for (const features::FeatureBackendSpec& spec : method.features) {
      if (spec.kind == features::BackendKind::Deep && spec.modelPath.empty()) {
        throw Error("ablation method " + std::to_string(method.id) +
                    " needs a deep feature model (--model)");
      }
    }
    std::vector<features::FeatureBackend> backends;
    backends.reserve(method.features.size());
    for (const features::FeatureBackendSpec& spec : method.features) {
      backends.emplace_back(spec);
    }
    boxopt::PipelineOptions options;
    options.useLocationPrior = method.lpc;
    options.useColorPosterior = method.cpc;
    options.useOptimizer = method.sgd;
    const Detector detector = [&](const Frame& f1, const Frame& f2) {
      return boxopt::detect_with_options(f1, f2, backends, cfg, options).box;
    };
    AblationOutcome out;
    out.method = method;
    out.result = evaluate(pairs, detector, jobs);
    outcomes.push_back(std::move(out));
  }
  return outcomes;
}

namespace {

std::string format_number(double v) {
  std::ostringstream out;
  out << std::setprecision(6) << std::fixed << v;
  std::string s = out.str();
  while (s.size() > 1 && s.back() == '0') {
    s.pop_back();
  }
  if (!s.empty() && s.back() == '.') {
    s.pop_back();
  }
  return s;
}

}  // namespace

void write_results_csv(const fs::path& path, const EvalResult& result) {
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot write results file: " + path.string());
  }
  out << "pair_id,iou,center_error\n";
  for (const PairOutcome& p : result.perPair) {
    out << p.pairId << "," << format_number(p.iou) << "," << format_number(p.centerError) << "\n";
  }
}

void write_curves_csv(const fs::path& path, const EvalResult& result) {
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot write curves file: " + path.string());
  }
  out << "threshold,success_rate\n";
  for (int i = 0; i < kSuccessSamples; ++i) {
    out << format_number(i * 0.01) << ","
        << format_number(result.successCurve[static_cast<std::size_t>(i)]) << "\n";
  }
  out << "\nthreshold,precision\n";
  for (int i = 0; i < kPrecisionSamples; ++i) {
    out << i << "," << format_number(result.precisionCurve[static_cast<std::size_t>(i)]) << "\n";
  }
}

void read_curves_csv(const fs::path& path, std::vector<double>& successCurve,
                     std::vector<double>& precisionCurve) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open curves file: " + path.string());
  }
  successCurve.clear();
  precisionCurve.clear();
  std::vector<double>* current = nullptr;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") {
      continue;
    }
    if (line.rfind("threshold,success_rate", 0) == 0) {
      current = &successCurve;
      continue;
    }
    if (line.rfind("threshold,precision", 0) == 0) {
      current = &precisionCurve;
      continue;
    }
    if (current == nullptr) {
      throw Error("malformed curves file " + path.string() + ": data before header");
    }
    const auto comma = line.find(',');
    if (comma == std::string::npos) {
      throw Error("malformed curves file " + path.string() + ": line '" + line + "'");
    }
    try {
      current->push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw Error("malformed curves file " + path.string() + ": line '" + line + "'");
    }
  }
  if (successCurve.empty() && precisionCurve.empty()) {
    throw Error("curves file has no data: " + path.string());
  }
}

void write_ablation_csv(const fs::path& path, const std::vector<AblationOutcome>& outcomes) {
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot write ablation file: " + path.string());
  }
  const auto row = [&](const std::string& name, auto cell) {
    out << name;
    for (const AblationOutcome& o : outcomes) {
      out << "," << cell(o);
    }
    out << "\n";
  };
  row("method", [](const AblationOutcome& o) { return std::to_string(o.method.id); });
  const auto feature_mark = [](const AblationOutcome& o, const char* name) {
    for (const features::FeatureBackendSpec& spec : o.method.features) {
      if (spec.kind == features::BackendKind::Raw && std::string(name) == "RAW") return "x";
      if (spec.kind == features::BackendKind::Hog && std::string(name) == "HOG") return "x";
      if (spec.kind == features::BackendKind::Deep && spec.layerTag == "layer3" &&
          std::string(name) == "Layer3")
        return "x";
      if (spec.kind == features::BackendKind::Deep && spec.layerTag == "layer14" &&
          std::string(name) == "Layer14")
        return "x";
    }
    return "";
  };
  row("Layer3", [&](const AblationOutcome& o) { return feature_mark(o, "Layer3"); });
  row("Layer14", [&](const AblationOutcome& o) { return feature_mark(o, "Layer14"); });
  row("HOG", [&](const AblationOutcome& o) { return feature_mark(o, "HOG"); });
  row("RAW", [&](const AblationOutcome& o) { return feature_mark(o, "RAW"); });
  row("BIN", [](const AblationOutcome&) { return "x"; });
  row("LPC", [](const AblationOutcome& o) { return o.method.lpc ? "x" : ""; });
  row("CPC", [](const AblationOutcome& o) { return o.method.cpc ? "x" : ""; });
  row("SGD", [](const AblationOutcome& o) { return o.method.sgd ? "x" : ""; });
  row("SR", [](const AblationOutcome& o) { return format_number(o.result.auc); });
  row("PRE30", [](const AblationOutcome& o) { return format_number(o.result.pre30); });
}

}  // namespace motionbox::evalharness
