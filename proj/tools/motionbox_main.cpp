#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "motionbox/boxopt.hpp"
#include "motionbox/config.hpp"
#include "motionbox/dataset.hpp"
#include "motionbox/evalharness.hpp"
#include "motionbox/features.hpp"
#include "motionbox/imageio.hpp"
#include "motionbox/plot.hpp"
#include "motionbox/trackassist.hpp"

namespace fs = std::filesystem;
using namespace motionbox;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitData = 1;
constexpr int kExitUsage = 2;

struct BackendFlags {
  std::string features = "raw";
  std::string modelPath;
  std::string layerTag = "layer14";

  void attach(CLI::App* cmd) {
    cmd->add_option("--features", features, "Feature backend: raw, hog, or deep")
        ->check(CLI::IsMember({"raw", "hog", "deep"}));
    cmd->add_option("--model", modelPath, "Network weights file for the deep backend");
    cmd->add_option("--layer", layerTag, "Deep backend tap: layer3 or layer14");
  }

  features::FeatureBackendSpec spec() const {
    features::FeatureBackendSpec s;
    s.kind = features::parse_backend_kind(features);
    s.layerTag = layerTag;
    s.modelPath = modelPath;
    if (s.kind == features::BackendKind::Deep && modelPath.empty()) {
      throw CLI::ValidationError("--features deep requires --model");
    }
    return s;
  }
};

DetectorConfig load_config(const std::string& path) {
  if (path.empty()) {
    return DetectorConfig{};
  }
  return load_detector_config(path);
}

Raster normalized_copy(const Raster& raster) {
  Raster out = raster;
  const double maxVal = out.max_value();
  if (maxVal > 0.0) {
    for (double& v : out.values) {
      v = std::max(v, 0.0) / maxVal;
    }
  }
  return out;
}

void write_trace_csv(const std::string& path, const boxopt::OptimizerTrace& trace) {
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot write trace file: " + path);
  }
  out << "iter,x,y,w,h,score\n";
  char line[160];
  for (const boxopt::TraceEntry& step : trace.steps) {
    std::snprintf(line, sizeof(line), "%d,%.6f,%.6f,%.6f,%.6f,%.9f\n", step.iteration, step.box.x,
                  step.box.y, step.box.w, step.box.h, step.score);
    out << line;
  }
}

std::vector<int> parse_method_list(const std::string& text) {
  std::vector<int> ids;
  std::string token;
  std::istringstream in(text);
  while (std::getline(in, token, ',')) {
    if (token.empty()) {
      continue;
    }
    const auto dash = token.find('-', 1);  // allow leading minus to fail as non-numeric
    try {
      if (dash == std::string::npos) {
        ids.push_back(std::stoi(token));
      } else {
        const int lo = std::stoi(token.substr(0, dash));
        const int hi = std::stoi(token.substr(dash + 1));
        for (int i = lo; i <= hi; ++i) {
          ids.push_back(i);
        }
      }
    } catch (const std::exception&) {
      throw CLI::ValidationError("--methods: cannot parse '" + token + "'");
    }
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  if (ids.empty()) {
    throw CLI::ValidationError("--methods: empty selection");
  }
  return ids;
}

std::vector<std::string> list_sequence_frames(const fs::path& dir) {
  fs::path frameDir = dir;
  if (fs::is_directory(dir / "img")) {
    frameDir = dir / "img";
  }
  if (!fs::is_directory(frameDir)) {
    throw Error("sequence directory does not exist: " + dir.string());
  }
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(frameDir)) {
    if (!entry.is_regular_file()) {
      continue;
    }
    std::string ext = entry.path().extension().string();
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    if (ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp") {
      paths.push_back(entry.path().string());
    }
  }
  std::sort(paths.begin(), paths.end());
  if (paths.empty()) {
    throw Error("sequence has no image files: " + dir.string());
  }
  return paths;
}

int run_detect(const std::vector<std::string>& pair, const BackendFlags& backend,
               const std::string& configPath, const std::string& dumpMasks,
               const std::string& dumpMaps, const std::string& dumpTrace) {
  const DetectorConfig cfg = load_config(configPath);
  const Frame frame1 = imageio::load_frame(pair[0]);
  const Frame frame2 = imageio::load_frame(pair[1]);
  const boxopt::Detection det = boxopt::detect(frame1, frame2, backend.spec(), cfg);

  if (!dumpMasks.empty()) {
    fs::create_directories(dumpMasks);
    imageio::save_png_gray((fs::path(dumpMasks) / "feature_mask.png").string(),
                           det.diagnostics.mask.featureMask);
    imageio::save_png_gray((fs::path(dumpMasks) / "frame_mask.png").string(),
                           det.diagnostics.mask.frameMask);
  }
  if (!dumpMaps.empty()) {
    fs::create_directories(dumpMaps);
    imageio::save_png_gray((fs::path(dumpMaps) / "difference.png").string(),
                           normalized_copy(det.diagnostics.difference));
    imageio::save_png_gray((fs::path(dumpMaps) / "color_map.png").string(),
                           det.diagnostics.colorMap);
    imageio::save_png_gray((fs::path(dumpMaps) / "location_map.png").string(),
                           det.diagnostics.locationMap);
    imageio::save_png_gray((fs::path(dumpMaps) / "target_map.png").string(),
                           det.diagnostics.targetMap);
  }
  if (!dumpTrace.empty()) {
    write_trace_csv(dumpTrace, det.diagnostics.trace);
  }

  std::printf("%.4f,%.4f,%.4f,%.4f,%.6f\n", det.box.x, det.box.y, det.box.w, det.box.h, det.score);
  return kExitOk;
}

int run_make_dataset(const std::string& root, std::uint32_t seed, const std::string& excludePath,
                     const std::string& reannotationsDir, const std::string& outPath,
                     bool validate) {
  dataset::LoadOptions options;
  if (!excludePath.empty()) {
    options.exclusionList = excludePath;
  }
  if (!reannotationsDir.empty()) {
    options.reannotationsDir = reannotationsDir;
  }
  const std::vector<dataset::SequenceManifest> sequences =
      dataset::load_dataset_root(root, options);
  const std::vector<dataset::PairRecord> records = dataset::build_dataset(sequences, seed);
  dataset::write_pairs_json(outPath, records);

  std::size_t included = 0;
  for (const auto& seq : sequences) {
    included += seq.excluded ? 0 : 1;
  }
  std::printf("pairs=%zu sequences=%zu excluded=%zu out=%s\n", records.size(), included,
              sequences.size() - included, outPath.c_str());

  if (validate) {
    const dataset::ValidationReport report = dataset::validate_dataset(records);
    for (const std::string& violation : report.violations) {
      std::fprintf(stderr, "violation: %s\n", violation.c_str());
    }
    if (!report.ok()) {
      return kExitData;
    }
  }
  return kExitOk;
}

int run_eval(const std::string& pairsPath, const BackendFlags& backend,
             const std::string& configPath, const std::string& outPath,
             const std::string& curvesPath, int jobs) {
  const DetectorConfig cfg = load_config(configPath);
  const std::vector<dataset::PairRecord> pairs = dataset::read_pairs_json(pairsPath);
  const features::FeatureBackend be(backend.spec());
  const evalharness::Detector detector = [&](const Frame& f1, const Frame& f2) {
    return boxopt::detect(f1, f2, be, cfg).box;
  };
  const evalharness::EvalResult result = evalharness::evaluate(pairs, detector, jobs);
  if (!outPath.empty()) {
    evalharness::write_results_csv(outPath, result);
  }
  if (!curvesPath.empty()) {
    evalharness::write_curves_csv(curvesPath, result);
  }
  std::printf("pairs=%zu auc=%.6f pre30=%.6f\n", result.perPair.size(), result.auc, result.pre30);
  return kExitOk;
}

int run_ablate(const std::string& pairsPath, const std::string& methodsText,
               const std::string& modelPath, const std::string& configPath,
               const std::string& outPath, int jobs) {
  const DetectorConfig cfg = load_config(configPath);
  const std::vector<dataset::PairRecord> pairs = dataset::read_pairs_json(pairsPath);
  const std::vector<int> ids = parse_method_list(methodsText);
  const std::vector<evalharness::AblationMethod> all = evalharness::ablation_methods(modelPath);
  std::vector<evalharness::AblationMethod> selected;
  for (int id : ids) {
    const auto it = std::find_if(all.begin(), all.end(),
                                 [id](const auto& m) { return m.id == id; });
    if (it == all.end()) {
      throw CLI::ValidationError("--methods: unknown method id " + std::to_string(id));
    }
    selected.push_back(*it);
  }
  const std::vector<evalharness::AblationOutcome> outcomes =
      evalharness::run_ablation(pairs, selected, cfg, jobs);
  evalharness::write_ablation_csv(outPath, outcomes);
  for (const auto& outcome : outcomes) {
    std::printf("method=%d features=%s sr=%.6f pre30=%.6f\n", outcome.method.id,
                outcome.method.featuresLabel.c_str(), outcome.result.auc, outcome.result.pre30);
  }
  return kExitOk;
}

int run_plot(const std::vector<std::string>& curveFiles, const std::string& outDir) {
  std::vector<plot::Series> successSeries;
  std::vector<plot::Series> precisionSeries;
  for (const std::string& file : curveFiles) {
    std::vector<double> success;
    std::vector<double> precision;
    evalharness::read_curves_csv(file, success, precision);
    const std::string label = fs::path(file).stem().string();
    if (!success.empty()) {
      plot::Series s;
      s.label = label;
      for (std::size_t i = 0; i < success.size(); ++i) {
        s.xs.push_back(static_cast<double>(i) / std::max<std::size_t>(success.size() - 1, 1));
        s.ys.push_back(success[i]);
      }
      successSeries.push_back(std::move(s));
    }
    if (!precision.empty()) {
      plot::Series p;
      p.label = label;
      for (std::size_t i = 0; i < precision.size(); ++i) {
        p.xs.push_back(static_cast<double>(i));
        p.ys.push_back(precision[i]);
      }
      precisionSeries.push_back(std::move(p));
    }
  }
  fs::create_directories(outDir);
  if (!successSeries.empty()) {
    plot::PlotSpec spec;
    spec.title = "SUCCESS PLOT";
    spec.xLabel = "IOU THRESHOLD";
    spec.yLabel = "SUCCESS RATE";
    spec.xMax = 1.0;
    plot::write_plot_png(fs::path(outDir) / "success.png", spec, successSeries);
  }
  if (!precisionSeries.empty()) {
    plot::PlotSpec spec;
    spec.title = "PRECISION PLOT";
    spec.xLabel = "CENTER ERROR (PX)";
    spec.yLabel = "PRECISION";
    spec.xMax = static_cast<double>(evalharness::kPrecisionSamples - 1);
    plot::write_plot_png(fs::path(outDir) / "precision.png", spec, precisionSeries);
  }
  std::printf("plots=%s\n", outDir.c_str());
  return kExitOk;
}

int run_track(const std::string& seqDir, const std::string& initText, const std::string& assist,
              const std::string& configPath, const std::string& outPath) {
  const DetectorConfig cfg = load_config(configPath);
  const std::vector<std::string> paths = list_sequence_frames(seqDir);
  std::vector<Frame> frames;
  frames.reserve(paths.size());
  for (const std::string& path : paths) {
    frames.push_back(imageio::load_frame(path));
  }
  const Box init = dataset::parse_ground_truth_line(initText);
  const std::vector<Box> boxes =
      trackassist::baseline_track(frames, init, assist == "on", cfg);

  std::ofstream out(outPath);
  if (!out) {
    throw Error("cannot write boxes file: " + outPath);
  }
  out << "frame,x,y,w,h\n";
  char line[160];
  for (std::size_t i = 0; i < boxes.size(); ++i) {
    std::snprintf(line, sizeof(line), "%zu,%.4f,%.4f,%.4f,%.4f\n", i + 1, boxes[i].x, boxes[i].y,
                  boxes[i].w, boxes[i].h);
    out << line;
  }
  std::printf("frames=%zu assist=%s out=%s\n", boxes.size(), assist.c_str(), outPath.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Class-agnostic moving target detection from frame pairs"};
  app.set_version_flag("--version", "motionbox 0.1.0");
  app.require_subcommand(1);

  // detect
  CLI::App* detect = app.add_subcommand("detect", "Detect the moving target in a frame pair");
  std::vector<std::string> pairPaths;
  detect->add_option("--pair", pairPaths, "Two image files: earlier frame, later frame")
      ->expected(2)
      ->required();
  BackendFlags detectBackend;
  detectBackend.attach(detect);
  std::string detectConfig;
  detect->add_option("--config", detectConfig, "Detector config file (key = value lines)");
  std::string dumpMasks, dumpMaps, dumpTrace;
  detect->add_option("--dump-masks", dumpMasks, "Directory for motion mask images");
  detect->add_option("--dump-maps", dumpMaps, "Directory for probability map images");
  detect->add_option("--dump-trace", dumpTrace, "CSV file for the optimizer trace");

  // make-dataset
  CLI::App* makeDataset =
      app.add_subcommand("make-dataset", "Build an evaluation pair list from sequences");
  std::string datasetRoot, excludePath, reannotationsDir, pairsOut;
  std::uint32_t seed = 0;
  bool validateFlag = false;
  makeDataset->add_option("--root", datasetRoot, "Directory of sequence directories")->required();
  makeDataset->add_option("--seed", seed, "Seed for the pair intervals")->required();
  makeDataset->add_option("--exclude", excludePath, "Exclusion list (name reason per line)");
  makeDataset->add_option("--reannotations", reannotationsDir,
                          "Directory of replacement annotation files");
  makeDataset->add_option("--out", pairsOut, "Output pair list (JSON)")->required();
  makeDataset->add_flag("--validate", validateFlag, "Check the emitted pairs and report");

  // eval
  CLI::App* eval = app.add_subcommand("eval", "Evaluate detection over a pair list");
  std::string evalPairs, evalOut, evalCurves, evalConfig;
  int evalJobs = 1;
  eval->add_option("--pairs", evalPairs, "Pair list from make-dataset")->required();
  BackendFlags evalBackend;
  evalBackend.attach(eval);
  eval->add_option("--config", evalConfig, "Detector config file");
  eval->add_option("--out", evalOut, "Per-pair results CSV");
  eval->add_option("--curves", evalCurves, "Success/precision curves CSV");
  eval->add_option("--jobs", evalJobs, "Parallel workers")->check(CLI::PositiveNumber);

  // ablate
  CLI::App* ablate = app.add_subcommand("ablate", "Run the module-ablation method matrix");
  std::string ablatePairs, ablateMethods = "0-10", ablateModel, ablateConfig, ablateOut;
  int ablateJobs = 1;
  ablate->add_option("--pairs", ablatePairs, "Pair list from make-dataset")->required();
  ablate->add_option("--methods", ablateMethods, "Method ids, e.g. 0-10 or 0,2,7");
  ablate->add_option("--model", ablateModel, "Network weights for deep-feature methods");
  ablate->add_option("--config", ablateConfig, "Detector config file");
  ablate->add_option("--out", ablateOut, "Ablation table CSV")->required();
  ablate->add_option("--jobs", ablateJobs, "Parallel workers")->check(CLI::PositiveNumber);

  // plot
  CLI::App* plotCmd = app.add_subcommand("plot", "Render curve CSVs to PNG images");
  std::vector<std::string> curveFiles;
  std::string plotOut;
  plotCmd->add_option("--curves", curveFiles, "Curves CSV (repeat to overlay)")->required();
  plotCmd->add_option("--out", plotOut, "Output directory")->required();

  // track
  CLI::App* track = app.add_subcommand("track", "Run the baseline tracker over a sequence");
  std::string trackSeq, trackInit, trackAssist = "off", trackConfig, trackOut;
  track->add_option("--seq", trackSeq, "Sequence directory")->required();
  track->add_option("--init", trackInit, "Initial box, corner-based x,y,w,h")->required();
  track->add_option("--assist", trackAssist, "Refine each match: on or off")
      ->check(CLI::IsMember({"on", "off"}));
  track->add_option("--config", trackConfig, "Detector config file");
  track->add_option("--out", trackOut, "Per-frame boxes CSV")->required();

  try {
    app.parse(argc, argv);
    if (detect->parsed()) {
      return run_detect(pairPaths, detectBackend, detectConfig, dumpMasks, dumpMaps, dumpTrace);
    }
    if (makeDataset->parsed()) {
      return run_make_dataset(datasetRoot, seed, excludePath, reannotationsDir, pairsOut,
                              validateFlag);
    }
    if (eval->parsed()) {
      return run_eval(evalPairs, evalBackend, evalConfig, evalOut, evalCurves, evalJobs);
    }
    if (ablate->parsed()) {
      return run_ablate(ablatePairs, ablateMethods, ablateModel, ablateConfig, ablateOut,
                        ablateJobs);
    }
    if (plotCmd->parsed()) {
      return run_plot(curveFiles, plotOut);
    }
    if (track->parsed()) {
      return run_track(trackSeq, trackInit, trackAssist, trackConfig, trackOut);
    }
    std::fprintf(stderr, "error: no command\n");
    return kExitUsage;
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  } catch (const Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitData;
  }
}
