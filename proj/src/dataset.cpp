#include "motionbox/dataset.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include <json.hpp>

#include "motionbox/imageio.hpp"

namespace fs = std::filesystem;

namespace motionbox::dataset {

namespace {

constexpr int kAnchorStride = 50;
constexpr int kMaxInterval = 10;

bool is_image_file(const fs::path& p) {
  std::string ext = p.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return ext == ".png" || ext == ".jpg" || ext == ".jpeg" || ext == ".bmp";
}

std::vector<std::string> list_frames(const fs::path& dir) {
  fs::path frameDir = dir;
  if (fs::is_directory(dir / "img")) {
    frameDir = dir / "img";
  }
  std::vector<std::string> paths;
  for (const auto& entry : fs::directory_iterator(frameDir)) {
    if (entry.is_regular_file() && is_image_file(entry.path())) {
      paths.push_back(entry.path().string());
    }
  }
  std::sort(paths.begin(), paths.end());
  return paths;
}

std::vector<Box> load_annotations(const fs::path& file) {
  std::ifstream in(file);
  if (!in) {
    throw Error("cannot open ground-truth file: " + file.string());
  }
  std::vector<Box> boxes;
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.find_first_not_of(" \t\r\n,") == std::string::npos) {
      continue;
    }
    try {
      boxes.push_back(parse_ground_truth_line(line));
    } catch (const Error& e) {
      throw Error(file.string() + ":" + std::to_string(lineNo) + ": " + e.what());
    }
  }
  return boxes;
}

// 32-bit FNV-1a, used to mix sequence names into per-sequence seeds so the
// pair list does not depend on the order sequences are processed in.
std::uint32_t fnv1a32(const std::string& s) {
  std::uint32_t h = 2166136261u;
  for (unsigned char c : s) {
    h ^= c;
    h *= 16777619u;
  }
  return h;
}

}  // namespace

Box parse_ground_truth_line(const std::string& line) {
  std::string normalized = line;
  std::replace(normalized.begin(), normalized.end(), ',', ' ');
  std::istringstream in(normalized);
  std::vector<double> nums;
  double v = 0.0;
  while (in >> v) {
    nums.push_back(v);
  }
  if (!in.eof()) {
    throw Error("ground truth: non-numeric token in line '" + line + "'");
  }
  if (nums.size() == 4) {
    const double x = nums[0];
    const double y = nums[1];
    const double w = nums[2];
    const double h = nums[3];
    if (w <= 0.0 || h <= 0.0) {
      throw Error("ground truth: non-positive box size in line '" + line + "'");
    }
    return Box{x + w / 2.0, y + h / 2.0, w, h};
  }
  if (nums.size() == 8) {
    double minX = nums[0], maxX = nums[0], minY = nums[1], maxY = nums[1];
    for (std::size_t i = 2; i < 8; i += 2) {
      minX = std::min(minX, nums[i]);
      maxX = std::max(maxX, nums[i]);
      minY = std::min(minY, nums[i + 1]);
      maxY = std::max(maxY, nums[i + 1]);
    }
    if (maxX <= minX || maxY <= minY) {
      throw Error("ground truth: degenerate polygon in line '" + line + "'");
    }
    return Box{(minX + maxX) / 2.0, (minY + maxY) / 2.0, maxX - minX, maxY - minY};
  }
  throw Error("ground truth: expected 4 or 8 numbers, got " + std::to_string(nums.size()));
}

SequenceManifest load_sequence(const fs::path& dir, const LoadOptions& options) {
  if (!fs::is_directory(dir)) {
    throw Error("sequence directory does not exist: " + dir.string());
  }
  SequenceManifest manifest;
  manifest.name = dir.filename().string();
  if (manifest.name.empty()) {  // trailing slash
    manifest.name = dir.parent_path().filename().string();
  }

  if (!options.exclusionList.empty()) {
    std::ifstream ex(options.exclusionList);
    if (!ex) {
      throw Error("cannot open exclusion list: " + options.exclusionList.string());
    }
    std::string line;
    while (std::getline(ex, line)) {
      std::istringstream in(line);
      std::string name;
      if (!(in >> name) || name[0] == '#') {
        continue;
      }
      if (name == manifest.name) {
        manifest.excluded = true;
        std::getline(in, manifest.exclusionReason);
        const auto first = manifest.exclusionReason.find_first_not_of(" \t");
        manifest.exclusionReason =
            first == std::string::npos ? "" : manifest.exclusionReason.substr(first);
        break;
      }
    }
  }

  manifest.framePaths = list_frames(dir);
  if (manifest.framePaths.empty()) {
    throw Error("sequence has no image files: " + dir.string());
  }

  fs::path gtFile;
  if (!options.reannotationsDir.empty() &&
      fs::exists(options.reannotationsDir / (manifest.name + ".txt"))) {
    gtFile = options.reannotationsDir / (manifest.name + ".txt");
  } else if (fs::exists(dir / "groundtruth_rect.txt")) {
    gtFile = dir / "groundtruth_rect.txt";
  } else if (fs::exists(dir / "groundtruth.txt")) {
    gtFile = dir / "groundtruth.txt";
  } else {
    throw Error("sequence has no ground-truth file: " + dir.string());
  }
  manifest.annotations = load_annotations(gtFile);

  if (!manifest.excluded && manifest.annotations.size() != manifest.framePaths.size()) {
    throw Error("sequence " + manifest.name + ": " + std::to_string(manifest.annotations.size()) +
                " annotations for " + std::to_string(manifest.framePaths.size()) + " frames");
  }
  return manifest;
}

std::vector<SequenceManifest> load_dataset_root(const fs::path& root, const LoadOptions& options) {
  if (!fs::is_directory(root)) {
    throw Error("dataset root does not exist: " + root.string());
  }
  std::vector<fs::path> dirs;
  for (const auto& entry : fs::directory_iterator(root)) {
    if (entry.is_directory()) {
      dirs.push_back(entry.path());
    }
  }
  std::sort(dirs.begin(), dirs.end());
  std::vector<SequenceManifest> sequences;
  sequences.reserve(dirs.size());
  for (const fs::path& dir : dirs) {
    sequences.push_back(load_sequence(dir, options));
  }
  return sequences;
}

std::vector<PairRecord> build_pairs(const SequenceManifest& manifest, std::uint32_t seed) {
  if (manifest.excluded) {
    throw Error("sequence " + manifest.name + " is excluded: " + manifest.exclusionReason);
  }
  const int n = manifest.frameCount();
  std::mt19937 rng(seed);
  std::vector<PairRecord> records;
  for (int anchor = 1; anchor <= n; anchor += kAnchorStride) {
    // The interval is always drawn, even for pairs that get dropped, so the
    // records emitted for early anchors never depend on the sequence length.
    const int interval = 1 + static_cast<int>(rng() % kMaxInterval);
    const int partner = anchor + interval;
    if (partner > n) {
      continue;
    }
    PairRecord rec;
    rec.sequence = manifest.name;
    rec.indexA = anchor;
    rec.indexB = partner;
    rec.pathA = manifest.framePaths[static_cast<std::size_t>(anchor - 1)];
    rec.pathB = manifest.framePaths[static_cast<std::size_t>(partner - 1)];
    rec.groundTruth = manifest.annotations[static_cast<std::size_t>(partner - 1)];
    records.push_back(std::move(rec));
  }
  return records;
}

std::vector<PairRecord> build_dataset(std::span<const SequenceManifest> sequences,
                                      std::uint32_t seed) {
  std::vector<PairRecord> all;
  for (const SequenceManifest& seq : sequences) {
    if (seq.excluded) {
      continue;
    }
    std::vector<PairRecord> records = build_pairs(seq, seed ^ fnv1a32(seq.name));
    all.insert(all.end(), records.begin(), records.end());
  }
  return all;
}

ValidationReport validate_dataset(const std::vector<PairRecord>& records) {
  ValidationReport report;
  std::map<std::string, int> lastAnchor;
  for (const PairRecord& rec : records) {
    const std::string id = rec.id();
    const int interval = rec.indexB - rec.indexA;
    if (interval < 1 || interval > kMaxInterval) {
      report.violations.push_back(id + ": interval out of range (" + std::to_string(interval) +
                                  ")");
    }
    const auto it = lastAnchor.find(rec.sequence);
    if (it != lastAnchor.end() &&
        (rec.indexA <= it->second || (rec.indexA - it->second) % kAnchorStride != 0)) {
      report.violations.push_back(id + ": anchor stride violation (previous anchor " +
                                  std::to_string(it->second) + ")");
    }
    lastAnchor[rec.sequence] = rec.indexA;

    for (const std::string& path : {rec.pathA, rec.pathB}) {
      if (!fs::exists(path)) {
        report.violations.push_back(id + ": missing file " + path);
      }
    }
    if (fs::exists(rec.pathB)) {
      try {
        const Frame frame = imageio::load_frame(rec.pathB);
        const Box& gt = rec.groundTruth;
        if (gt.left() < 0.0 || gt.top() < 0.0 || gt.right() > frame.width ||
            gt.bottom() > frame.height) {
          report.violations.push_back(id + ": box out of bounds");
        }
      } catch (const Error& e) {
        report.violations.push_back(id + ": unreadable frame (" + e.what() + ")");
      }
    }
  }
  return report;
}

void write_pairs_json(const fs::path& path, const std::vector<PairRecord>& records) {
  nlohmann::ordered_json doc;
  doc["pairs"] = nlohmann::ordered_json::array();
  for (const PairRecord& rec : records) {
    nlohmann::ordered_json item;
    item["sequence"] = rec.sequence;
    item["index_a"] = rec.indexA;
    item["index_b"] = rec.indexB;
    item["path_a"] = rec.pathA;
    item["path_b"] = rec.pathB;
    item["ground_truth"] = {{"x", rec.groundTruth.x},
                            {"y", rec.groundTruth.y},
                            {"w", rec.groundTruth.w},
                            {"h", rec.groundTruth.h}};
    doc["pairs"].push_back(std::move(item));
  }
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot write pairs file: " + path.string());
  }
  out << doc.dump(2) << "\n";
}

std::vector<PairRecord> read_pairs_json(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot open pairs file: " + path.string());
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed pairs file " + path.string() + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("pairs") || !doc["pairs"].is_array()) {
    throw Error("malformed pairs file " + path.string() + ": missing pairs array");
  }
  std::vector<PairRecord> records;
  try {
    for (const auto& item : doc["pairs"]) {
      PairRecord rec;
      rec.sequence = item.at("sequence").get<std::string>();
      rec.indexA = item.at("index_a").get<int>();
      rec.indexB = item.at("index_b").get<int>();
      rec.pathA = item.at("path_a").get<std::string>();
      rec.pathB = item.at("path_b").get<std::string>();
      const auto& gt = item.at("ground_truth");
      rec.groundTruth =
          Box{gt.at("x").get<double>(), gt.at("y").get<double>(), gt.at("w").get<double>(),
              gt.at("h").get<double>()};
      records.push_back(std::move(rec));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error("malformed pairs file " + path.string() + ": " + e.what());
  }
  return records;
}

}  // namespace motionbox::dataset
