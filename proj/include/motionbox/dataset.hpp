#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "motionbox/types.hpp"

namespace motionbox::dataset {

/// One tracking-style sequence: ordered frame paths plus a per-frame
/// ground-truth box (center-based).
struct SequenceManifest {
  std::string name;
  std::vector<std::string> framePaths;
  std::vector<Box> annotations;
  bool excluded = false;
  std::string exclusionReason;

  int frameCount() const { return static_cast<int>(framePaths.size()); }
};

/// An evaluation pair: two frames of one sequence, ground truth taken from
/// the later frame. Indices are 1-based frame numbers.
struct PairRecord {
  std::string sequence;
  int indexA = 0;
  int indexB = 0;
  Box groundTruth;
  std::string pathA;
  std::string pathB;

  std::string id() const {
    return sequence + ":" + std::to_string(indexA) + "-" + std::to_string(indexB);
  }
};

/// Parse one ground-truth line: either `x,y,w,h` (corner-based) or an
/// 8-number polygon reduced to its bounding rectangle. Commas and whitespace
/// both separate. Returns a center-based Box.
Box parse_ground_truth_line(const std::string& line);

struct LoadOptions {
  /// Exclusion list: one `name reason...` per line.
  std::filesystem::path exclusionList;
  /// Directory of replacement annotation files, `<sequence>.txt` each, used
  /// instead of the sequence's own ground-truth file when present.
  std::filesystem::path reannotationsDir;
};

/// Load one sequence directory: image files (directly inside, or in an img/
/// subdirectory) sorted by name, plus groundtruth_rect.txt or
/// groundtruth.txt. Annotation and frame counts must match.
SequenceManifest load_sequence(const std::filesystem::path& dir, const LoadOptions& options = {});

/// Load every subdirectory of root as a sequence, sorted by name.
std::vector<SequenceManifest> load_dataset_root(const std::filesystem::path& root,
                                                const LoadOptions& options = {});

/// Pair selection: anchors at frames 1, 51, 101, ...; each anchor gets a
/// partner at a seeded random interval of 1 to 10 frames; pairs whose
/// partner falls past the end are dropped. The raw mt19937 output stream is
/// used directly (modulo 10) so the result is identical across platforms.
std::vector<PairRecord> build_pairs(const SequenceManifest& manifest, std::uint32_t seed);

/// build_pairs over all non-excluded sequences. Each sequence draws from its
/// own generator seeded by seed mixed with the sequence name, so the output
/// does not depend on processing order.
std::vector<PairRecord> build_dataset(std::span<const SequenceManifest> sequences,
                                      std::uint32_t seed);

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Static checks over a pair list: interval bounds, 50-frame anchor stride
/// within each sequence, file existence, and ground-truth-inside-frame
/// (decoding each pair's second frame for its dimensions).
ValidationReport validate_dataset(const std::vector<PairRecord>& records);

void write_pairs_json(const std::filesystem::path& path, const std::vector<PairRecord>& records);
std::vector<PairRecord> read_pairs_json(const std::filesystem::path& path);

}  // namespace motionbox::dataset
