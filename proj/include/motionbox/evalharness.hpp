#pragma once

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "motionbox/config.hpp"
#include "motionbox/dataset.hpp"
#include "motionbox/features.hpp"
#include "motionbox/types.hpp"

namespace motionbox::evalharness {

inline constexpr int kSuccessSamples = 101;   // IOU thresholds 0.00 .. 1.00, step 0.01
inline constexpr int kPrecisionSamples = 51;  // center-error thresholds 0 .. 50 px, step 1
/// Center error charged to a pair whose frames cannot be read at all.
inline constexpr double kUnreadablePairError = 1e9;

/// Intersection-over-union of two boxes, on the real-valued extents.
double iou(const Box& a, const Box& b);

/// Euclidean distance between box centers.
double center_error(const Box& a, const Box& b);

struct PairOutcome {
  std::string pairId;
  double iou = 0.0;
  double centerError = 0.0;
  std::string note;  // empty on success, failure reason otherwise

  bool failed() const { return !note.empty(); }
};

struct EvalResult {
  std::vector<PairOutcome> perPair;    // sorted by pair id
  std::vector<double> successCurve;    // kSuccessSamples entries, success rate at IOU > t
  std::vector<double> precisionCurve;  // kPrecisionSamples entries, rate at error <= t
  double auc = 0.0;                    // trapezoid over the success curve on [0, 1]
  double pre30 = 0.0;                  // precisionCurve at 30 px
};

using Detector = std::function<Box(const Frame&, const Frame&)>;

/// Sort outcomes by pair id and fill in the curves and summary numbers.
EvalResult aggregate(std::vector<PairOutcome> outcomes);

/// Run the detector over every pair. A no-motion result scores IOU 0 with
/// the frame diagonal as center error; an unreadable pair scores IOU 0 with
/// kUnreadablePairError. jobs > 1 evaluates pairs on that many threads; the
/// aggregation order is fixed regardless.
EvalResult evaluate(const std::vector<dataset::PairRecord>& pairs, const Detector& detector,
                    int jobs = 1);

/// One column of the module-ablation table.
struct AblationMethod {
  int id = 0;
  std::string featuresLabel;
  std::vector<features::FeatureBackendSpec> features;
  bool lpc = false;  // Gaussian location prior
  bool cpc = false;  // color posterior back-projection
  bool sgd = false;  // box optimization (off returns the seed box)
};

/// The 11 standard method columns. Methods that use the deep backend get
/// deepModelPath (and layer tags "layer3" / "layer14") in their specs;
/// running one of those with an empty path is an error at run time.
std::vector<AblationMethod> ablation_methods(const std::string& deepModelPath);

struct AblationOutcome {
  AblationMethod method;
  EvalResult result;
};

std::vector<AblationOutcome> run_ablation(const std::vector<dataset::PairRecord>& pairs,
                                          const std::vector<AblationMethod>& methods,
                                          const DetectorConfig& cfg, int jobs = 1);

/// pair_id,iou,center_error rows.
void write_results_csv(const std::filesystem::path& path, const EvalResult& result);

/// Two blocks: threshold,success_rate then threshold,precision, separated by
/// a blank line.
void write_curves_csv(const std::filesystem::path& path, const EvalResult& result);

/// Read back the two curve blocks written by write_curves_csv.
void read_curves_csv(const std::filesystem::path& path, std::vector<double>& successCurve,
                     std::vector<double>& precisionCurve);

/// Module/method matrix with SR and PRE30 rows, one column per method run.
void write_ablation_csv(const std::filesystem::path& path,
                        const std::vector<AblationOutcome>& outcomes);

}  // namespace motionbox::evalharness
