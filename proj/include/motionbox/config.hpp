#pragma once

#include <string>

#include "motionbox/types.hpp"

namespace motionbox {

/// Detector tuning knobs. Defaults are the working values; every field can be
/// overridden from a key = value config file (see load_detector_config).
struct DetectorConfig {
  double binarizationRatio = 0.8;        // mask threshold as fraction of the max difference
  int histogramBinsPerChannel = 16;      // fixed at 16 (4096-bin RGB histogram)
  double gaussianSigmaFraction = 0.2;    // location prior sigma as fraction of each image side
  double penaltyLambda = 0.05;           // size reward coefficient in the box score
  double learningRate = 50.0;            // pixels per unit score gradient
  double perturbation = 1.0;             // finite-difference step, pixels
  int maxIterations = 100;               // optimizer iteration cap
  double upsampleRebinarizeThreshold = 0.5;  // cut level after cubic upsampling of a mask

  void validate() const;
};

/// Parse a config file of `key = value` lines ('#' comments, blank lines
/// allowed). Keys are the snake_case field names; unknown keys are errors.
/// Every field is optional and falls back to the default above.
DetectorConfig load_detector_config(const std::string& path);

/// Same parser over an in-memory string (used by tests and --config handling).
DetectorConfig parse_detector_config(const std::string& text);

}  // namespace motionbox
