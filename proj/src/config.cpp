#include "motionbox/config.hpp"

#include <fstream>
#include <sstream>

namespace motionbox {

void DetectorConfig::validate() const {
  if (!(binarizationRatio > 0.0 && binarizationRatio < 1.0))
    throw Error("config: binarization_ratio must lie in (0, 1)");
  if (histogramBinsPerChannel != 16)
    throw Error("config: histogram_bins_per_channel only supports 16");
  if (!(gaussianSigmaFraction > 0.0))
    throw Error("config: gaussian_sigma_fraction must be positive");
  if (maxIterations < 1) throw Error("config: max_iterations must be >= 1");
  if (!(perturbation > 0.0)) throw Error("config: perturbation must be positive");
  if (!(learningRate > 0.0)) throw Error("config: learning_rate must be positive");
  if (!(upsampleRebinarizeThreshold > 0.0 && upsampleRebinarizeThreshold < 1.0))
    throw Error("config: upsample_rebinarize_threshold must lie in (0, 1)");
}

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double v = 0;
  try {
    v = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw Error("config: invalid numeric value for " + key + ": '" + value + "'");
  }
  if (pos != value.size())
    throw Error("config: trailing characters in value for " + key + ": '" + value + "'");
  return v;
}

}  // namespace

DetectorConfig parse_detector_config(const std::string& text) {
  DetectorConfig cfg;
  std::istringstream in(text);
  std::string line;
  int lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error("config: line " + std::to_string(lineNo) + " is not 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "binarization_ratio") {
      cfg.binarizationRatio = parse_double(key, value);
    } else if (key == "histogram_bins_per_channel") {
      cfg.histogramBinsPerChannel = static_cast<int>(parse_double(key, value));
    } else if (key == "gaussian_sigma_fraction") {
      cfg.gaussianSigmaFraction = parse_double(key, value);
    } else if (key == "penalty_lambda") {
      cfg.penaltyLambda = parse_double(key, value);
    } else if (key == "learning_rate") {
      cfg.learningRate = parse_double(key, value);
    } else if (key == "perturbation") {
      cfg.perturbation = parse_double(key, value);
    } else if (key == "max_iterations") {
      cfg.maxIterations = static_cast<int>(parse_double(key, value));
    } else if (key == "upsample_rebinarize_threshold") {
      cfg.upsampleRebinarizeThreshold = parse_double(key, value);
    } else {
      throw Error("config: unknown key '" + key + "'");
    }
  }
  cfg.validate();
  return cfg;
}

DetectorConfig load_detector_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("config: cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_detector_config(ss.str());
}

}  // namespace motionbox
