#include <doctest.h>

#include "motionbox/config.hpp"
#include "support/fixtures.hpp"

using namespace motionbox;
using testsupport::TempDir;
using testsupport::write_text;

TEST_SUITE("config") {

TEST_CASE("empty text yields the defaults") {
  const DetectorConfig cfg = parse_detector_config("");
  CHECK(cfg.binarizationRatio == doctest::Approx(0.8));
  CHECK(cfg.histogramBinsPerChannel == 16);
  CHECK(cfg.gaussianSigmaFraction == doctest::Approx(0.2));
  CHECK(cfg.penaltyLambda == doctest::Approx(0.05));
  CHECK(cfg.learningRate == doctest::Approx(50.0));
  CHECK(cfg.perturbation == doctest::Approx(1.0));
  CHECK(cfg.maxIterations == 100);
  CHECK(cfg.upsampleRebinarizeThreshold == doctest::Approx(0.5));
}

TEST_CASE("every field can be overridden") {
  const DetectorConfig cfg = parse_detector_config(
      "binarization_ratio = 0.7\n"
      "histogram_bins_per_channel = 16\n"
      "gaussian_sigma_fraction = 0.25\n"
      "penalty_lambda = 0.1\n"
      "learning_rate = 25\n"
      "perturbation = 0.5\n"
      "max_iterations = 40\n"
      "upsample_rebinarize_threshold = 0.4\n");
  CHECK(cfg.binarizationRatio == doctest::Approx(0.7));
  CHECK(cfg.gaussianSigmaFraction == doctest::Approx(0.25));
  CHECK(cfg.penaltyLambda == doctest::Approx(0.1));
  CHECK(cfg.learningRate == doctest::Approx(25.0));
  CHECK(cfg.perturbation == doctest::Approx(0.5));
  CHECK(cfg.maxIterations == 40);
  CHECK(cfg.upsampleRebinarizeThreshold == doctest::Approx(0.4));
}

TEST_CASE("comments and blank lines are ignored") {
  const DetectorConfig cfg = parse_detector_config(
      "# detector tuning\n"
      "\n"
      "penalty_lambda = 0.2   # inline comment\n"
      "   \n");
  CHECK(cfg.penaltyLambda == doctest::Approx(0.2));
}

TEST_CASE("unknown keys are rejected") {
  CHECK_THROWS_WITH_AS(parse_detector_config("penalty = 0.1\n"), doctest::Contains("penalty"),
                       Error);
}

TEST_CASE("malformed lines and values are rejected") {
  CHECK_THROWS_AS(parse_detector_config("penalty_lambda 0.1\n"), Error);
  CHECK_THROWS_AS(parse_detector_config("penalty_lambda = abc\n"), Error);
  CHECK_THROWS_AS(parse_detector_config("penalty_lambda = 0.1x\n"), Error);
}

TEST_CASE("out-of-range values fail validation") {
  CHECK_THROWS_AS(parse_detector_config("binarization_ratio = 0\n"), Error);
  CHECK_THROWS_AS(parse_detector_config("binarization_ratio = 1\n"), Error);
  CHECK_THROWS_AS(parse_detector_config("max_iterations = 0\n"), Error);
  CHECK_THROWS_AS(parse_detector_config("perturbation = 0\n"), Error);
  CHECK_THROWS_AS(parse_detector_config("learning_rate = -5\n"), Error);
  CHECK_THROWS_AS(parse_detector_config("histogram_bins_per_channel = 8\n"), Error);
  CHECK_THROWS_AS(parse_detector_config("upsample_rebinarize_threshold = 1.5\n"), Error);

  DetectorConfig cfg;
  cfg.gaussianSigmaFraction = 0.0;
  CHECK_THROWS_AS(cfg.validate(), Error);
}

TEST_CASE("configs load from a file") {
  TempDir tmp;
  write_text(tmp.file("detector.cfg"), "learning_rate = 10\nmax_iterations = 7\n");
  const DetectorConfig cfg = load_detector_config(tmp.file("detector.cfg"));
  CHECK(cfg.learningRate == doctest::Approx(10.0));
  CHECK(cfg.maxIterations == 7);

  CHECK_THROWS_AS(load_detector_config(tmp.file("missing.cfg")), Error);
}

}  // TEST_SUITE
