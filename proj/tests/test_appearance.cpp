#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "motionbox/appearance.hpp"
#include "support/fixtures.hpp"

using namespace motionbox;
using namespace motionbox::appearance;
using testsupport::random_frame;
using testsupport::random_mask;
using testsupport::seeded;

TEST_SUITE("appearance") {

TEST_CASE("color bins quantize each channel into 16 parts") {
  CHECK(color_bin(0, 0, 0) == 0);
  CHECK(color_bin(15, 15, 15) == 0);
  CHECK(color_bin(255, 255, 255) == kHistogramSize - 1);
  CHECK(color_bin(16, 0, 0) == 256);
  CHECK(color_bin(0, 16, 0) == 16);
  CHECK(color_bin(0, 0, 16) == 1);
  CHECK(color_bin(40, 200, 100) == (40 / 16) * 256 + (200 / 16) * 16 + 100 / 16);
}

TEST_CASE("an all-black frame lands entirely in bin zero") {
  const Frame black(4, 4);
  const ColorHistogram hist = masked_histogram(black);
  CHECK(hist.total == 16.0);
  CHECK(hist.bins[0] == 16.0);
  for (int c = 1; c < kHistogramSize; ++c) CHECK(hist.bins[static_cast<std::size_t>(c)] == 0.0);
}

TEST_CASE("a white pixel lands in the last bin") {
  Frame frame(4, 4);
  frame.set_pixel(2, 1, 255, 255, 255);
  const ColorHistogram hist = masked_histogram(frame);
  CHECK(hist.bins[kHistogramSize - 1] == 1.0);
  CHECK(hist.bins[0] == 15.0);
}

TEST_CASE("masked histograms count only pixels under the mask") {
  auto rng = seeded(81);
  const Frame frame = random_frame(12, 10, rng);
  const BinaryMask mask = random_mask(12, 10, rng, 0.4);

  const ColorHistogram hist = masked_histogram(frame, &mask);
  CHECK(hist.total == static_cast<double>(mask.count_set()));

  std::vector<double> want(kHistogramSize, 0.0);
  for (int y = 0; y < 10; ++y)
    for (int x = 0; x < 12; ++x)
      if (mask.at(x, y))
        want[static_cast<std::size_t>(
            color_bin(frame.at(x, y, 0), frame.at(x, y, 1), frame.at(x, y, 2)))] += 1.0;
  CHECK(hist.bins == want);
}

TEST_CASE("histogram rejects mismatched mask dimensions") {
  auto rng = seeded(82);
  const Frame frame = random_frame(8, 8, rng);
  const BinaryMask mask(9, 8, 1);
  CHECK_THROWS_AS(masked_histogram(frame, &mask), Error);
}

TEST_CASE("posterior reduces to the per-bin count ratio") {
  ColorHistogram full;
  full.bins[100] = 8.0;
  full.bins[200] = 4.0;
  full.total = 12.0;
  ColorHistogram moving;
  moving.bins[100] = 2.0;
  moving.total = 2.0;

  const ColorPosterior posterior = bayes_posterior(moving, full);
  CHECK(posterior.probability[100] == doctest::Approx(0.25));
  CHECK(posterior.probability[200] == 0.0);
  CHECK(posterior.probability[0] == 0.0);
  CHECK(posterior.pMovingArea == doctest::Approx(2.0 / 12.0));
}

TEST_CASE("a mask covering everything gives probability one on occupied bins") {
  auto rng = seeded(83);
  const Frame frame = random_frame(10, 10, rng);
  const ColorHistogram full = masked_histogram(frame);
  const BinaryMask all(10, 10, 1);
  const ColorHistogram moving = masked_histogram(frame, &all);

  const ColorPosterior posterior = bayes_posterior(moving, full);
  CHECK(posterior.pMovingArea == doctest::Approx(1.0));
  for (int c = 0; c < kHistogramSize; ++c) {
    if (full.bins[static_cast<std::size_t>(c)] > 0.0)
      CHECK(posterior.probability[static_cast<std::size_t>(c)] == doctest::Approx(1.0));
    else
      CHECK(posterior.probability[static_cast<std::size_t>(c)] == 0.0);
  }
}

TEST_CASE("three-factor form of the posterior equals the count ratio") {
  auto rng = seeded(84);
  for (int trial = 0; trial < 10; ++trial) {
    const Frame frame = random_frame(16, 12, rng);
    BinaryMask mask = random_mask(16, 12, rng, 0.3);
    mask.at(0, 0) = 1;  // never empty
    const ColorHistogram full = masked_histogram(frame);
    const ColorHistogram moving = masked_histogram(frame, &mask);
    const ColorPosterior posterior = bayes_posterior(moving, full);

    // P(mot|c) = P(c|mot) P(mot) / P(c), each factor from the histograms.
    const double pMot = moving.total / full.total;
    for (int c = 0; c < kHistogramSize; ++c) {
      const double pc = full.bins[static_cast<std::size_t>(c)] / full.total;
      if (pc == 0.0) {
        CHECK(posterior.probability[static_cast<std::size_t>(c)] == 0.0);
        continue;
      }
      const double pcGivenMot = moving.bins[static_cast<std::size_t>(c)] / moving.total;
      const double threeFactor = pcGivenMot * pMot / pc;
      CHECK(std::abs(posterior.probability[static_cast<std::size_t>(c)] - threeFactor) <= 1e-12);
    }
    CHECK(posterior.pMovingArea == doctest::Approx(pMot));
  }
}

TEST_CASE("posterior error paths") {
  auto rng = seeded(85);
  const Frame frame = random_frame(8, 8, rng);
  const ColorHistogram full = masked_histogram(frame);

  const ColorHistogram empty;
  CHECK_THROWS_AS(bayes_posterior(empty, full), NoMotionError);
  CHECK_THROWS_AS(bayes_posterior(full, empty), Error);

  // More moving-area pixels of a color than the whole frame has: impossible
  // histograms are rejected rather than clamped.
  ColorHistogram excess = full;
  excess.bins[0] += 1.0;
  excess.total += 1.0;
  CHECK_THROWS_WITH_AS(bayes_posterior(excess, full), doctest::Contains("exceeds"), Error);
}

TEST_CASE("back-projection looks up each pixel's bin") {
  auto rng = seeded(86);
  const Frame frame = random_frame(14, 9, rng);
  BinaryMask mask = random_mask(14, 9, rng, 0.5);
  mask.at(3, 3) = 1;
  const ColorPosterior posterior =
      bayes_posterior(masked_histogram(frame, &mask), masked_histogram(frame));

  const ProbabilityMap map = color_probability_map(frame, posterior);
  CHECK(map.width == 14);
  CHECK(map.height == 9);
  for (int y = 0; y < 9; ++y)
    for (int x = 0; x < 14; ++x) {
      const int bin = color_bin(frame.at(x, y, 0), frame.at(x, y, 1), frame.at(x, y, 2));
      CHECK(map.at(x, y) == posterior.probability[static_cast<std::size_t>(bin)]);
      CHECK(map.at(x, y) >= 0.0);
      CHECK(map.at(x, y) <= 1.0);
    }
}

TEST_CASE("cross erosion strips the boundary layer") {
  // A solid 3x3 block erodes to its center pixel.
  BinaryMask block(5, 5);
  for (int y = 1; y <= 3; ++y)
    for (int x = 1; x <= 3; ++x) block.at(x, y) = 1;
  const BinaryMask once = erode_cross(block);
  CHECK(once.count_set() == 1);
  CHECK(once.at(2, 2) == 1);

  // Zero padding kills pixels on the image border even in a full mask.
  const BinaryMask full(4, 4, 1);
  const BinaryMask interior = erode_cross(full);
  CHECK(interior.count_set() == 4);
  CHECK(interior.at(1, 1) == 1);
  CHECK(interior.at(2, 2) == 1);
  CHECK(interior.at(0, 0) == 0);
  CHECK(interior.at(3, 3) == 0);

  // A lone pixel has no full cross neighborhood.
  BinaryMask lone(5, 5);
  lone.at(2, 2) = 1;
  CHECK(erode_cross(lone).count_set() == 0);
}

TEST_CASE("motion center of a single pixel is that pixel") {
  BinaryMask mask(16, 16);
  mask.at(5, 7) = 1;
  const MotionCenter c = motion_center(mask);
  CHECK(c.x == 5);
  CHECK(c.y == 7);
}

TEST_CASE("motion center of a solid square is its middle") {
  BinaryMask mask(21, 21);
  for (int y = 6; y <= 14; ++y)
    for (int x = 6; x <= 14; ++x) mask.at(x, y) = 1;
  const MotionCenter c = motion_center(mask);
  CHECK(c.x == 10);
  CHECK(c.y == 10);
}

TEST_CASE("motion center settles inside the biggest blob") {
  BinaryMask mask(64, 64);
  // 11x11 blob centered at (15, 15) and a 2x2 speck at (40, 40).
  for (int y = 10; y <= 20; ++y)
    for (int x = 10; x <= 20; ++x) mask.at(x, y) = 1;
  for (int y = 40; y <= 41; ++y)
    for (int x = 40; x <= 41; ++x) mask.at(x, y) = 1;
  const MotionCenter c = motion_center(mask);
  CHECK(c.x == 15);
  CHECK(c.y == 15);
}

TEST_CASE("motion center falls back to the centroid when erosion empties the mask") {
  BinaryMask mask(16, 16);
  mask.at(2, 2) = 1;
  mask.at(5, 2) = 1;  // two isolated pixels die in one erosion step
  const MotionCenter c = motion_center(mask);
  CHECK(c.x == 4);  // llround(3.5) rounds away from zero
  CHECK(c.y == 2);
}

TEST_CASE("motion center of an empty mask reports no motion") {
  CHECK_THROWS_AS(motion_center(BinaryMask(8, 8)), NoMotionError);
}

TEST_CASE("location prior peaks at exactly one") {
  const ProbabilityMap map = location_probability_map({50, 50}, 100, 100, 0.2);
  CHECK(map.at(50, 50) == 1.0);
  CHECK(map.max_value() == 1.0);
}

TEST_CASE("location prior hits exp(-1/2) at one sigma") {
  // width 100 * fraction 0.2 = sigma 20 on both axes.
  const ProbabilityMap map = location_probability_map({50, 50}, 100, 100, 0.2);
  CHECK(map.at(70, 50) == doctest::Approx(std::exp(-0.5)).epsilon(1e-9));
  CHECK(map.at(30, 50) == doctest::Approx(std::exp(-0.5)).epsilon(1e-9));
  CHECK(map.at(50, 70) == doctest::Approx(std::exp(-0.5)).epsilon(1e-9));
  CHECK(map.at(70, 70) == doctest::Approx(std::exp(-1.0)).epsilon(1e-9));
}

TEST_CASE("location prior decays monotonically along both axes") {
  const ProbabilityMap map = location_probability_map({30, 20}, 80, 50, 0.2);
  for (int x = 31; x < 80; ++x) CHECK(map.at(x, 20) < map.at(x - 1, 20));
  for (int x = 29; x >= 0; --x) CHECK(map.at(x, 20) < map.at(x + 1, 20));
  for (int y = 21; y < 50; ++y) CHECK(map.at(30, y) < map.at(30, y - 1));
  for (int y = 19; y >= 0; --y) CHECK(map.at(30, y) < map.at(30, y + 1));
  for (double v : map.values) {
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
  }
}

TEST_CASE("location prior is anisotropic for rectangular frames") {
  // sigmaX = 0.2 * 100 = 20, sigmaY = 0.2 * 50 = 10: the same pixel offset
  // costs more vertically.
  const ProbabilityMap map = location_probability_map({50, 25}, 100, 50, 0.2);
  CHECK(map.at(60, 25) > map.at(50, 35));
  CHECK(map.at(50, 35) == doctest::Approx(std::exp(-0.5)).epsilon(1e-9));
}

TEST_CASE("location prior validates its arguments") {
  CHECK_THROWS_AS(location_probability_map({0, 0}, 0, 10, 0.2), Error);
  CHECK_THROWS_AS(location_probability_map({0, 0}, 10, 10, 0.0), Error);
  CHECK_THROWS_AS(location_probability_map({0, 0}, 10, 10, -1.0), Error);
}

}  // TEST_SUITE
