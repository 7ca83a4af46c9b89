#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "motionbox/motion.hpp"
#include "support/fixtures.hpp"

using namespace motionbox;
using namespace motionbox::motion;
using features::BackendKind;
using features::FeatureBackend;
using features::FeatureMap;
using testsupport::random_frame;
using testsupport::seeded;

namespace {

FeatureMap random_feature_map(int width, int height, int channels, std::mt19937& rng) {
  FeatureMap map;
  map.width = width;
  map.height = height;
  map.channels = channels;
  map.stride = 1;
  map.values.resize(static_cast<std::size_t>(width) * height * channels);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (double& v : map.values) v = dist(rng);
  return map;
}

DifferenceMap from_values(int width, int height, const std::vector<double>& values) {
  Raster r(width, height);
  r.values = values;
  return DifferenceMap(std::move(r));
}

struct Centroid {
  double x = 0.0;
  double y = 0.0;
};

Centroid mask_centroid(const BinaryMask& mask) {
  Centroid c;
  double n = 0.0;
  for (int y = 0; y < mask.height; ++y)
    for (int x = 0; x < mask.width; ++x)
      if (mask.at(x, y)) {
        c.x += x;
        c.y += y;
        n += 1.0;
      }
  REQUIRE(n > 0.0);
  c.x /= n;
  c.y /= n;
  return c;
}

// Background plus a white patch at two positions; the difference signal is
// the patch's symmetric difference, centered between the two placements.
struct ShiftScene {
  Frame frame1;
  Frame frame2;
  double midX = 0.0;
  double midY = 0.0;
};

ShiftScene patch_shift_scene(std::uint32_t seed) {
  auto rng = seeded(seed);
  const Frame background = random_frame(64, 64, rng, 0, 90);
  const auto stamp = [](Frame frame, int px, int py) {
    for (int y = py; y < py + 16; ++y)
      for (int x = px; x < px + 16; ++x) frame.set_pixel(x, y, 255, 255, 255);
    return frame;
  };
  ShiftScene scene;
  scene.frame1 = stamp(background, 16, 24);
  scene.frame2 = stamp(background, 24, 24);
  scene.midX = (16 + 24) / 2.0 + 8.0;
  scene.midY = 24 + 8.0;
  return scene;
}

}  // namespace

TEST_SUITE("motion") {

TEST_CASE("identical feature maps difference to zero") {
  auto rng = seeded(61);
  const FeatureMap f = random_feature_map(6, 5, 4, rng);
  const DifferenceMap diff = feature_difference(f, f);
  CHECK(diff.width == 6);
  CHECK(diff.height == 5);
  for (double v : diff.values) CHECK(v == 0.0);
}

TEST_CASE("channel magnitudes accumulate per cell") {
  FeatureMap f1;
  f1.width = 3;
  f1.height = 2;
  f1.channels = 2;
  f1.stride = 1;
  f1.values.assign(12, 0.0);
  FeatureMap f2 = f1;
  f2.at(1, 1, 0) = 3.0;
  f2.at(1, 1, 1) = -4.0;

  const DifferenceMap diff = feature_difference(f1, f2);
  CHECK(diff.at(1, 1) == doctest::Approx(7.0));
  CHECK(diff.at(0, 0) == 0.0);
  CHECK(diff.at(2, 1) == 0.0);
}

TEST_CASE("difference equals a naive per-cell loop") {
  auto rng = seeded(62);
  const FeatureMap f1 = random_feature_map(9, 7, 5, rng);
  const FeatureMap f2 = random_feature_map(9, 7, 5, rng);
  const DifferenceMap diff = feature_difference(f1, f2);
  for (int y = 0; y < 7; ++y)
    for (int x = 0; x < 9; ++x) {
      double want = 0.0;
      for (int c = 0; c < 5; ++c) want += std::abs(f1.at(x, y, c) - f2.at(x, y, c));
      CHECK(diff.at(x, y) == doctest::Approx(want).epsilon(1e-12));
    }
}

TEST_CASE("difference is symmetric in its arguments") {
  auto rng = seeded(63);
  const FeatureMap f1 = random_feature_map(8, 8, 3, rng);
  const FeatureMap f2 = random_feature_map(8, 8, 3, rng);
  CHECK(feature_difference(f1, f2).values == feature_difference(f2, f1).values);
}

TEST_CASE("shape mismatches are rejected") {
  auto rng = seeded(64);
  const FeatureMap f1 = random_feature_map(8, 8, 3, rng);
  const FeatureMap narrow = random_feature_map(7, 8, 3, rng);
  const FeatureMap deep = random_feature_map(8, 8, 4, rng);
  CHECK_THROWS_AS(feature_difference(f1, narrow), Error);
  CHECK_THROWS_AS(feature_difference(f1, deep), Error);
}

TEST_CASE("binarize thresholds at a fraction of the maximum") {
  const DifferenceMap diff = from_values(3, 1, {10.0, 8.0, 7.9});
  const BinaryMask mask = binarize(diff, 0.8);
  CHECK(mask.at(0, 0) == 1);
  CHECK(mask.at(1, 0) == 1);  // exactly at the threshold
  CHECK(mask.at(2, 0) == 0);
}

TEST_CASE("all-zero difference binarizes to an empty mask") {
  const BinaryMask mask = binarize(from_values(4, 3, std::vector<double>(12, 0.0)), 0.8);
  CHECK(mask.count_set() == 0);
}

TEST_CASE("binarize matches a naive thresholding loop") {
  auto rng = seeded(65);
  std::uniform_real_distribution<double> dist(0.0, 5.0);
  Raster r(11, 9);
  for (double& v : r.values) v = dist(rng);
  const DifferenceMap diff{Raster(r)};
  const BinaryMask mask = binarize(diff, 0.8);
  const double threshold = 0.8 * r.max_value();
  for (int y = 0; y < 9; ++y)
    for (int x = 0; x < 11; ++x) CHECK(mask.at(x, y) == (r.at(x, y) >= threshold ? 1 : 0));
}

TEST_CASE("the maximum cell is always set when any difference exists") {
  auto rng = seeded(66);
  for (int trial = 0; trial < 20; ++trial) {
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    Raster r(8, 8);
    for (double& v : r.values) v = dist(rng);
    const BinaryMask mask = binarize(DifferenceMap{Raster(r)}, 0.999);
    CHECK(mask.count_set() >= 1);
  }
}

TEST_CASE("binarization is invariant to positive scaling") {
  auto rng = seeded(67);
  std::uniform_real_distribution<double> dist(0.0, 3.0);
  Raster base(10, 10);
  for (double& v : base.values) v = dist(rng);
  const BinaryMask want = binarize(DifferenceMap{Raster(base)}, 0.8);
  for (const double k : {0.1, 3.0, 1000.0}) {
    Raster scaled = base;
    for (double& v : scaled.values) v *= k;
    const BinaryMask got = binarize(DifferenceMap{std::move(scaled)}, 0.8);
    CHECK(got.values == want.values);
  }
}

TEST_CASE("binarize rejects ratios outside (0,1)") {
  const DifferenceMap diff = from_values(2, 1, {1.0, 2.0});
  CHECK_THROWS_AS(binarize(diff, 0.0), Error);
  CHECK_THROWS_AS(binarize(diff, 1.0), Error);
  CHECK_THROWS_AS(binarize(diff, -0.5), Error);
}

TEST_CASE("mask upsampling keeps the indicator property") {
  BinaryMask small(4, 4);
  small.at(1, 1) = 1;
  small.at(2, 1) = 1;
  small.at(1, 2) = 1;
  small.at(2, 2) = 1;
  const BinaryMask big = upsample_mask(small, 32, 32, 0.5);
  CHECK(big.width == 32);
  CHECK(big.height == 32);
  for (auto v : big.values) CHECK((v == 0 || v == 1));
  CHECK(big.count_set() > 0);
  // The set region stays centered.
  const Centroid c = mask_centroid(big);
  CHECK(c.x == doctest::Approx(15.5).epsilon(0.1));
  CHECK(c.y == doctest::Approx(15.5).epsilon(0.1));

  const BinaryMask full = upsample_mask(BinaryMask(4, 4, 1), 16, 16, 0.5);
  CHECK(full.count_set() == 16 * 16);
}

TEST_CASE("identical frames produce an empty motion mask") {
  auto rng = seeded(68);
  const Frame frame = random_frame(48, 48, rng);
  const FeatureBackend backend({BackendKind::Raw, "", ""});
  const DetectorConfig cfg;
  const MotionExtraction ext = extract_motion(frame, frame, backend, cfg);
  CHECK(ext.mask.nonZeroCount == 0);
  CHECK(ext.mask.frameMask.count_set() == 0);
  CHECK(ext.mask.featureMask.count_set() == 0);
  CHECK(ext.mask.frameMask.width == 48);
  CHECK(ext.mask.frameMask.height == 48);
}

TEST_CASE("a moving patch dominates the motion mask") {
  const ShiftScene scene = patch_shift_scene(69);
  const DetectorConfig cfg;
  const MotionMask mask =
      extract_motion_mask(scene.frame1, scene.frame2, {BackendKind::Raw, "", ""}, cfg);
  REQUIRE(mask.nonZeroCount > 0);
  CHECK(mask.nonZeroCount == mask.frameMask.count_set());

  const Centroid c = mask_centroid(mask.frameMask);
  CHECK(std::abs(c.x - scene.midX) <= 8.0);
  CHECK(std::abs(c.y - scene.midY) <= 8.0);

  // Everything the mask marks lies in the union of the two patch rectangles.
  for (int y = 0; y < 64; ++y)
    for (int x = 0; x < 64; ++x)
      if (mask.frameMask.at(x, y)) {
        const bool inUnion = x >= 16 && x < 40 && y >= 24 && y < 40;
        CHECK(inUnion);
      }
}

TEST_CASE("a global intensity shift does not move the mask") {
  ShiftScene scene = patch_shift_scene(70);
  for (auto& v : scene.frame2.data)
    v = static_cast<std::uint8_t>(std::min(255, static_cast<int>(v) + 10));
  const DetectorConfig cfg;
  const MotionMask mask =
      extract_motion_mask(scene.frame1, scene.frame2, {BackendKind::Raw, "", ""}, cfg);
  REQUIRE(mask.nonZeroCount > 0);
  const Centroid c = mask_centroid(mask.frameMask);
  CHECK(std::abs(c.x - scene.midX) <= 8.0);
  CHECK(std::abs(c.y - scene.midY) <= 8.0);
}

TEST_CASE("frame size mismatches are rejected") {
  auto rng = seeded(71);
  const Frame a = random_frame(48, 48, rng);
  const Frame b = random_frame(48, 40, rng);
  const FeatureBackend backend({BackendKind::Raw, "", ""});
  CHECK_THROWS_AS(extract_motion(a, b, backend, DetectorConfig{}), Error);
}

TEST_CASE("hog-based masks are upsampled to frame resolution") {
  const ShiftScene scene = patch_shift_scene(72);
  const DetectorConfig cfg;
  const MotionMask mask =
      extract_motion_mask(scene.frame1, scene.frame2, {BackendKind::Hog, "", ""}, cfg);
  CHECK(mask.featureMask.width == 8);
  CHECK(mask.featureMask.height == 8);
  CHECK(mask.frameMask.width == 64);
  CHECK(mask.frameMask.height == 64);
  CHECK(mask.nonZeroCount == mask.frameMask.count_set());
}

TEST_CASE("fused masks are the pixelwise OR") {
  MotionMask a;
  a.featureMask = BinaryMask(6, 4);
  a.frameMask = BinaryMask(6, 4);
  a.frameMask.at(1, 1) = 1;
  a.frameMask.at(2, 2) = 1;
  a.nonZeroCount = 2;
  MotionMask b = a;
  b.frameMask = BinaryMask(6, 4);
  b.frameMask.at(2, 2) = 1;
  b.frameMask.at(4, 3) = 1;
  b.nonZeroCount = 2;

  const std::vector<MotionMask> masks{a, b};
  const MotionMask fused = fuse_masks(masks);
  CHECK(fused.nonZeroCount == 3);
  CHECK(fused.frameMask.at(1, 1) == 1);
  CHECK(fused.frameMask.at(2, 2) == 1);
  CHECK(fused.frameMask.at(4, 3) == 1);
  CHECK(fused.frameMask.at(0, 0) == 0);
  CHECK(fused.featureMask.values == fused.frameMask.values);
}

TEST_CASE("fusion validates its inputs") {
  CHECK_THROWS_AS(fuse_masks({}), Error);

  MotionMask a;
  a.frameMask = BinaryMask(6, 4);
  MotionMask b;
  b.frameMask = BinaryMask(5, 4);
  const std::vector<MotionMask> masks{a, b};
  CHECK_THROWS_AS(fuse_masks(masks), Error);
}

}  // TEST_SUITE
