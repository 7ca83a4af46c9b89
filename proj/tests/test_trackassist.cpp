#include <cmath>
#include <random>
#include <vector>

#include <doctest.h>

#include "motionbox/appearance.hpp"
#include "motionbox/trackassist.hpp"
#include "support/fixtures.hpp"

using namespace motionbox;
using namespace motionbox::trackassist;
using testsupport::random_frame;
using testsupport::seeded;

namespace {

Frame solid(int w, int h, std::uint8_t r, std::uint8_t g, std::uint8_t b) {
  Frame f(w, h);
  f.fill(r, g, b);
  return f;
}

void paste(Frame& frame, int x0, int y0, const Frame& block) {
  for (int y = 0; y < block.height; ++y)
    for (int x = 0; x < block.width; ++x)
      for (int c = 0; c < 3; ++c) frame.at(x0 + x, y0 + y, c) = block.at(x, y, c);
}

// Blue background, one red 16x16 patch; corner puts its top-left pixel.
Frame red_patch_frame(int cornerX, int cornerY) {
  Frame f = solid(96, 96, 10, 10, 120);
  for (int y = 0; y < 16; ++y)
    for (int x = 0; x < 16; ++x) {
      f.at(cornerX + x, cornerY + y, 0) = 200;
      f.at(cornerX + x, cornerY + y, 1) = 30;
      f.at(cornerX + x, cornerY + y, 2) = 30;
    }
  return f;
}

bool inside(const Box& inner, const Box& outer, double slack = 1e-6) {
  return inner.left() >= outer.left() - slack && inner.right() <= outer.right() + slack &&
         inner.top() >= outer.top() - slack && inner.bottom() <= outer.bottom() + slack;
}

}  // namespace

TEST_SUITE("trackassist") {

TEST_CASE("the search region scales the previous box around its center") {
  auto rng = seeded(61);
  const Frame frame = random_frame(96, 96, rng);
  const Box prev{38.0, 48.0, 16.0, 16.0};
  const AssistState state = make_state(frame, prev, DetectorConfig{});

  CHECK(state.previousBox.x == prev.x);
  CHECK(state.searchRegion.w == doctest::Approx(40.0));
  CHECK(state.searchRegion.h == doctest::Approx(40.0));
  CHECK(state.searchRegion.x == doctest::Approx(38.0));
  CHECK(state.searchRegion.y == doctest::Approx(48.0));
  CHECK(inside(prev, state.searchRegion));
}

TEST_CASE("the search region is clamped at the frame border") {
  auto rng = seeded(62);
  const Frame frame = random_frame(96, 96, rng);
  const Box prev{6.0, 6.0, 8.0, 8.0};
  const AssistState state = make_state(frame, prev, DetectorConfig{});
  CHECK(state.searchRegion.w == doctest::Approx(20.0));
  CHECK(state.searchRegion.left() == doctest::Approx(0.0));
  CHECK(state.searchRegion.top() == doctest::Approx(0.0));
  CHECK(inside(prev, state.searchRegion));
  CHECK(inside(state.searchRegion, Box{48.0, 48.0, 96.0, 96.0}));
}

TEST_CASE("the state posterior separates box colors from region colors") {
  const Frame frame = red_patch_frame(30, 40);
  const Box prev{38.0, 48.0, 16.0, 16.0};  // exactly the patch
  const AssistState state = make_state(frame, prev, DetectorConfig{});

  const int redBin = appearance::color_bin(200, 30, 30);
  const int blueBin = appearance::color_bin(10, 10, 120);
  CHECK(state.posterior.probability[static_cast<std::size_t>(redBin)] ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(state.posterior.probability[static_cast<std::size_t>(blueBin)] == 0.0);
  // 256 patch pixels inside the 40x40 region crop.
  CHECK(state.posterior.pMovingArea == doctest::Approx(256.0 / 1600.0).epsilon(1e-12));
}

TEST_CASE("make_state validates the previous box") {
  auto rng = seeded(63);
  const Frame frame = random_frame(96, 96, rng);
  CHECK_THROWS_WITH_AS(make_state(frame, Box{30.0, 30.0, 0.0, 8.0}, DetectorConfig{}),
                       doctest::Contains("positive size"), Error);
  CHECK_THROWS_WITH_AS(make_state(frame, Box{2.0, 48.0, 16.0, 16.0}, DetectorConfig{}),
                       doctest::Contains("inside the frame"), Error);
}

TEST_CASE("refinement recenters a stale tracker box on the moved patch") {
  const Frame f1 = red_patch_frame(30, 40);
  const Frame f2 = red_patch_frame(36, 40);  // moved 6 px right
  const Box prev{38.0, 48.0, 16.0, 16.0};
  const AssistState state = make_state(f1, prev, DetectorConfig{});

  const Box refined = assist_refine(f1, f2, state, prev, DetectorConfig{});
  CHECK(refined.w == prev.w);
  CHECK(refined.h == prev.h);
  CHECK(std::abs(refined.x - 44.0) <= 3.0);
  CHECK(std::abs(refined.y - 48.0) <= 3.0);
  // It actually moved toward the new position.
  CHECK(refined.x > prev.x + 2.0);
}

TEST_CASE("refinement preserves size and containment on arbitrary scenes") {
  auto rng = seeded(64);
  std::uniform_real_distribution<double> pos(25.0, 55.0), side(8.0, 20.0), nudge(-3.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    CAPTURE(trial);
    const Frame f1 = random_frame(80, 80, rng);
    const Frame f2 = random_frame(80, 80, rng);
    const Box prev{pos(rng), pos(rng), side(rng), side(rng)};
    const AssistState state = make_state(f1, prev, DetectorConfig{});
    Box tracker = prev;
    tracker.x += nudge(rng);
    tracker.y += nudge(rng);
    REQUIRE(inside(tracker, state.searchRegion));

    const Box refined = assist_refine(f1, f2, state, tracker, DetectorConfig{});
    CHECK(refined.w == tracker.w);
    CHECK(refined.h == tracker.h);
    CHECK(inside(refined, state.searchRegion));
  }
}

TEST_CASE("a motionless region returns the tracker box unchanged") {
  auto rng = seeded(65);
  const Frame frame = random_frame(80, 80, rng);
  const Box prev{40.0, 40.0, 12.0, 12.0};
  const AssistState state = make_state(frame, prev, DetectorConfig{});
  Box tracker = prev;
  tracker.x += 2.0;
  const Box refined = assist_refine(frame, frame, state, tracker, DetectorConfig{});
  CHECK(refined.x == tracker.x);
  CHECK(refined.y == tracker.y);
  CHECK(refined.w == tracker.w);
  CHECK(refined.h == tracker.h);
}

TEST_CASE("a tracker box wider than the region crop passes through") {
  auto rng = seeded(66);
  const Frame f1 = random_frame(80, 80, rng);
  const Frame f2 = random_frame(80, 80, rng);
  // Region 12.4 wide rounds to a 12 px crop; a 12.2 px tracker box fits the
  // real region but not the crop, so there is no room to optimize in.
  const Box prev{30.0, 30.0, 4.96, 4.96};
  const AssistState state = make_state(f1, prev, DetectorConfig{});
  const Box tracker{30.0, 30.0, 12.2, 12.2};
  REQUIRE(inside(tracker, state.searchRegion));
  const Box refined = assist_refine(f1, f2, state, tracker, DetectorConfig{});
  CHECK(refined.x == tracker.x);
  CHECK(refined.w == tracker.w);
}

TEST_CASE("refinement rejects boxes outside the search region") {
  auto rng = seeded(67);
  const Frame f1 = random_frame(80, 80, rng);
  const Frame f2 = random_frame(80, 80, rng);
  const Box prev{30.0, 30.0, 12.0, 12.0};
  const AssistState state = make_state(f1, prev, DetectorConfig{});
  CHECK_THROWS_WITH_AS(
      assist_refine(f1, f2, state, Box{60.0, 30.0, 12.0, 12.0}, DetectorConfig{}),
      doctest::Contains("outside the search region"), Error);

  const Frame narrow = random_frame(64, 80, rng);
  CHECK_THROWS_WITH_AS(assist_refine(f1, narrow, state, prev, DetectorConfig{}),
                       doctest::Contains("share dimensions"), Error);
}

TEST_CASE("the baseline tracker holds still on a static scene") {
  auto rng = seeded(68);
  const Frame frame = random_frame(72, 72, rng);
  const std::vector<Frame> frames(5, frame);
  const Box init{20.0, 24.0, 10.0, 8.0};

  for (const bool assist : {false, true}) {
    CAPTURE(assist);
    const std::vector<Box> boxes = baseline_track(frames, init, assist, DetectorConfig{});
    REQUIRE(boxes.size() == 5);
    for (const Box& b : boxes) {
      CHECK(b.x == doctest::Approx(init.x));
      CHECK(b.y == doctest::Approx(init.y));
      CHECK(b.w == doctest::Approx(init.w));
      CHECK(b.h == doctest::Approx(init.h));
    }
  }
}

TEST_CASE("the baseline tracker follows a translating patch") {
  auto rng = seeded(69);
  Frame block(14, 14);
  for (int y = 0; y < 14; ++y)
    for (int x = 0; x < 14; ++x)
      for (int c = 0; c < 3; ++c)
        block.at(x, y, c) = static_cast<std::uint8_t>(120 + rng() % 136);

  std::vector<Frame> frames;
  for (int t = 0; t < 6; ++t) {
    Frame f = solid(96, 96, 10, 10, 120);
    paste(f, 20 + 4 * t, 40, block);
    frames.push_back(std::move(f));
  }
  const Box init{27.0, 47.0, 14.0, 14.0};

  for (const bool assist : {false, true}) {
    CAPTURE(assist);
    const std::vector<Box> boxes = baseline_track(frames, init, assist, DetectorConfig{});
    REQUIRE(boxes.size() == 6);
    CHECK(boxes[0].x == doctest::Approx(init.x));
    // Final patch corner is (40, 40), so its center sits at (47, 47).
    CHECK(std::abs(boxes.back().x - 47.0) <= 3.0);
    CHECK(std::abs(boxes.back().y - 47.0) <= 3.0);
    for (const Box& b : boxes) {
      CHECK(b.w == doctest::Approx(14.0));
      CHECK(b.h == doctest::Approx(14.0));
    }
  }
}

TEST_CASE("the baseline tracker validates its inputs") {
  auto rng = seeded(70);
  CHECK_THROWS_WITH_AS(
      baseline_track(std::vector<Frame>{}, Box{10.0, 10.0, 4.0, 4.0}, false, DetectorConfig{}),
      doctest::Contains("no frames"), Error);

  const std::vector<Frame> one{random_frame(64, 64, rng)};
  CHECK_THROWS_WITH_AS(baseline_track(one, Box{10.0, 10.0, 0.0, 4.0}, false, DetectorConfig{}),
                       doctest::Contains("positive size"), Error);

  std::vector<Frame> mixed;
  mixed.push_back(random_frame(64, 64, rng));
  mixed.push_back(random_frame(48, 64, rng));
  CHECK_THROWS_WITH_AS(baseline_track(mixed, Box{10.0, 10.0, 4.0, 4.0}, false, DetectorConfig{}),
                       doctest::Contains("share dimensions"), Error);
}

}  // TEST_SUITE
