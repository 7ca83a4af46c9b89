#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "motionbox/types.hpp"

namespace testsupport {

std::mt19937 seeded(std::uint32_t seed);

/// Frame with independent uniform channels in [lo, hi].
motionbox::Frame random_frame(int width, int height, std::mt19937& rng, int lo = 0, int hi = 255);

/// Raster with uniform values in [lo, hi).
motionbox::Raster random_raster(int width, int height, std::mt19937& rng, double lo = 0.0,
                                double hi = 1.0);

/// Raster whose values are exact multiples of 2^-20, so double summation in
/// any order is exact.
motionbox::Raster quantized_raster(int width, int height, std::mt19937& rng);

/// Mask with each bit set independently with probability p.
motionbox::BinaryMask random_mask(int width, int height, std::mt19937& rng, double p = 0.5);

/// Two frames of a static textured scene with one bright uniform patch that
/// moves between them. Ground truth is the patch's frame-2 box.
struct PatchFixture {
  motionbox::Frame frame1;
  motionbox::Frame frame2;
  motionbox::Box groundTruth;
  int patchSide = 0;
};

PatchFixture moving_patch_fixture(std::uint32_t seed, int side = 128, int patch = 24,
                                  int shift = 10);

/// Unique temporary directory, removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

void write_text(const std::filesystem::path& path, const std::string& content);
std::string read_text(const std::filesystem::path& path);

/// Write a sequence directory: numbered PNG frames (all one random textured
/// image unless makeFrame is customized later) plus groundtruth_rect.txt
/// with one corner-based box per frame.
void write_sequence(const std::filesystem::path& dir, int frameCount, int width, int height,
                    std::uint32_t seed);

}  // namespace testsupport
