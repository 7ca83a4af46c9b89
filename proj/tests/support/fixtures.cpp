#include "support/fixtures.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>

#include "motionbox/imageio.hpp"

namespace fs = std::filesystem;
using motionbox::BinaryMask;
using motionbox::Box;
using motionbox::Error;
using motionbox::Frame;
using motionbox::Raster;

namespace testsupport {

std::mt19937 seeded(std::uint32_t seed) { return std::mt19937(seed); }

Frame random_frame(int width, int height, std::mt19937& rng, int lo, int hi) {
  Frame frame(width, height);
  std::uniform_int_distribution<int> dist(lo, hi);
  for (auto& v : frame.data) {
    v = static_cast<std::uint8_t>(dist(rng));
  }
  return frame;
}

Raster random_raster(int width, int height, std::mt19937& rng, double lo, double hi) {
  Raster raster(width, height);
  std::uniform_real_distribution<double> dist(lo, hi);
  for (double& v : raster.values) {
    v = dist(rng);
  }
  return raster;
}

Raster quantized_raster(int width, int height, std::mt19937& rng) {
  Raster raster(width, height);
  std::uniform_int_distribution<int> dist(0, 1 << 20);
  for (double& v : raster.values) {
    v = static_cast<double>(dist(rng)) / static_cast<double>(1 << 20);
  }
  return raster;
}

BinaryMask random_mask(int width, int height, std::mt19937& rng, double p) {
  BinaryMask mask(width, height);
  std::uniform_real_distribution<double> dist(0.0, 1.0);
  for (auto& v : mask.values) {
    v = dist(rng) < p ? 1 : 0;
  }
  return mask;
}

PatchFixture moving_patch_fixture(std::uint32_t seed, int side, int patch, int shift) {
  std::mt19937 rng(seed);
  PatchFixture fx;
  fx.patchSide = patch;

  // Dark texture so any bright patch color owns its histogram bins.
  const Frame background = random_frame(side, side, rng, 0, 60);

  const std::uint8_t colors[][3] = {
      {255, 255, 255}, {255, 220, 40}, {60, 230, 255}, {255, 120, 220}, {160, 255, 120},
  };
  const auto& color = colors[seed % std::size(colors)];

  const int margin = 2;
  std::uniform_int_distribution<int> pos(margin + shift, side - patch - shift - margin - 1);
  const int x1 = pos(rng);
  const int y1 = pos(rng);
  const int dirs[][2] = {{1, 0}, {0, 1}, {1, 1}, {-1, 1}};
  const auto& dir = dirs[rng() % 4];
  const int x2 = x1 + dir[0] * shift;
  const int y2 = y1 + dir[1] * shift;

  const auto stamp = [&](Frame frame, int px, int py) {
    for (int y = py; y < py + patch; ++y) {
      for (int x = px; x < px + patch; ++x) {
        frame.set_pixel(x, y, color[0], color[1], color[2]);
      }
    }
    return frame;
  };
  fx.frame1 = stamp(background, x1, y1);
  fx.frame2 = stamp(background, x2, y2);
  fx.groundTruth = Box{x2 + patch / 2.0, y2 + patch / 2.0, static_cast<double>(patch),
                       static_cast<double>(patch)};
  return fx;
}

TempDir::TempDir() {
  const fs::path base = fs::temp_directory_path();
  std::mt19937 rng(std::random_device{}());
  for (int attempt = 0; attempt < 64; ++attempt) {
    std::ostringstream name;
    name << "motionbox-test-" << std::hex << rng();
    fs::path candidate = base / name.str();
    std::error_code ec;
    if (fs::create_directory(candidate, ec) && !ec) {
      path_ = candidate;
      return;
    }
  }
  throw Error("TempDir: cannot create a unique temporary directory");
}

TempDir::~TempDir() {
  if (!path_.empty()) {
    std::error_code ec;
    fs::remove_all(path_, ec);
  }
}

void write_text(const fs::path& path, const std::string& content) {
  std::ofstream out(path);
  if (!out) {
    throw Error("cannot write " + path.string());
  }
  out << content;
}

std::string read_text(const fs::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error("cannot read " + path.string());
  }
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_sequence(const fs::path& dir, int frameCount, int width, int height,
                    std::uint32_t seed) {
  fs::create_directories(dir);
  std::mt19937 rng(seed);
  const Frame image = random_frame(width, height, rng, 0, 255);
  std::ostringstream gt;
  for (int i = 1; i <= frameCount; ++i) {
    std::ostringstream name;
    name << "frame_" << std::setw(4) << std::setfill('0') << i << ".png";
    motionbox::imageio::save_png((dir / name.str()).string(), image);
    // A fixed-size box wandering with the frame index, kept inside the frame.
    const int bx = 2 + (i * 3) % (width / 2);
    const int by = 2 + (i * 5) % (height / 2);
    gt << bx << "," << by << "," << width / 4 << "," << height / 4 << "\n";
  }
  write_text(dir / "groundtruth_rect.txt", gt.str());
}

}  // namespace testsupport
