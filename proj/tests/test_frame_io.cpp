// Copyright 2026 the vcpost authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     https://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <doctest.h>

#include <cstdint>
#include <filesystem>
#include <fstream>

#include "support/png_read.hpp"
#include "vcpost/errors.hpp"
#include "vcpost/frame.hpp"
#include "vcpost/rng.hpp"
#include "vcpost/video_io.hpp"

using namespace vcpost;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "vcpost_frame_io_tests";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

void write_bytes(const fs::path& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
}

Clip random_ycbcr_clip(int width, int height, int frames, std::uint64_t seed) {
  Rng rng(seed);
  Clip clip;
  for (int i = 0; i < frames; ++i) {
    Frame f(width, height, ColorSpace::ycbcr444);
    for (auto& plane : f.planes) {
      for (double& v : plane) v = rng.uniform();
    }
    clip.frames.push_back(std::move(f));
  }
  return clip;
}

}  // namespace

TEST_CASE("read_planar_yuv: 8-bit 4:4:4 size arithmetic") {
  const int w = 16, h = 16;
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(w) * h * 3 * 2);
  for (std::size_t i = 0; i < bytes.size(); ++i) bytes[i] = static_cast<std::uint8_t>(i % 251);
  const fs::path path = temp_dir() / "two_frames.yuv";
  write_bytes(path, bytes);

  Clip clip = read_planar_yuv(path, w, h, Subsampling::s444, 8);
  CHECK(clip.frame_count() == 2);
  CHECK(clip.width() == 16);
  CHECK(clip.height() == 16);
  for (const Frame& f : clip.frames) {
    for (const auto& plane : f.planes) CHECK(plane.size() == 256);
  }
  CHECK(clip.frames[0].planes[0][0] == doctest::Approx(0.0));
  CHECK(clip.frames[0].planes[0][1] == doctest::Approx(1.0 / 255.0));
}

TEST_CASE("read_planar_yuv: 4:2:0 chroma is upsampled to full resolution") {
  const int w = 16, h = 16;
  const std::size_t frame_bytes = w * h + 2 * (w / 2) * (h / 2);
  std::vector<std::uint8_t> bytes(frame_bytes, 128);
  const fs::path path = temp_dir() / "one_frame_420.yuv";
  write_bytes(path, bytes);

  Clip clip = read_planar_yuv(path, w, h, Subsampling::s420, 8);
  CHECK(clip.frame_count() == 1);
  for (const auto& plane : clip.frames[0].planes) CHECK(plane.size() == 256);
  // Constant chroma survives interpolation exactly.
  for (double v : clip.frames[0].planes[1]) CHECK(v == doctest::Approx(128.0 / 255.0));
}

TEST_CASE("read_planar_yuv: short file is rejected with byte counts") {
  const int w = 8, h = 8;
  std::vector<std::uint8_t> bytes(static_cast<std::size_t>(w) * h * 3 - 1, 0);
  const fs::path path = temp_dir() / "short.yuv";
  write_bytes(path, bytes);
  CHECK_THROWS_WITH_AS(read_planar_yuv(path, w, h, Subsampling::s444, 8),
                       doctest::Contains("expected a multiple of 192 bytes, got 191"), IoError);
}

TEST_CASE("read_planar_yuv: bad arguments") {
  const fs::path path = temp_dir() / "unused.yuv";
  write_bytes(path, {0});
  CHECK_THROWS_AS(read_planar_yuv(path, 0, 8, Subsampling::s444, 8), ValidationError);
  CHECK_THROWS_AS(read_planar_yuv(path, 8, 8, Subsampling::s444, 12), ValidationError);
}

TEST_CASE("read_planar_yuv: 10-bit little-endian normalization") {
  const int w = 4, h = 2;
  std::vector<std::uint8_t> bytes;
  for (int i = 0; i < w * h * 3; ++i) {
    const std::uint16_t value = 512;
    bytes.push_back(static_cast<std::uint8_t>(value & 0xFF));
    bytes.push_back(static_cast<std::uint8_t>(value >> 8));
  }
  const fs::path path = temp_dir() / "ten_bit.yuv";
  write_bytes(path, bytes);
  Clip clip = read_planar_yuv(path, w, h, Subsampling::s444, 10);
  CHECK(clip.frames[0].planes[0][0] == doctest::Approx(512.0 / 1023.0));
}

TEST_CASE("y4m: header parse and exact 4:4:4 round trip") {
  Clip clip = random_ycbcr_clip(16, 16, 3, 77);
  // Quantize through a write/read cycle first so samples sit on the 8-bit grid.
  const fs::path path1 = temp_dir() / "roundtrip1.y4m";
  write_y4m(clip, path1);
  Clip first = read_y4m(path1);
  CHECK(first.frame_count() == 3);
  CHECK(first.width() == 16);

  const fs::path path2 = temp_dir() / "roundtrip2.y4m";
  write_y4m(first, path2);
  Clip second = read_y4m(path2);
  for (int f = 0; f < 3; ++f) {
    for (int p = 0; p < 3; ++p) {
      for (std::size_t i = 0; i < first.frames[f].planes[p].size(); ++i) {
        CHECK(first.frames[f].planes[p][i] == second.frames[f].planes[p][i]);
      }
    }
  }
}

TEST_CASE("y4m: write -> read -> write is byte-identical") {
  Clip clip = random_ycbcr_clip(20, 12, 2, 91);
  const fs::path a = temp_dir() / "bytes_a.y4m";
  const fs::path b = temp_dir() / "bytes_b.y4m";
  write_y4m(clip, a);
  write_y4m(read_y4m(a), b);
  std::ifstream fa(a, std::ios::binary), fb(b, std::ios::binary);
  std::vector<char> ba((std::istreambuf_iterator<char>(fa)), std::istreambuf_iterator<char>());
  std::vector<char> bb((std::istreambuf_iterator<char>(fb)), std::istreambuf_iterator<char>());
  CHECK(ba == bb);
  CHECK_FALSE(ba.empty());
}

TEST_CASE("y4m: C420 content goes through the chroma upsampling path") {
  // Hand-built C420 stream: constant planes.
  std::string header = "YUV4MPEG2 W16 H16 F25:1 Ip A1:1 C420\n";
  std::vector<std::uint8_t> bytes(header.begin(), header.end());
  const std::string frame_marker = "FRAME\n";
  bytes.insert(bytes.end(), frame_marker.begin(), frame_marker.end());
  bytes.insert(bytes.end(), 16 * 16, 60);  // Y
  bytes.insert(bytes.end(), 8 * 8, 90);    // Cb
  bytes.insert(bytes.end(), 8 * 8, 200);   // Cr
  const fs::path path = temp_dir() / "c420.y4m";
  write_bytes(path, bytes);

  Clip clip = read_y4m(path);
  CHECK(clip.frame_count() == 1);
  CHECK(clip.frames[0].planes[1].size() == 256);
  for (double v : clip.frames[0].planes[1]) CHECK(v == doctest::Approx(90.0 / 255.0));
  for (double v : clip.frames[0].planes[2]) CHECK(v == doctest::Approx(200.0 / 255.0));
}

TEST_CASE("y4m: malformed input is rejected") {
  const fs::path bad_sig = temp_dir() / "bad_sig.y4m";
  write_bytes(bad_sig, {'X', 'U', 'V', '\n'});
  CHECK_THROWS_AS(read_y4m(bad_sig), IoError);

  std::string header = "YUV4MPEG2 W16 H16 F25:1 C999\n";
  const fs::path bad_cs = temp_dir() / "bad_cs.y4m";
  write_bytes(bad_cs, std::vector<std::uint8_t>(header.begin(), header.end()));
  CHECK_THROWS_WITH_AS(read_y4m(bad_cs), doctest::Contains("unknown colorspace token"), IoError);

  std::string trunc = "YUV4MPEG2 W16 H16 C444\nFRAME\nabc";
  const fs::path truncated = temp_dir() / "trunc.y4m";
  write_bytes(truncated, std::vector<std::uint8_t>(trunc.begin(), trunc.end()));
  CHECK_THROWS_AS(read_y4m(truncated), IoError);
}

TEST_CASE("color conversion: BT.709 limited-range anchor points") {
  Frame black(4, 4, ColorSpace::ycbcr444);
  black.planes[0].assign(16, 16.0 / 255.0);
  black.planes[1].assign(16, 128.0 / 255.0);
  black.planes[2].assign(16, 128.0 / 255.0);
  Frame rgb = ycbcr_to_rgb(black);
  for (int p = 0; p < 3; ++p) {
    CHECK(rgb.planes[p][0] == doctest::Approx(0.0).epsilon(1e-3));
  }

  Frame gray(2, 2, ColorSpace::rgb);
  for (auto& plane : gray.planes) plane.assign(4, 0.5);
  Frame ycc = rgb_to_ycbcr(gray);
  CHECK(ycc.planes[1][0] == doctest::Approx(128.0 / 255.0).epsilon(1e-3));
  CHECK(ycc.planes[2][0] == doctest::Approx(128.0 / 255.0).epsilon(1e-3));
}

TEST_CASE("color conversion: wrong source tag is rejected") {
  Frame ycc(2, 2, ColorSpace::ycbcr444);
  Frame rgb(2, 2, ColorSpace::rgb);
  CHECK_THROWS_AS(ycbcr_to_rgb(rgb), ValidationError);
  CHECK_THROWS_AS(rgb_to_ycbcr(ycc), ValidationError);
}

TEST_CASE("color conversion: round trip within 2/255 per channel, all configs") {
  Rng rng(123);
  for (MatrixCoefficients m : {MatrixCoefficients::bt709, MatrixCoefficients::bt601}) {
    for (ColorRange r : {ColorRange::limited, ColorRange::full}) {
      ColorConversion conv{m, r};
      Frame rgb(8, 8, ColorSpace::rgb);
      for (auto& plane : rgb.planes) {
        for (double& v : plane) v = rng.uniform();
      }
      Frame back = ycbcr_to_rgb(rgb_to_ycbcr(rgb, conv), conv);
      for (int p = 0; p < 3; ++p) {
        for (std::size_t i = 0; i < back.planes[p].size(); ++i) {
          CHECK(std::abs(back.planes[p][i] - rgb.planes[p][i]) <= 2.0 / 255.0);
        }
      }
    }
  }
}

TEST_CASE("chroma upsampling: bilinear weights at a vertical edge") {
  // 2x2 chroma [[0,1],[0,1]] for a 4x4 luma grid.
  std::vector<double> y(16, 0.5);
  std::vector<double> cb{0.0, 1.0, 0.0, 1.0};
  std::vector<double> cr(4, 0.25);
  Frame f = chroma_upsample_420_to_444(y, 4, 4, cb, cr, 2, 2);
  for (int row = 0; row < 4; ++row) {
    CHECK(f.sample(1, 0, row) == doctest::Approx(0.0));
    CHECK(f.sample(1, 1, row) == doctest::Approx(0.5));
    CHECK(f.sample(1, 2, row) == doctest::Approx(1.0));
    CHECK(f.sample(1, 3, row) == doctest::Approx(1.0));
  }
}

TEST_CASE("chroma upsampling: degenerate 1x1 chroma replicates") {
  std::vector<double> y(4, 0.1);
  std::vector<double> c{0.7};
  Frame f = chroma_upsample_420_to_444(y, 2, 2, c, c, 1, 1);
  for (double v : f.planes[1]) CHECK(v == doctest::Approx(0.7));
}

TEST_CASE("chroma upsampling: dimension mismatch rejected") {
  std::vector<double> y(16, 0.0);
  std::vector<double> c(4, 0.0);
  CHECK_THROWS_AS(chroma_upsample_420_to_444(y, 4, 4, c, c, 4, 1), ValidationError);
}

TEST_CASE("png sequence: naming, rounding, and the YCbCr precondition") {
  Clip clip;
  for (int i = 0; i < 3; ++i) {
    Frame f(5, 4, ColorSpace::rgb);
    for (auto& plane : f.planes) plane.assign(f.pixels(), 0.5);
    clip.frames.push_back(std::move(f));
  }
  const fs::path dir = temp_dir() / "png_out";
  fs::remove_all(dir);
  auto files = write_png_sequence(clip, dir);
  REQUIRE(files.size() == 3);
  CHECK(files[0].filename() == "000000.png");
  CHECK(files[2].filename() == "000002.png");

  auto image = testsupport::read_png_rgb8(files[0]);
  CHECK(image.width == 5);
  CHECK(image.height == 4);
  for (std::uint8_t b : image.rgb) CHECK(b == 128);  // round(0.5 * 255) half-up

  Clip ycc;
  ycc.frames.emplace_back(5, 4, ColorSpace::ycbcr444);
  const fs::path dir2 = temp_dir() / "png_rejected";
  fs::remove_all(dir2);
  CHECK_THROWS_AS(write_png_sequence(ycc, dir2), ValidationError);
  CHECK_FALSE(fs::exists(dir2 / "000000.png"));
}

TEST_CASE("clip validation catches heterogeneous geometry") {
  Clip clip;
  clip.frames.emplace_back(8, 8, ColorSpace::ycbcr444);
  clip.frames.emplace_back(8, 9, ColorSpace::ycbcr444);
  CHECK_THROWS_AS(clip.require_valid("test"), ValidationError);

  Clip empty;
  CHECK_THROWS_AS(empty.require_valid("test"), ValidationError);
}
