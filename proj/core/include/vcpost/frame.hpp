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

#pragma once

#include <array>
#include <cstdint>
#include <vector>

namespace vcpost {

enum class ColorSpace : std::uint8_t { ycbcr444, rgb };

/// One picture: three full-resolution planes of normalized [0,1] samples.
/// Chroma is always 4:4:4 inside the pipeline; subsampled sources are
/// upsampled at ingestion.
struct Frame {
  int width = 0;
  int height = 0;
  ColorSpace space = ColorSpace::ycbcr444;
  std::array<std::vector<double>, 3> planes;  // row-major height x width each

  Frame() = default;
  Frame(int width, int height, ColorSpace space);

  double sample(int plane, int x, int y) const {
    return planes[static_cast<std::size_t>(plane)][static_cast<std::size_t>(y) * width + x];
  }
  double& sample(int plane, int x, int y) {
    return planes[static_cast<std::size_t>(plane)][static_cast<std::size_t>(y) * width + x];
  }

  std::size_t pixels() const { return static_cast<std::size_t>(width) * height; }
};

/// Ordered frame sequence with homogeneous geometry and color space.
struct Clip {
  std::vector<Frame> frames;
  int fps_num = 25;
  int fps_den = 1;

  int width() const { return frames.empty() ? 0 : frames.front().width; }
  int height() const { return frames.empty() ? 0 : frames.front().height; }
  ColorSpace space() const { return frames.empty() ? ColorSpace::ycbcr444 : frames.front().space; }
  int frame_count() const { return static_cast<int>(frames.size()); }

  /// Throws ValidationError unless non-empty with uniform width/height/space.
  void require_valid(const char* what) const;
};

enum class MatrixCoefficients : std::uint8_t { bt709, bt601 };
enum class ColorRange : std::uint8_t { limited, full };

/// Matrix/range selection for YCbCr <-> RGB. The BT.709 limited-range
/// default is a documented choice, not a claim about any particular
/// scoring chain; override per call where needed.
struct ColorConversion {
  MatrixCoefficients matrix = MatrixCoefficients::bt709;
  ColorRange range = ColorRange::limited;
};

/// Converts a YCbCr 4:4:4 frame to RGB, clamped to [0,1]. Rejects frames
/// whose tag is not ycbcr444.
Frame ycbcr_to_rgb(const Frame& frame, const ColorConversion& conversion = {});

/// Inverse of ycbcr_to_rgb; rejects frames whose tag is not rgb.
Frame rgb_to_ycbcr(const Frame& frame, const ColorConversion& conversion = {});

Clip convert_clip(const Clip& clip, ColorSpace target, const ColorConversion& conversion = {});

enum class ChromaUpsampling : std::uint8_t { bilinear, nearest };

/// Builds a 4:4:4 frame from a full-resolution luma plane and half-resolution
/// chroma planes (dimensions ceil(luma/2), co-sited top-left). Default is
/// bilinear interpolation; nearest replication is available for debugging.
Frame chroma_upsample_420_to_444(const std::vector<double>& y_plane, int luma_width,
                                 int luma_height, const std::vector<double>& cb_plane,
                                 const std::vector<double>& cr_plane, int chroma_width,
                                 int chroma_height,
                                 ChromaUpsampling method = ChromaUpsampling::bilinear);

}  // namespace vcpost
