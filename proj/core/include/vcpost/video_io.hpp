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

#include <filesystem>
#include <vector>

#include "vcpost/frame.hpp"

namespace vcpost {

enum class Subsampling : std::uint8_t { s420, s444 };

/// Reads a headerless planar YUV file (I420/I444 layout, 8-bit or 10-bit
/// little-endian). Samples are normalized by 2^bit_depth - 1 and 4:2:0
/// chroma is upsampled, so the result is always YCbCr 4:4:4. The file
/// length must be an exact multiple of the per-frame byte size.
Clip read_planar_yuv(const std::filesystem::path& path, int width, int height,
                     Subsampling subsampling, int bit_depth,
                     ChromaUpsampling upsampling = ChromaUpsampling::bilinear);

/// Writes 8-bit I444 planar YUV (round-half-up quantization).
void write_planar_yuv_444(const Clip& clip, const std::filesystem::path& path);

/// Reads an 8-bit Y4M stream with a C420* or C444 colorspace token.
Clip read_y4m(const std::filesystem::path& path,
              ChromaUpsampling upsampling = ChromaUpsampling::bilinear);

/// Writes an 8-bit C444 Y4M stream. Round trip through read_y4m reproduces
/// samples exactly for 8-bit 4:4:4 content.
void write_y4m(const Clip& clip, const std::filesystem::path& path);

/// Writes one 8-bit RGB PNG per frame into `directory`, named 000000.png,
/// 000001.png, ... Samples are scaled by 255 and rounded half-up. The clip
/// must already be RGB; convert explicitly beforehand.
std::vector<std::filesystem::path> write_png_sequence(const Clip& clip,
                                                      const std::filesystem::path& directory);

}  // namespace vcpost
