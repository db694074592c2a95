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

#include "vcpost/tiling.hpp"

#include <algorithm>
#include <string>

#include "vcpost/errors.hpp"

namespace vcpost {
namespace {

std::vector<int> axis_anchors(int dim, int patch, int stride) {
  std::vector<int> anchors;
  for (int pos = 0; pos + patch < dim; pos += stride) anchors.push_back(pos);
  anchors.push_back(dim - patch);  // terminal anchor clamped inside the frame
  return anchors;
}

void require_enhance_geometry(const Clip& clip, int i, int patch, const char* what) {
  clip.require_valid(what);
  if (clip.space() != ColorSpace::ycbcr444) {
    throw ValidationError(std::string(what) + ": clip must be YCbCr 4:4:4");
  }
  const int n = clip.frame_count();
  if (n < 3) {
    throw ValidationError(std::string(what) + ": clip must have at least 3 frames, got " +
                          std::to_string(n));
  }
  if (i < 0 || i >= n) {
    throw ValidationError(std::string(what) + ": frame index " + std::to_string(i) +
                          " out of range for " + std::to_string(n) + " frames");
  }
  if (clip.width() < patch || clip.height() < patch) {
    throw ValidationError(std::string(what) + ": frames must be at least " +
                          std::to_string(patch) + "x" + std::to_string(patch) + ", got " +
                          std::to_string(clip.width()) + "x" + std::to_string(clip.height()));
  }
}

}  // namespace

TileLayout compute_layout(int width, int height, int patch, int overlap) {
  if (patch <= 0 || overlap < 0 || overlap >= patch) {
    throw ValidationError("compute_layout: need 0 <= overlap < patch");
  }
  if (width < patch || height < patch) {
    throw ValidationError("compute_layout: frame " + std::to_string(width) + "x" +
                          std::to_string(height) + " is smaller than the " +
                          std::to_string(patch) + "-pixel patch in some axis");
  }
  TileLayout layout;
  layout.patch = patch;
  layout.overlap = overlap;
  layout.frame_width = width;
  layout.frame_height = height;
  const int stride = patch - overlap;
  layout.xs = axis_anchors(width, patch, stride);
  layout.ys = axis_anchors(height, patch, stride);
  layout.anchors.reserve(layout.xs.size() * layout.ys.size());
  for (int y : layout.ys) {
    for (int x : layout.xs) {
      layout.anchors.push_back({x, y});
    }
  }
  return layout;
}

TriFrameIndices triframe_indices(int i, int n) {
  if (n < 3) {
    throw ValidationError("triframe_indices: clip must have at least 3 frames, got " +
                          std::to_string(n));
  }
  if (i < 0 || i >= n) {
    throw ValidationError("triframe_indices: frame index out of range");
  }
  if (i == 0) return {0, 1, 2};
  if (i == n - 1) return {n - 3, n - 2, n - 1};
  return {i - 1, i, i + 1};
}

ChannelWindow channel_window(int i, int n) {
  if (n < 3) {
    throw ValidationError("channel_window: clip must have at least 3 frames, got " +
                          std::to_string(n));
  }
  if (i < 0 || i >= n) {
    throw ValidationError("channel_window: frame index out of range");
  }
  if (i == 0) return {0};
  if (i == n - 1) return {6};
  return {3};
}

TriPatch extract_tripatch(const Clip& clip, int i, Anchor anchor, int patch) {
  require_enhance_geometry(clip, i, patch, "extract_tripatch");
  if (anchor.x < 0 || anchor.y < 0 || anchor.x + patch > clip.width() ||
      anchor.y + patch > clip.height()) {
    throw ValidationError("extract_tripatch: anchor (" + std::to_string(anchor.x) + ", " +
                          std::to_string(anchor.y) + ") places the patch outside the frame");
  }
  const TriFrameIndices src = triframe_indices(i, clip.frame_count());
  TriPatch out;
  out.anchor = anchor;
  out.center_frame_index = i;
  out.data = Tensor({9, patch, patch});
  const int frame_order[3] = {src.a, src.b, src.c};
  double* dst = out.data.data();
  for (int slot = 0; slot < 3; ++slot) {
    const Frame& frame = clip.frames[static_cast<std::size_t>(frame_order[slot])];
    for (int plane = 0; plane < 3; ++plane) {
      const std::vector<double>& src_plane = frame.planes[static_cast<std::size_t>(plane)];
      for (int y = 0; y < patch; ++y) {
        const double* src_row =
            src_plane.data() + static_cast<std::size_t>(anchor.y + y) * clip.width() + anchor.x;
        std::copy(src_row, src_row + patch, dst);
        dst += patch;
      }
    }
  }
  return out;
}

std::vector<TriPatch> extract_tripatches(const Clip& clip, int i, const TileLayout& layout) {
  require_enhance_geometry(clip, i, layout.patch, "extract_tripatches");
  if (layout.frame_width != clip.width() || layout.frame_height != clip.height()) {
    throw ValidationError("extract_tripatches: layout geometry " +
                          std::to_string(layout.frame_width) + "x" +
                          std::to_string(layout.frame_height) + " does not match clip " +
                          std::to_string(clip.width()) + "x" + std::to_string(clip.height()));
  }
  std::vector<TriPatch> patches;
  patches.reserve(layout.anchors.size());
  for (const Anchor& anchor : layout.anchors) {
    patches.push_back(extract_tripatch(clip, i, anchor, layout.patch));
  }
  return patches;
}

Frame stitch(const std::vector<std::pair<Anchor, Tensor>>& outputs, const TileLayout& layout) {
  const int patch = layout.patch;
  const int width = layout.frame_width;
  const int height = layout.frame_height;

  std::vector<Anchor> provided;
  provided.reserve(outputs.size());
  for (const auto& [anchor, tensor] : outputs) {
    provided.push_back(anchor);
    if (tensor.shape() != std::vector<int>{3, patch, patch}) {
      throw ValidationError("stitch: patch output at (" + std::to_string(anchor.x) + ", " +
                            std::to_string(anchor.y) + ") must be 3x" + std::to_string(patch) +
                            "x" + std::to_string(patch) + ", got " +
                            shape_string(tensor.shape()));
    }
  }
  std::vector<Anchor> expected = layout.anchors;
  std::sort(provided.begin(), provided.end());
  std::sort(expected.begin(), expected.end());
  if (provided != expected) {
    throw ValidationError("stitch: outputs must cover every layout anchor exactly once (got " +
                          std::to_string(provided.size()) + " outputs for " +
                          std::to_string(expected.size()) + " anchors)");
  }

  Frame result(width, height, ColorSpace::ycbcr444);
  std::vector<double> counts(result.pixels(), 0.0);
  const std::size_t patch_plane = static_cast<std::size_t>(patch) * patch;
  for (const auto& [anchor, tensor] : outputs) {
    for (int plane = 0; plane < 3; ++plane) {
      const double* src = tensor.data() + static_cast<std::size_t>(plane) * patch_plane;
      std::vector<double>& dst = result.planes[static_cast<std::size_t>(plane)];
      for (int y = 0; y < patch; ++y) {
        double* dst_row = dst.data() + static_cast<std::size_t>(anchor.y + y) * width + anchor.x;
        const double* src_row = src + static_cast<std::size_t>(y) * patch;
        for (int x = 0; x < patch; ++x) dst_row[x] += src_row[x];
      }
    }
    for (int y = 0; y < patch; ++y) {
      double* count_row = counts.data() + static_cast<std::size_t>(anchor.y + y) * width + anchor.x;
      for (int x = 0; x < patch; ++x) count_row[x] += 1.0;
    }
  }
  for (std::size_t i = 0; i < counts.size(); ++i) {
    // Full coverage is a layout invariant; a zero count means the layout
    // itself is inconsistent.
    if (counts[i] == 0.0) {
      throw ValidationError("stitch: layout leaves pixel " + std::to_string(i) + " uncovered");
    }
    for (auto& plane : result.planes) plane[i] /= counts[i];
  }
  return result;
}

}  // namespace vcpost
