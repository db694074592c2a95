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

#include <utility>
#include <vector>

#include "vcpost/frame.hpp"
#include "vcpost/tensor.hpp"

namespace vcpost {

inline constexpr int kPatchSize = 96;
inline constexpr int kPatchOverlap = 4;

struct Anchor {
  int x = 0;
  int y = 0;
  friend bool operator==(const Anchor&, const Anchor&) = default;
  friend auto operator<=>(const Anchor&, const Anchor&) = default;
};

/// Overlapping patch grid covering a frame. Anchors advance with stride
/// patch - overlap; the final anchor per axis is clamped to dim - patch so
/// the last patch stays inside the frame (raising the local overlap).
struct TileLayout {
  int patch = kPatchSize;
  int overlap = kPatchOverlap;
  int frame_width = 0;
  int frame_height = 0;
  std::vector<int> xs;           // anchor columns, ascending
  std::vector<int> ys;           // anchor rows, ascending
  std::vector<Anchor> anchors;   // row-major (y outer, x inner)

  int columns() const { return static_cast<int>(xs.size()); }
  int rows() const { return static_cast<int>(ys.size()); }
};

/// Builds the stride-92 grid for one frame. Both dimensions must be at
/// least the patch size; smaller frames are out of scope.
TileLayout compute_layout(int width, int height, int patch = kPatchSize,
                          int overlap = kPatchOverlap);

/// Source frame indices (a, b, c) feeding the patch for frame i of an
/// n-frame clip: interior frames take their two temporal neighbors, the
/// first/last frame take the two subsequent/previous frames instead.
struct TriFrameIndices {
  int a, b, c;
  friend bool operator==(const TriFrameIndices&, const TriFrameIndices&) = default;
};
TriFrameIndices triframe_indices(int i, int n);

/// The 3-channel slice of the 9-channel network output that reconstructs
/// frame i: channels 3..5 for interior frames, 0..2 for the first frame,
/// 6..8 for the last frame.
struct ChannelWindow {
  int start = 3;
  static constexpr int length = 3;
};
ChannelWindow channel_window(int i, int n);

/// Nine-channel patch assembled from three temporally adjacent frames at
/// one spatial anchor. Channel order is (Y, Cb, Cr) per frame, frames in
/// temporal order, so channels 3..5 always hold the frame being restored.
struct TriPatch {
  Tensor data;  // [9 x patch x patch]
  Anchor anchor;
  int center_frame_index = 0;
};

/// Extracts the patch for frame `i` at one anchor. The clip must be
/// YCbCr 4:4:4 with at least 3 frames and the patch must lie inside the
/// frame.
TriPatch extract_tripatch(const Clip& clip, int i, Anchor anchor, int patch = kPatchSize);

/// One TriPatch per layout anchor, row-major.
std::vector<TriPatch> extract_tripatches(const Clip& clip, int i, const TileLayout& layout);

/// Reassembles a frame from per-anchor 3-channel outputs. Every layout
/// anchor must appear exactly once; overlapping pixels receive the
/// arithmetic mean of all covering patches.
Frame stitch(const std::vector<std::pair<Anchor, Tensor>>& outputs, const TileLayout& layout);

}  // namespace vcpost
