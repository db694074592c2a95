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

#include "vcpost/frame.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "vcpost/errors.hpp"

namespace vcpost {
namespace {

double clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

struct MatrixParams {
  double kr, kg, kb;       // luma weights
  double y_scale, y_off;   // encoding of E'Y into the stored Y sample
  double c_scale, c_off;   // encoding of the color-difference signals
};

MatrixParams params_for(const ColorConversion& c) {
  MatrixParams p{};
  if (c.matrix == MatrixCoefficients::bt709) {
    p.kr = 0.2126;
    p.kb = 0.0722;
  } else {
    p.kr = 0.299;
    p.kb = 0.114;
  }
  p.kg = 1.0 - p.kr - p.kb;
  if (c.range == ColorRange::limited) {
    p.y_scale = 219.0 / 255.0;
    p.y_off = 16.0 / 255.0;
    p.c_scale = 224.0 / 255.0;
  } else {
    p.y_scale = 1.0;
    p.y_off = 0.0;
    p.c_scale = 1.0;
  }
  p.c_off = 128.0 / 255.0;
  return p;
}

}  // namespace

Frame::Frame(int width_, int height_, ColorSpace space_)
    : width(width_), height(height_), space(space_) {
  if (width <= 0 || height <= 0) {
    throw ValidationError("frame dimensions must be positive, got " + std::to_string(width) +
                          "x" + std::to_string(height));
  }
  for (auto& plane : planes) {
    plane.assign(pixels(), 0.0);
  }
}

void Clip::require_valid(const char* what) const {
  if (frames.empty()) throw ValidationError(std::string(what) + ": clip has no frames");
  const Frame& first = frames.front();
  for (const Frame& f : frames) {
    if (f.width != first.width || f.height != first.height || f.space != first.space) {
      throw ValidationError(std::string(what) + ": clip geometry is not homogeneous");
    }
    for (const auto& plane : f.planes) {
      if (plane.size() != f.pixels()) {
        throw ValidationError(std::string(what) + ": plane size does not match frame geometry");
      }
    }
  }
}

Frame ycbcr_to_rgb(const Frame& frame, const ColorConversion& conversion) {
  if (frame.space != ColorSpace::ycbcr444) {
    throw ValidationError("ycbcr_to_rgb: source frame is not tagged YCbCr 4:4:4");
  }
  const MatrixParams p = params_for(conversion);
  Frame out(frame.width, frame.height, ColorSpace::rgb);
  for (std::size_t i = 0; i < frame.pixels(); ++i) {
    const double ey = (frame.planes[0][i] - p.y_off) / p.y_scale;
    const double pb = (frame.planes[1][i] - p.c_off) / p.c_scale;
    const double pr = (frame.planes[2][i] - p.c_off) / p.c_scale;
    const double r = ey + 2.0 * (1.0 - p.kr) * pr;
    const double b = ey + 2.0 * (1.0 - p.kb) * pb;
    const double g = (ey - p.kr * r - p.kb * b) / p.kg;
    out.planes[0][i] = clamp01(r);
    out.planes[1][i] = clamp01(g);
    out.planes[2][i] = clamp01(b);
  }
  return out;
}

Frame rgb_to_ycbcr(const Frame& frame, const ColorConversion& conversion) {
  if (frame.space != ColorSpace::rgb) {
    throw ValidationError("rgb_to_ycbcr: source frame is not tagged RGB");
  }
  const MatrixParams p = params_for(conversion);
  Frame out(frame.width, frame.height, ColorSpace::ycbcr444);
  for (std::size_t i = 0; i < frame.pixels(); ++i) {
    const double r = frame.planes[0][i];
    const double g = frame.planes[1][i];
    const double b = frame.planes[2][i];
    const double ey = p.kr * r + p.kg * g + p.kb * b;
    const double pb = (b - ey) / (2.0 * (1.0 - p.kb));
    const double pr = (r - ey) / (2.0 * (1.0 - p.kr));
    out.planes[0][i] = clamp01(p.y_off + p.y_scale * ey);
    out.planes[1][i] = clamp01(p.c_off + p.c_scale * pb);
    out.planes[2][i] = clamp01(p.c_off + p.c_scale * pr);
  }
  return out;
}

Clip convert_clip(const Clip& clip, ColorSpace target, const ColorConversion& conversion) {
  clip.require_valid("convert_clip");
  if (clip.space() == target) return clip;
  Clip out;
  out.fps_num = clip.fps_num;
  out.fps_den = clip.fps_den;
  out.frames.reserve(clip.frames.size());
  for (const Frame& f : clip.frames) {
    out.frames.push_back(target == ColorSpace::rgb ? ycbcr_to_rgb(f, conversion)
                                                   : rgb_to_ycbcr(f, conversion));
  }
  return out;
}

Frame chroma_upsample_420_to_444(const std::vector<double>& y_plane, int luma_width,
                                 int luma_height, const std::vector<double>& cb_plane,
                                 const std::vector<double>& cr_plane, int chroma_width,
                                 int chroma_height, ChromaUpsampling method) {
  if (luma_width <= 0 || luma_height <= 0) {
    throw ValidationError("chroma_upsample: luma dimensions must be positive");
  }
  const int expected_cw = (luma_width + 1) / 2;
  const int expected_ch = (luma_height + 1) / 2;
  if (chroma_width != expected_cw || chroma_height != expected_ch) {
    throw ValidationError("chroma_upsample: chroma plane must be ceil(luma/2) = " +
                          std::to_string(expected_cw) + "x" + std::to_string(expected_ch) +
                          ", got " + std::to_string(chroma_width) + "x" +
                          std::to_string(chroma_height));
  }
  const std::size_t luma_px = static_cast<std::size_t>(luma_width) * luma_height;
  const std::size_t chroma_px = static_cast<std::size_t>(chroma_width) * chroma_height;
  if (y_plane.size() != luma_px || cb_plane.size() != chroma_px || cr_plane.size() != chroma_px) {
    throw ValidationError("chroma_upsample: plane sizes do not match stated dimensions");
  }

  Frame out(luma_width, luma_height, ColorSpace::ycbcr444);
  out.planes[0] = y_plane;

  // Chroma sample (i, j) is co-sited with luma (2i, 2j); odd luma positions
  // sit halfway between neighbors, clamped at the borders.
  const auto upsample = [&](const std::vector<double>& src, std::vector<double>& dst) {
    for (int y = 0; y < luma_height; ++y) {
      int j0, j1;
      double fy;
      if (method == ChromaUpsampling::nearest) {
        j0 = j1 = std::min(y / 2, chroma_height - 1);
        fy = 0.0;
      } else {
        j0 = std::min(y / 2, chroma_height - 1);
        j1 = std::min(j0 + 1, chroma_height - 1);
        fy = (y % 2 == 0) ? 0.0 : 0.5;
      }
      const double* row0 = src.data() + static_cast<std::size_t>(j0) * chroma_width;
      const double* row1 = src.data() + static_cast<std::size_t>(j1) * chroma_width;
      double* out_row = dst.data() + static_cast<std::size_t>(y) * luma_width;
      for (int x = 0; x < luma_width; ++x) {
        int i0, i1;
        double fx;
        if (method == ChromaUpsampling::nearest) {
          i0 = i1 = std::min(x / 2, chroma_width - 1);
          fx = 0.0;
        } else {
          i0 = std::min(x / 2, chroma_width - 1);
          i1 = std::min(i0 + 1, chroma_width - 1);
          fx = (x % 2 == 0) ? 0.0 : 0.5;
        }
        const double top = (1.0 - fx) * row0[i0] + fx * row0[i1];
        const double bottom = (1.0 - fx) * row1[i0] + fx * row1[i1];
        out_row[x] = (1.0 - fy) * top + fy * bottom;
      }
    }
  };
  upsample(cb_plane, out.planes[1]);
  upsample(cr_plane, out.planes[2]);
  return out;
}

}  // namespace vcpost
