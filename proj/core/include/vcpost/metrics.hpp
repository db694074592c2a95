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
#include <string>
#include <vector>

#include "vcpost/frame.hpp"
#include "vcpost/tensor.hpp"

namespace vcpost {

/// Standard SSIM configuration: 11x11 Gaussian window (sigma 1.5,
/// normalized to sum 1), K1 = 0.01, K2 = 0.03, dynamic range 1 for
/// normalized samples.
struct SsimParams {
  int window_size = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;

  double c1() const { return (k1 * dynamic_range) * (k1 * dynamic_range); }
  double c2() const { return (k2 * dynamic_range) * (k2 * dynamic_range); }

  /// Normalized 1D Gaussian taps; the 2D window is the outer product.
  std::vector<double> window_1d() const;
};

/// Standard MS-SSIM configuration: published 5-scale weights, 2x2 mean-pool
/// downsampling. When fewer scales fit (e.g. 96x96 patches support only 4,
/// since 96/2^4 = 6 is smaller than the 11-tap window) the leading weights
/// are renormalized to sum 1.
struct MsSsimParams {
  int scales = 5;
  std::array<double, 5> published_weights{0.0448, 0.2856, 0.3001, 0.2363, 0.1333};
  SsimParams ssim;

  /// Largest scale count (at most 5) whose coarsest level still fits the
  /// window for the given geometry.
  static MsSsimParams for_size(int width, int height);

  /// First `scales` weights; renormalized to sum 1 only when scales < 5.
  std::vector<double> effective_weights() const;

  bool is_reduced() const { return scales < 5; }
};

enum class PsnrChannels : std::uint8_t { all, luma };

/// 10*log10(peak^2 / MSE) over all samples; +infinity when MSE is zero.
double psnr(const Tensor& a, const Tensor& b, double peak = 1.0);
double psnr(const Frame& a, const Frame& b, double peak = 1.0,
            PsnrChannels channels = PsnrChannels::all);

/// Mean SSIM over the valid-region map and over channels. Inputs are
/// [C x H x W] with H, W at least the window size.
double ssim(const Tensor& a, const Tensor& b, const SsimParams& params = {});

double ms_ssim(const Tensor& a, const Tensor& b, const MsSsimParams& params);

struct MetricGrad {
  double value = 0.0;
  Tensor grad;  // d(value)/d(pred), pred-shaped
};

/// SSIM and its analytic gradient with respect to the first argument,
/// derived through the Gaussian-windowed moment formulas.
MetricGrad ssim_with_grad(const Tensor& pred, const Tensor& target, const SsimParams& params = {});

/// MS-SSIM and its gradient, backpropagated through the per-scale
/// contrast-structure terms and the mean-pool pyramid.
MetricGrad ms_ssim_with_grad(const Tensor& pred, const Tensor& target,
                             const MsSsimParams& params);

struct GainRow {
  int frame_index = 0;
  double anchor_db = 0.0;
  double enhanced_db = 0.0;
  double delta_db = 0.0;
};

struct GainReport {
  std::vector<GainRow> rows;
  GainRow mean;
  std::string color_label = "ycbcr";
  PsnrChannels channels = PsnrChannels::all;
  double peak = 1.0;
};

/// Per-frame PSNR deltas of `enhanced` over `anchor`, both against
/// `reference`, plus column means. All clips must share geometry and length.
GainReport psnr_gain_report(const Clip& enhanced, const Clip& anchor, const Clip& reference,
                            PsnrChannels channels = PsnrChannels::all, double peak = 1.0);

/// Fixed-format text rendering (one record per frame plus a trailing mean
/// record); infinite values print as 99.99. Bit-reproducible for identical
/// inputs.
std::string render_gain_report(const GainReport& report);

/// [3 x H x W] view of a frame's planes (copies).
Tensor frame_to_tensor(const Frame& frame);
Frame tensor_to_frame(const Tensor& tensor, ColorSpace space);

}  // namespace vcpost
