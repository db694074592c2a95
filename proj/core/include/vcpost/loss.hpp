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

#include "vcpost/metrics.hpp"
#include "vcpost/tensor.hpp"

namespace vcpost {

/// Combination weights of the perceptual training loss:
///   total = 0.3*L1 + 0.2*(1 - SSIM) + 0.1*L2 + 0.4*(1 - MS-SSIM).
/// Weights must be nonnegative and sum to exactly 1.
struct LossWeights {
  double l1 = 0.3;
  double ssim = 0.2;
  double l2 = 0.1;
  double msssim = 0.4;

  void validate() const;
};

struct LossComponents {
  double l1 = 0.0;
  double ssim = 0.0;  // 1 - SSIM
  double l2 = 0.0;
  double msssim = 0.0;  // 1 - MS-SSIM
};

struct LossValue {
  double total = 0.0;
  LossComponents components;
  Tensor grad;  // d(total)/d(pred), prediction-shaped
};

struct ValueGrad {
  double value = 0.0;
  Tensor grad;
};

/// Mean absolute error; grad = sign(pred - target)/N with sign(0) = 0.
ValueGrad l1_loss(const Tensor& pred, const Tensor& target);

/// Mean squared error; grad = 2*(pred - target)/N.
ValueGrad l2_loss(const Tensor& pred, const Tensor& target);

/// 1 - SSIM with the analytic gradient.
ValueGrad ssim_loss(const Tensor& pred, const Tensor& target, const SsimParams& params = {});

/// 1 - MS-SSIM with the analytic gradient.
ValueGrad msssim_loss(const Tensor& pred, const Tensor& target, const MsSsimParams& params);

/// The combined perceptual loss over all channels of a patch pair. The
/// MS-SSIM term uses the reduced-scale configuration the geometry admits
/// (4 scales for 96x96 patches).
LossValue combined_loss(const Tensor& pred, const Tensor& target,
                        const LossWeights& weights = {});

}  // namespace vcpost
