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

#include "vcpost/loss.hpp"

#include <cmath>

#include "vcpost/errors.hpp"

namespace vcpost {

void LossWeights::validate() const {
  if (l1 < 0.0 || ssim < 0.0 || l2 < 0.0 || msssim < 0.0) {
    throw ValidationError("loss weights must be nonnegative");
  }
  // Fixed summation order; the default 0.3 + 0.2 + 0.1 + 0.4 hits 1.0 exactly.
  const double sum = ((l1 + ssim) + l2) + msssim;
  if (sum != 1.0) {
    throw ValidationError("loss weights must sum to exactly 1, got " + std::to_string(sum));
  }
}

ValueGrad l1_loss(const Tensor& pred, const Tensor& target) {
  pred.require_same_shape(target, "l1_loss");
  const double inv_n = 1.0 / static_cast<double>(pred.size());
  ValueGrad out;
  out.grad = Tensor(pred.shape());
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    acc += std::abs(d);
    out.grad[i] = d > 0.0 ? inv_n : (d < 0.0 ? -inv_n : 0.0);
  }
  out.value = acc * inv_n;
  return out;
}

ValueGrad l2_loss(const Tensor& pred, const Tensor& target) {
  pred.require_same_shape(target, "l2_loss");
  const double inv_n = 1.0 / static_cast<double>(pred.size());
  ValueGrad out;
  out.grad = Tensor(pred.shape());
  double acc = 0.0;
  for (std::size_t i = 0; i < pred.size(); ++i) {
    const double d = pred[i] - target[i];
    acc += d * d;
    out.grad[i] = 2.0 * d * inv_n;
  }
  out.value = acc * inv_n;
  return out;
}

ValueGrad ssim_loss(const Tensor& pred, const Tensor& target, const SsimParams& params) {
  MetricGrad m = ssim_with_grad(pred, target, params);
  ValueGrad out;
  out.value = 1.0 - m.value;
  out.grad = std::move(m.grad);
  out.grad *= -1.0;
  return out;
}

ValueGrad msssim_loss(const Tensor& pred, const Tensor& target, const MsSsimParams& params) {
  MetricGrad m = ms_ssim_with_grad(pred, target, params);
  ValueGrad out;
  out.value = 1.0 - m.value;
  out.grad = std::move(m.grad);
  out.grad *= -1.0;
  return out;
}

LossValue combined_loss(const Tensor& pred, const Tensor& target, const LossWeights& weights) {
  pred.require_same_shape(target, "combined_loss");
  if (pred.rank() != 3) {
    throw ValidationError("combined_loss: patches must be CxHxW, got " +
                          shape_string(pred.shape()));
  }
  weights.validate();

  const ValueGrad c_l1 = l1_loss(pred, target);
  const ValueGrad c_ssim = ssim_loss(pred, target);
  const ValueGrad c_l2 = l2_loss(pred, target);
  const MsSsimParams ms = MsSsimParams::for_size(pred.dim(2), pred.dim(1));
  const ValueGrad c_msssim = msssim_loss(pred, target, ms);

  LossValue out;
  out.components.l1 = c_l1.value;
  out.components.ssim = c_ssim.value;
  out.components.l2 = c_l2.value;
  out.components.msssim = c_msssim.value;
  out.total = weights.l1 * c_l1.value + weights.ssim * c_ssim.value + weights.l2 * c_l2.value +
              weights.msssim * c_msssim.value;
  out.grad = Tensor(pred.shape());
  for (std::size_t i = 0; i < out.grad.size(); ++i) {
    out.grad[i] = weights.l1 * c_l1.grad[i] + weights.ssim * c_ssim.grad[i] +
                  weights.l2 * c_l2.grad[i] + weights.msssim * c_msssim.grad[i];
  }
  return out;
}

}  // namespace vcpost
