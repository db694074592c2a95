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

#include <cstdint>

#include "vcpost/tensor.hpp"

namespace vcpost {

/// 2D convolution in the deep-learning sense (cross-correlation, no kernel
/// flip) with zero padding of (K-1)/2, so the output spatial size equals the
/// input. input is [Cin x H x W], kernel [Cout x Cin x K x K] with K odd,
/// bias [Cout]; returns [Cout x H x W].
Tensor conv2d_forward(const Tensor& input, const Tensor& kernel, const Tensor& bias);

struct ConvGradients {
  Tensor input;
  Tensor kernel;
  Tensor bias;
};

/// Exact gradients of conv2d_forward under the same padding scheme.
/// grad_out must match the forward output shape for (input, kernel).
ConvGradients conv2d_backward(const Tensor& grad_out, const Tensor& input, const Tensor& kernel);

/// y = x for x >= 0 else slope * x. slope must lie in [0, 1).
Tensor leaky_relu(const Tensor& x, double slope);

/// Multiplies grad_out by 1 or slope based on the sign of the saved forward
/// input (x == 0 takes the positive branch).
Tensor leaky_relu_backward(const Tensor& grad_out, const Tensor& saved_input, double slope);

/// Per-parameter Adam accumulator state.
struct AdamState {
  Tensor m;  // first moment, parameter-shaped
  Tensor v;  // second moment, parameter-shaped
  std::int64_t t = 0;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  static AdamState for_param(const Tensor& param, double beta1 = 0.9, double beta2 = 0.999);
};

/// One bias-corrected Adam update, in place:
///   m <- b1*m + (1-b1)*g,  v <- b2*v + (1-b2)*g^2,
///   param <- param - lr * m_hat / (sqrt(v_hat) + eps).
/// Rejects non-finite gradients with NumericalError before touching state.
void adam_step(Tensor& param, const Tensor& grad, AdamState& state, double lr);

/// Step-decay schedule: initial_lr * 0.1^floor(epoch / 100).
double lr_at_epoch(int epoch, double initial_lr);

}  // namespace vcpost
