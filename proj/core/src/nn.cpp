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

#include "vcpost/nn.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "vcpost/errors.hpp"

namespace vcpost {
namespace {

struct ConvDims {
  int cin, h, w, cout, k, pad;
};

ConvDims validate_conv_args(const Tensor& input, const Tensor& kernel, const Tensor* bias) {
  if (input.rank() != 3) {
    throw ValidationError("conv2d: input must be CxHxW, got " + shape_string(input.shape()));
  }
  if (kernel.rank() != 4) {
    throw ValidationError("conv2d: kernel must be CoutxCinxKxK, got " +
                          shape_string(kernel.shape()));
  }
  ConvDims d{};
  d.cin = input.dim(0);
  d.h = input.dim(1);
  d.w = input.dim(2);
  d.cout = kernel.dim(0);
  d.k = kernel.dim(2);
  if (kernel.dim(3) != d.k) {
    throw ValidationError("conv2d: kernel window must be square, got " +
                          shape_string(kernel.shape()));
  }
  if (d.k % 2 == 0) {
    throw ValidationError("conv2d: kernel size must be odd, got " + std::to_string(d.k));
  }
  if (kernel.dim(1) != d.cin) {
    throw ValidationError("conv2d: input has " + std::to_string(d.cin) +
                          " channels but kernel expects " + std::to_string(kernel.dim(1)));
  }
  if (bias != nullptr && (bias->rank() != 1 || bias->dim(0) != d.cout)) {
    throw ValidationError("conv2d: bias must have shape [" + std::to_string(d.cout) +
                          "], got " + shape_string(bias->shape()));
  }
  d.pad = (d.k - 1) / 2;
  return d;
}

// Generic path: one shifted-row pass per kernel tap. Handles any odd K.
void accumulate_taps(const double* in, int h, int w, const double* taps, int k, int pad,
                     double* out) {
  for (int ky = 0; ky < k; ++ky) {
    for (int kx = 0; kx < k; ++kx) {
      const double kv = taps[ky * k + kx];
      const int dy = ky - pad;
      const int dx = kx - pad;
      const int y0 = dy < 0 ? -dy : 0;
      const int y1 = dy > 0 ? h - dy : h;
      const int x0 = dx < 0 ? -dx : 0;
      const int x1 = dx > 0 ? w - dx : w;
      for (int y = y0; y < y1; ++y) {
        double* orow = out + static_cast<std::size_t>(y) * w;
        const double* irow = in + static_cast<std::size_t>(y + dy) * w + dx;
        for (int x = x0; x < x1; ++x) orow[x] += kv * irow[x];
      }
    }
  }
}

// K == 3 fast path: all nine taps fused per output row so each output value
// is touched once per input channel.
void accumulate_3x3(const double* in, int h, int w, const double* taps, double* out,
                    const double* zero_row) {
  const double k00 = taps[0], k01 = taps[1], k02 = taps[2];
  const double k10 = taps[3], k11 = taps[4], k12 = taps[5];
  const double k20 = taps[6], k21 = taps[7], k22 = taps[8];
  for (int y = 0; y < h; ++y) {
    const double* r0 = y > 0 ? in + static_cast<std::size_t>(y - 1) * w : zero_row;
    const double* r1 = in + static_cast<std::size_t>(y) * w;
    const double* r2 = y < h - 1 ? in + static_cast<std::size_t>(y + 1) * w : zero_row;
    double* orow = out + static_cast<std::size_t>(y) * w;
    for (int x = 1; x < w - 1; ++x) {
      double acc = orow[x];
      acc += k00 * r0[x - 1] + k01 * r0[x] + k02 * r0[x + 1];
      acc += k10 * r1[x - 1] + k11 * r1[x] + k12 * r1[x + 1];
      acc += k20 * r2[x - 1] + k21 * r2[x] + k22 * r2[x + 1];
      orow[x] = acc;
    }
    // Left/right borders (x-1 or x+1 falls in the zero padding).
    {
      double acc = orow[0];
      acc += k01 * r0[0] + k11 * r1[0] + k21 * r2[0];
      if (w > 1) acc += k02 * r0[1] + k12 * r1[1] + k22 * r2[1];
      orow[0] = acc;
    }
    if (w > 1) {
      const int x = w - 1;
      double acc = orow[x];
      acc += k00 * r0[x - 1] + k10 * r1[x - 1] + k20 * r2[x - 1];
      acc += k01 * r0[x] + k11 * r1[x] + k21 * r2[x];
      orow[x] = acc;
    }
  }
}

void accumulate_plane(const double* in, int h, int w, const double* taps, int k, int pad,
                      double* out, const double* zero_row) {
  if (k == 3 && w >= 2) {
    accumulate_3x3(in, h, w, taps, out, zero_row);
  } else {
    accumulate_taps(in, h, w, taps, k, pad, out);
  }
}

}  // namespace

Tensor conv2d_forward(const Tensor& input, const Tensor& kernel, const Tensor& bias) {
  const ConvDims d = validate_conv_args(input, kernel, &bias);
  Tensor out({d.cout, d.h, d.w});
  const std::size_t plane = static_cast<std::size_t>(d.h) * d.w;
  const std::size_t ksize = static_cast<std::size_t>(d.k) * d.k;
  const std::vector<double> zero_row(static_cast<std::size_t>(d.w), 0.0);

  for (int co = 0; co < d.cout; ++co) {
    double* out_plane = out.data() + static_cast<std::size_t>(co) * plane;
    const double b = bias[static_cast<std::size_t>(co)];
    for (std::size_t i = 0; i < plane; ++i) out_plane[i] = b;
    for (int ci = 0; ci < d.cin; ++ci) {
      const double* in_plane = input.data() + static_cast<std::size_t>(ci) * plane;
      const double* taps =
          kernel.data() + (static_cast<std::size_t>(co) * d.cin + ci) * ksize;
      accumulate_plane(in_plane, d.h, d.w, taps, d.k, d.pad, out_plane, zero_row.data());
    }
  }
  return out;
}

ConvGradients conv2d_backward(const Tensor& grad_out, const Tensor& input, const Tensor& kernel) {
  const ConvDims d = validate_conv_args(input, kernel, nullptr);
  if (grad_out.rank() != 3 || grad_out.dim(0) != d.cout || grad_out.dim(1) != d.h ||
      grad_out.dim(2) != d.w) {
    throw ValidationError("conv2d_backward: grad_out shape " + shape_string(grad_out.shape()) +
                          " inconsistent with forward output");
  }
  const std::size_t plane = static_cast<std::size_t>(d.h) * d.w;
  const std::size_t ksize = static_cast<std::size_t>(d.k) * d.k;
  const std::vector<double> zero_row(static_cast<std::size_t>(d.w), 0.0);

  ConvGradients g{Tensor(input.shape()), Tensor(kernel.shape()), Tensor({d.cout})};

  // grad_bias: plane sums of grad_out.
  for (int co = 0; co < d.cout; ++co) {
    const double* go = grad_out.data() + static_cast<std::size_t>(co) * plane;
    double acc = 0.0;
    for (std::size_t i = 0; i < plane; ++i) acc += go[i];
    g.bias[static_cast<std::size_t>(co)] = acc;
  }

  // grad_input: correlation of grad_out with the 180-degree rotated kernel,
  // same zero padding, summed over output channels.
  std::vector<double> rotated(ksize);
  for (int co = 0; co < d.cout; ++co) {
    const double* go = grad_out.data() + static_cast<std::size_t>(co) * plane;
    for (int ci = 0; ci < d.cin; ++ci) {
      const double* taps = kernel.data() + (static_cast<std::size_t>(co) * d.cin + ci) * ksize;
      for (std::size_t i = 0; i < ksize; ++i) rotated[i] = taps[ksize - 1 - i];
      double* gi = g.input.data() + static_cast<std::size_t>(ci) * plane;
      accumulate_plane(go, d.h, d.w, rotated.data(), d.k, d.pad, gi, zero_row.data());
    }
  }

  // grad_kernel: per-tap shifted dot products of grad_out with the input.
  for (int co = 0; co < d.cout; ++co) {
    const double* go = grad_out.data() + static_cast<std::size_t>(co) * plane;
    for (int ci = 0; ci < d.cin; ++ci) {
      const double* in_plane = input.data() + static_cast<std::size_t>(ci) * plane;
      double* gk = g.kernel.data() + (static_cast<std::size_t>(co) * d.cin + ci) * ksize;
      for (int ky = 0; ky < d.k; ++ky) {
        for (int kx = 0; kx < d.k; ++kx) {
          const int dy = ky - d.pad;
          const int dx = kx - d.pad;
          const int y0 = dy < 0 ? -dy : 0;
          const int y1 = dy > 0 ? d.h - dy : d.h;
          const int x0 = dx < 0 ? -dx : 0;
          const int x1 = dx > 0 ? d.w - dx : d.w;
          double acc = 0.0;
          for (int y = y0; y < y1; ++y) {
            const double* grow = go + static_cast<std::size_t>(y) * d.w;
            const double* irow = in_plane + static_cast<std::size_t>(y + dy) * d.w + dx;
            for (int x = x0; x < x1; ++x) acc += grow[x] * irow[x];
          }
          gk[ky * d.k + kx] = acc;
        }
      }
    }
  }
  return g;
}

Tensor leaky_relu(const Tensor& x, double slope) {
  if (slope < 0.0 || slope >= 1.0) {
    throw ValidationError("leaky_relu: slope must lie in [0, 1), got " + std::to_string(slope));
  }
  Tensor y = Tensor::zeros_like(x);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double v = x[i];
    y[i] = v >= 0.0 ? v : slope * v;
  }
  return y;
}

Tensor leaky_relu_backward(const Tensor& grad_out, const Tensor& saved_input, double slope) {
  grad_out.require_same_shape(saved_input, "leaky_relu_backward");
  Tensor gx = Tensor::zeros_like(grad_out);
  for (std::size_t i = 0; i < grad_out.size(); ++i) {
    gx[i] = saved_input[i] >= 0.0 ? grad_out[i] : slope * grad_out[i];
  }
  return gx;
}

AdamState AdamState::for_param(const Tensor& param, double beta1, double beta2) {
  AdamState s;
  s.m = Tensor::zeros_like(param);
  s.v = Tensor::zeros_like(param);
  s.t = 0;
  s.beta1 = beta1;
  s.beta2 = beta2;
  return s;
}

void adam_step(Tensor& param, const Tensor& grad, AdamState& state, double lr) {
  param.require_same_shape(grad, "adam_step");
  param.require_same_shape(state.m, "adam_step (first moment)");
  param.require_same_shape(state.v, "adam_step (second moment)");
  if (lr <= 0.0) throw ValidationError("adam_step: lr must be positive");
  if (!grad.all_finite()) {
    throw NumericalError("adam_step: non-finite gradient, step rejected");
  }
  state.t += 1;
  const double b1 = state.beta1;
  const double b2 = state.beta2;
  const double bias1 = 1.0 - std::pow(b1, static_cast<double>(state.t));
  const double bias2 = 1.0 - std::pow(b2, static_cast<double>(state.t));
  for (std::size_t i = 0; i < param.size(); ++i) {
    const double gi = grad[i];
    state.m[i] = b1 * state.m[i] + (1.0 - b1) * gi;
    state.v[i] = b2 * state.v[i] + (1.0 - b2) * gi * gi;
    const double m_hat = state.m[i] / bias1;
    const double v_hat = state.v[i] / bias2;
    param[i] -= lr * m_hat / (std::sqrt(v_hat) + state.eps);
  }
}

double lr_at_epoch(int epoch, double initial_lr) {
  if (epoch < 0) throw ValidationError("lr_at_epoch: epoch must be >= 0");
  return initial_lr * std::pow(0.1, static_cast<double>(epoch / 100));
}

}  // namespace vcpost
