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

#include "vcpost/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "vcpost/errors.hpp"

namespace vcpost {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Separable valid-region correlation with a symmetric 1D window, plus its
// adjoint (used to scatter per-window gradients back onto the image grid).

struct Plane {
  int h = 0, w = 0;
  std::vector<double> v;
  Plane() = default;
  Plane(int h_, int w_) : h(h_), w(w_), v(static_cast<std::size_t>(h_) * w_, 0.0) {}
  double* row(int y) { return v.data() + static_cast<std::size_t>(y) * w; }
  const double* row(int y) const { return v.data() + static_cast<std::size_t>(y) * w; }
};

// [h x w] -> [h x (w-t+1)]
Plane correlate_rows(const Plane& in, const std::vector<double>& win) {
  const int t = static_cast<int>(win.size());
  Plane out(in.h, in.w - t + 1);
  for (int y = 0; y < in.h; ++y) {
    const double* src = in.row(y);
    double* dst = out.row(y);
    for (int u = 0; u < out.w; ++u) {
      double acc = 0.0;
      for (int k = 0; k < t; ++k) acc += win[static_cast<std::size_t>(k)] * src[u + k];
      dst[u] = acc;
    }
  }
  return out;
}

// [h x w] -> [(h-t+1) x w]
Plane correlate_cols(const Plane& in, const std::vector<double>& win) {
  const int t = static_cast<int>(win.size());
  Plane out(in.h - t + 1, in.w);
  for (int v = 0; v < out.h; ++v) {
    double* dst = out.row(v);
    const double* base = in.row(v);
    for (int x = 0; x < in.w; ++x) dst[x] = win[0] * base[x];
    for (int k = 1; k < t; ++k) {
      const double wk = win[static_cast<std::size_t>(k)];
      const double* src = in.row(v + k);
      for (int x = 0; x < in.w; ++x) dst[x] += wk * src[x];
    }
  }
  return out;
}

Plane valid_window(const Plane& in, const std::vector<double>& win) {
  return correlate_cols(correlate_rows(in, win), win);
}

// Adjoint of correlate_cols: [(h-t+1) x w] -> [h x w]
Plane adjoint_cols(const Plane& map, const std::vector<double>& win, int out_h) {
  const int t = static_cast<int>(win.size());
  Plane out(out_h, map.w);
  for (int p = 0; p < map.h; ++p) {
    const double* src = map.row(p);
    for (int k = 0; k < t; ++k) {
      const double wk = win[static_cast<std::size_t>(k)];
      double* dst = out.row(p + k);
      for (int x = 0; x < map.w; ++x) dst[x] += wk * src[x];
    }
  }
  return out;
}

// Adjoint of correlate_rows: [h x (w-t+1)] -> [h x w]
Plane adjoint_rows(const Plane& map, const std::vector<double>& win, int out_w) {
  const int t = static_cast<int>(win.size());
  Plane out(map.h, out_w);
  for (int y = 0; y < map.h; ++y) {
    const double* src = map.row(y);
    double* dst = out.row(y);
    for (int u = 0; u < map.w; ++u) {
      const double s = src[u];
      for (int k = 0; k < t; ++k) dst[u + k] += win[static_cast<std::size_t>(k)] * s;
    }
  }
  return out;
}

Plane adjoint_window(const Plane& map, const std::vector<double>& win, int out_h, int out_w) {
  return adjoint_rows(adjoint_cols(map, win, out_h), win, out_w);
}

Plane channel_plane(const Tensor& t, int c, int h, int w) {
  Plane p(h, w);
  const double* src = t.data() + static_cast<std::size_t>(c) * h * w;
  std::copy(src, src + p.v.size(), p.v.begin());
  return p;
}

Plane product_plane(const Plane& a, const Plane& b) {
  Plane out(a.h, a.w);
  for (std::size_t i = 0; i < out.v.size(); ++i) out.v[i] = a.v[i] * b.v[i];
  return out;
}

struct TensorDims {
  int c, h, w;
};

TensorDims validate_metric_pair(const Tensor& a, const Tensor& b, int min_size,
                                const char* what) {
  a.require_same_shape(b, what);
  if (a.rank() != 3) {
    throw ValidationError(std::string(what) + ": inputs must be CxHxW, got " +
                          shape_string(a.shape()));
  }
  TensorDims d{a.dim(0), a.dim(1), a.dim(2)};
  if (d.h < min_size || d.w < min_size) {
    throw ValidationError(std::string(what) + ": spatial size " + std::to_string(d.h) + "x" +
                          std::to_string(d.w) + " is smaller than the required " +
                          std::to_string(min_size) + "x" + std::to_string(min_size));
  }
  return d;
}

// Windowed first and second moments of one channel pair.
struct Moments {
  Plane mu_x, mu_y, xx, yy, xy;
};

Moments compute_moments(const Plane& x, const Plane& y, const std::vector<double>& win) {
  Moments m;
  m.mu_x = valid_window(x, win);
  m.mu_y = valid_window(y, win);
  m.xx = valid_window(product_plane(x, x), win);
  m.yy = valid_window(product_plane(y, y), win);
  m.xy = valid_window(product_plane(x, y), win);
  return m;
}

Plane mean_pool(const Plane& in) {
  Plane out(in.h / 2, in.w / 2);
  for (int y = 0; y < out.h; ++y) {
    const double* r0 = in.row(2 * y);
    const double* r1 = in.row(2 * y + 1);
    double* dst = out.row(y);
    for (int x = 0; x < out.w; ++x) {
      dst[x] = 0.25 * (r0[2 * x] + r0[2 * x + 1] + r1[2 * x] + r1[2 * x + 1]);
    }
  }
  return out;
}

// Adjoint of mean_pool; rows/columns dropped by odd sizes receive zero.
Plane mean_pool_adjoint(const Plane& grad, int out_h, int out_w) {
  Plane out(out_h, out_w);
  for (int y = 0; y < grad.h; ++y) {
    const double* src = grad.row(y);
    double* r0 = out.row(2 * y);
    double* r1 = out.row(2 * y + 1);
    for (int x = 0; x < grad.w; ++x) {
      const double g = 0.25 * src[x];
      r0[2 * x] += g;
      r0[2 * x + 1] += g;
      r1[2 * x] += g;
      r1[2 * x + 1] += g;
    }
  }
  return out;
}

}  // namespace

std::vector<double> SsimParams::window_1d() const {
  if (window_size < 1 || window_size % 2 == 0) {
    throw ValidationError("ssim window size must be odd and positive");
  }
  std::vector<double> win(static_cast<std::size_t>(window_size));
  const int half = window_size / 2;
  double sum = 0.0;
  for (int i = 0; i < window_size; ++i) {
    const double d = static_cast<double>(i - half);
    win[static_cast<std::size_t>(i)] = std::exp(-(d * d) / (2.0 * sigma * sigma));
    sum += win[static_cast<std::size_t>(i)];
  }
  for (double& v : win) v /= sum;
  return win;
}

MsSsimParams MsSsimParams::for_size(int width, int height) {
  MsSsimParams p;
  int scales = 0;
  int h = height, w = width;
  while (scales < 5 && h >= p.ssim.window_size && w >= p.ssim.window_size) {
    ++scales;
    h /= 2;
    w /= 2;
  }
  if (scales == 0) {
    throw ValidationError("ms_ssim: geometry " + std::to_string(width) + "x" +
                          std::to_string(height) + " is below the " +
                          std::to_string(p.ssim.window_size) + "-tap window at every scale");
  }
  p.scales = scales;
  return p;
}

std::vector<double> MsSsimParams::effective_weights() const {
  if (scales < 1 || scales > 5) {
    throw ValidationError("ms_ssim: scale count must lie in [1, 5], got " +
                          std::to_string(scales));
  }
  std::vector<double> w(published_weights.begin(), published_weights.begin() + scales);
  if (scales < 5) {
    double sum = 0.0;
    for (double v : w) sum += v;
    for (double& v : w) v /= sum;
  }
  return w;
}

double psnr(const Tensor& a, const Tensor& b, double peak) {
  a.require_same_shape(b, "psnr");
  if (peak <= 0.0) throw ValidationError("psnr: peak must be positive");
  double sum_sq = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    sum_sq += d * d;
  }
  const double mse = sum_sq / static_cast<double>(a.size());
  if (mse == 0.0) return kInf;
  return 10.0 * std::log10(peak * peak / mse);
}

double psnr(const Frame& a, const Frame& b, double peak, PsnrChannels channels) {
  if (a.width != b.width || a.height != b.height) {
    throw ValidationError("psnr: frame geometry mismatch");
  }
  if (peak <= 0.0) throw ValidationError("psnr: peak must be positive");
  const int planes = channels == PsnrChannels::luma ? 1 : 3;
  double sum_sq = 0.0;
  std::size_t count = 0;
  for (int p = 0; p < planes; ++p) {
    const auto& pa = a.planes[static_cast<std::size_t>(p)];
    const auto& pb = b.planes[static_cast<std::size_t>(p)];
    for (std::size_t i = 0; i < pa.size(); ++i) {
      const double d = pa[i] - pb[i];
      sum_sq += d * d;
    }
    count += pa.size();
  }
  const double mse = sum_sq / static_cast<double>(count);
  if (mse == 0.0) return kInf;
  return 10.0 * std::log10(peak * peak / mse);
}

double ssim(const Tensor& a, const Tensor& b, const SsimParams& params) {
  const TensorDims d = validate_metric_pair(a, b, params.window_size, "ssim");
  const std::vector<double> win = params.window_1d();
  const double c1 = params.c1();
  const double c2 = params.c2();

  double total = 0.0;
  std::size_t count = 0;
  for (int c = 0; c < d.c; ++c) {
    const Plane x = channel_plane(a, c, d.h, d.w);
    const Plane y = channel_plane(b, c, d.h, d.w);
    const Moments m = compute_moments(x, y, win);
    for (std::size_t i = 0; i < m.mu_x.v.size(); ++i) {
      const double mux = m.mu_x.v[i];
      const double muy = m.mu_y.v[i];
      const double sx = m.xx.v[i] - mux * mux;
      const double sy = m.yy.v[i] - muy * muy;
      const double sxy = m.xy.v[i] - mux * muy;
      const double a1 = 2.0 * mux * muy + c1;
      const double a2 = 2.0 * sxy + c2;
      const double b1 = mux * mux + muy * muy + c1;
      const double b2 = sx + sy + c2;
      total += (a1 * a2) / (b1 * b2);
    }
    count += m.mu_x.v.size();
  }
  return total / static_cast<double>(count);
}

MetricGrad ssim_with_grad(const Tensor& pred, const Tensor& target, const SsimParams& params) {
  const TensorDims d = validate_metric_pair(pred, target, params.window_size, "ssim");
  const std::vector<double> win = params.window_1d();
  const double c1 = params.c1();
  const double c2 = params.c2();

  MetricGrad result;
  result.grad = Tensor(pred.shape());
  double total = 0.0;
  std::size_t count = 0;

  for (int c = 0; c < d.c; ++c) {
    const Plane x = channel_plane(pred, c, d.h, d.w);
    const Plane y = channel_plane(target, c, d.h, d.w);
    const Moments m = compute_moments(x, y, win);
    const int mh = m.mu_x.h, mw = m.mu_x.w;

    // Per-window coefficients of dS/dx_i = w * (alpha + beta*y_i + gamma*x_i).
    Plane alpha(mh, mw), beta(mh, mw), gamma(mh, mw);
    for (std::size_t i = 0; i < m.mu_x.v.size(); ++i) {
      const double mux = m.mu_x.v[i];
      const double muy = m.mu_y.v[i];
      const double sx = m.xx.v[i] - mux * mux;
      const double sy = m.yy.v[i] - muy * muy;
      const double sxy = m.xy.v[i] - mux * muy;
      const double a1 = 2.0 * mux * muy + c1;
      const double a2 = 2.0 * sxy + c2;
      const double b1 = mux * mux + muy * muy + c1;
      const double b2 = sx + sy + c2;
      const double s = (a1 * a2) / (b1 * b2);
      total += s;
      const double dd = 2.0 / (b1 * b2);
      alpha.v[i] = dd * (muy * (a2 - a1) + s * mux * (b1 - b2));
      beta.v[i] = dd * a1;
      gamma.v[i] = -dd * s * b1;
    }
    count += m.mu_x.v.size();

    const Plane ga = adjoint_window(alpha, win, d.h, d.w);
    const Plane gb = adjoint_window(beta, win, d.h, d.w);
    const Plane gc = adjoint_window(gamma, win, d.h, d.w);
    double* grad_channel = result.grad.data() + static_cast<std::size_t>(c) * d.h * d.w;
    for (std::size_t i = 0; i < ga.v.size(); ++i) {
      grad_channel[i] = ga.v[i] + gb.v[i] * y.v[i] + gc.v[i] * x.v[i];
    }
  }

  const double inv_count = 1.0 / static_cast<double>(count);
  result.value = total * inv_count;
  result.grad *= inv_count;
  return result;
}

namespace {

// Shared MS-SSIM walk. When grad_out is null only the value is computed.
double ms_ssim_impl(const Tensor& a, const Tensor& b, const MsSsimParams& params,
                    Tensor* grad_out) {
  const TensorDims d = validate_metric_pair(a, b, params.ssim.window_size, "ms_ssim");
  const std::vector<double> weights = params.effective_weights();
  const int scales = params.scales;
  const std::vector<double> win = params.ssim.window_1d();
  const double c1 = params.ssim.c1();
  const double c2 = params.ssim.c2();

  {
    int h = d.h, w = d.w;
    for (int s = 1; s < scales; ++s) {
      h /= 2;
      w /= 2;
    }
    if (h < params.ssim.window_size || w < params.ssim.window_size) {
      throw ValidationError("ms_ssim: coarsest scale " + std::to_string(h) + "x" +
                            std::to_string(w) + " is below the window; reduce the scale count (" +
                            std::to_string(scales) + ") for input " + std::to_string(d.h) + "x" +
                            std::to_string(d.w));
    }
  }

  if (grad_out != nullptr) *grad_out = Tensor(a.shape());
  double value_sum = 0.0;

  for (int c = 0; c < d.c; ++c) {
    std::vector<Plane> xs, ys;
    xs.reserve(static_cast<std::size_t>(scales));
    ys.reserve(static_cast<std::size_t>(scales));
    xs.push_back(channel_plane(a, c, d.h, d.w));
    ys.push_back(channel_plane(b, c, d.h, d.w));
    for (int s = 1; s < scales; ++s) {
      xs.push_back(mean_pool(xs.back()));
      ys.push_back(mean_pool(ys.back()));
    }

    std::vector<Moments> moments(static_cast<std::size_t>(scales));
    std::vector<double> cs_mean(static_cast<std::size_t>(scales));
    double lum_mean = 0.0;
    for (int s = 0; s < scales; ++s) {
      moments[static_cast<std::size_t>(s)] =
          compute_moments(xs[static_cast<std::size_t>(s)], ys[static_cast<std::size_t>(s)], win);
      const Moments& m = moments[static_cast<std::size_t>(s)];
      double cs_sum = 0.0;
      double lum_sum = 0.0;
      for (std::size_t i = 0; i < m.mu_x.v.size(); ++i) {
        const double mux = m.mu_x.v[i];
        const double muy = m.mu_y.v[i];
        const double sx = m.xx.v[i] - mux * mux;
        const double sy = m.yy.v[i] - muy * muy;
        const double sxy = m.xy.v[i] - mux * muy;
        cs_sum += (2.0 * sxy + c2) / (sx + sy + c2);
        if (s == scales - 1) {
          lum_sum += (2.0 * mux * muy + c1) / (mux * mux + muy * muy + c1);
        }
      }
      const double n = static_cast<double>(m.mu_x.v.size());
      cs_mean[static_cast<std::size_t>(s)] = cs_sum / n;
      if (s == scales - 1) lum_mean = lum_sum / n;
    }

    for (int s = 0; s < scales; ++s) {
      if (cs_mean[static_cast<std::size_t>(s)] <= 0.0) {
        throw NumericalError(
            "ms_ssim: non-positive mean contrast-structure term at scale " + std::to_string(s) +
            " (strongly anti-correlated inputs are outside the metric's domain)");
      }
    }

    double channel_value = std::pow(lum_mean, weights[static_cast<std::size_t>(scales - 1)]);
    for (int s = 0; s < scales; ++s) {
      channel_value *= std::pow(cs_mean[static_cast<std::size_t>(s)],
                                weights[static_cast<std::size_t>(s)]);
    }
    value_sum += channel_value;

    if (grad_out == nullptr) continue;

    // d(channel)/d(cs_mean_s) = channel * w_s / cs_mean_s; likewise for the
    // luminance mean at the coarsest scale.
    Plane carry;  // gradient wrt x_s, accumulated from coarse to fine
    for (int s = scales - 1; s >= 0; --s) {
      const Moments& m = moments[static_cast<std::size_t>(s)];
      const Plane& x = xs[static_cast<std::size_t>(s)];
      const Plane& y = ys[static_cast<std::size_t>(s)];
      const int mh = m.mu_x.h, mw = m.mu_x.w;
      const double n = static_cast<double>(m.mu_x.v.size());
      const double dcs = channel_value * weights[static_cast<std::size_t>(s)] /
                         cs_mean[static_cast<std::size_t>(s)] / n;
      const double dlum = s == scales - 1 ? channel_value *
                                                weights[static_cast<std::size_t>(s)] / lum_mean / n
                                          : 0.0;

      Plane alpha(mh, mw), beta(mh, mw), gamma(mh, mw);
      for (std::size_t i = 0; i < m.mu_x.v.size(); ++i) {
        const double mux = m.mu_x.v[i];
        const double muy = m.mu_y.v[i];
        const double sx = m.xx.v[i] - mux * mux;
        const double sy = m.yy.v[i] - muy * muy;
        const double sxy = m.xy.v[i] - mux * muy;
        const double b2 = sx + sy + c2;
        const double cs = (2.0 * sxy + c2) / b2;
        // cs term: dcs/dx_i = w * (2/b2) * ((y_i - muy) - cs * (x_i - mux))
        const double k = dcs * 2.0 / b2;
        alpha.v[i] = k * (cs * mux - muy);
        beta.v[i] = k;
        gamma.v[i] = -k * cs;
        if (s == scales - 1) {
          // luminance term: dl/dx_i = w * (2/b1) * (muy - l * mux)
          const double b1 = mux * mux + muy * muy + c1;
          const double l = (2.0 * mux * muy + c1) / b1;
          alpha.v[i] += dlum * (2.0 / b1) * (muy - l * mux);
        }
      }

      const Plane ga = adjoint_window(alpha, win, x.h, x.w);
      const Plane gb = adjoint_window(beta, win, x.h, x.w);
      const Plane gc = adjoint_window(gamma, win, x.h, x.w);
      Plane grad_scale(x.h, x.w);
      for (std::size_t i = 0; i < grad_scale.v.size(); ++i) {
        grad_scale.v[i] = ga.v[i] + gb.v[i] * y.v[i] + gc.v[i] * x.v[i];
      }
      if (s == scales - 1) {
        carry = std::move(grad_scale);
      } else {
        Plane lifted = mean_pool_adjoint(carry, x.h, x.w);
        for (std::size_t i = 0; i < lifted.v.size(); ++i) lifted.v[i] += grad_scale.v[i];
        carry = std::move(lifted);
      }
    }
    double* grad_channel = grad_out->data() + static_cast<std::size_t>(c) * d.h * d.w;
    for (std::size_t i = 0; i < carry.v.size(); ++i) grad_channel[i] = carry.v[i];
  }

  const double inv_c = 1.0 / static_cast<double>(d.c);
  if (grad_out != nullptr) *grad_out *= inv_c;
  return value_sum * inv_c;
}

}  // namespace

double ms_ssim(const Tensor& a, const Tensor& b, const MsSsimParams& params) {
  return ms_ssim_impl(a, b, params, nullptr);
}

MetricGrad ms_ssim_with_grad(const Tensor& pred, const Tensor& target,
                             const MsSsimParams& params) {
  MetricGrad result;
  result.value = ms_ssim_impl(pred, target, params, &result.grad);
  return result;
}

GainReport psnr_gain_report(const Clip& enhanced, const Clip& anchor, const Clip& reference,
                            PsnrChannels channels, double peak) {
  enhanced.require_valid("psnr_gain_report (enhanced)");
  anchor.require_valid("psnr_gain_report (anchor)");
  reference.require_valid("psnr_gain_report (reference)");
  if (enhanced.frame_count() != anchor.frame_count() ||
      enhanced.frame_count() != reference.frame_count() || enhanced.width() != anchor.width() ||
      enhanced.width() != reference.width() || enhanced.height() != anchor.height() ||
      enhanced.height() != reference.height()) {
    throw ValidationError("psnr_gain_report: clips must share geometry and length");
  }

  GainReport report;
  report.channels = channels;
  report.peak = peak;
  double anchor_sum = 0.0, enhanced_sum = 0.0, delta_sum = 0.0;
  for (int i = 0; i < enhanced.frame_count(); ++i) {
    GainRow row;
    row.frame_index = i;
    row.anchor_db = psnr(anchor.frames[static_cast<std::size_t>(i)],
                         reference.frames[static_cast<std::size_t>(i)], peak, channels);
    row.enhanced_db = psnr(enhanced.frames[static_cast<std::size_t>(i)],
                           reference.frames[static_cast<std::size_t>(i)], peak, channels);
    if (std::isinf(row.anchor_db) && std::isinf(row.enhanced_db)) {
      row.delta_db = 0.0;  // both perfect; the difference is defined as zero
    } else {
      row.delta_db = row.enhanced_db - row.anchor_db;
    }
    anchor_sum += row.anchor_db;
    enhanced_sum += row.enhanced_db;
    delta_sum += row.delta_db;
    report.rows.push_back(row);
  }
  const double n = static_cast<double>(report.rows.size());
  report.mean.frame_index = -1;
  report.mean.anchor_db = anchor_sum / n;
  report.mean.enhanced_db = enhanced_sum / n;
  report.mean.delta_db = delta_sum / n;
  return report;
}

std::string render_gain_report(const GainReport& report) {
  const auto capped = [](double v) {
    if (std::isinf(v)) return v > 0 ? 99.99 : -99.99;
    return v;
  };
  std::string out;
  out += "psnr-gain-report v1\n";
  out += "color " + report.color_label + "\n";
  out += std::string("channels ") + (report.channels == PsnrChannels::luma ? "luma" : "all") +
         "\n";
  char line[160];
  std::snprintf(line, sizeof(line), "peak %.6f\n", report.peak);
  out += line;
  std::snprintf(line, sizeof(line), "frames %zu\n", report.rows.size());
  out += line;
  for (const GainRow& row : report.rows) {
    std::snprintf(line, sizeof(line), "frame %d anchor %.6f enhanced %.6f delta %.6f\n",
                  row.frame_index, capped(row.anchor_db), capped(row.enhanced_db),
                  capped(row.delta_db));
    out += line;
  }
  std::snprintf(line, sizeof(line), "mean anchor %.6f enhanced %.6f delta %.6f\n",
                capped(report.mean.anchor_db), capped(report.mean.enhanced_db),
                capped(report.mean.delta_db));
  out += line;
  return out;
}

Tensor frame_to_tensor(const Frame& frame) {
  Tensor t({3, frame.height, frame.width});
  double* dst = t.data();
  for (const auto& plane : frame.planes) {
    std::copy(plane.begin(), plane.end(), dst);
    dst += plane.size();
  }
  return t;
}

Frame tensor_to_frame(const Tensor& tensor, ColorSpace space) {
  if (tensor.rank() != 3 || tensor.dim(0) != 3) {
    throw ValidationError("tensor_to_frame: expected 3xHxW, got " + shape_string(tensor.shape()));
  }
  Frame f(tensor.dim(2), tensor.dim(1), space);
  const double* src = tensor.data();
  for (auto& plane : f.planes) {
    std::copy(src, src + plane.size(), plane.begin());
    src += plane.size();
  }
  return f;
}

}  // namespace vcpost
