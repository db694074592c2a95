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
#include <functional>
#include <limits>
#include <vector>

#include "vcpost/tensor.hpp"

namespace vcpost {

struct FiniteDiffOptions {
  double eps = 1e-5;
  /// 0 checks every coordinate; otherwise a seeded uniform subsample of this
  /// many coordinates is checked (central differences on large tensors are
  /// otherwise quadratic in practice).
  std::size_t max_coords = 0;
  std::uint64_t sample_seed = 2024;
  /// Optional per-coordinate skip mask (non-zero = skip), e.g. to exclude
  /// kinks of piecewise-linear functions. Length must equal x.size().
  const std::vector<std::uint8_t>* skip = nullptr;
  unsigned threads = 0;
};

struct FiniteDiffReport {
  /// max over checked coordinates of |g_analytic - g_numeric| / max(1, |g_numeric|).
  double max_rel_error = 0.0;
  std::size_t worst_coord = 0;
  std::size_t coords_checked = 0;
  /// Set when f returned a non-finite value at a probe point; the check is a
  /// failure regardless of max_rel_error.
  bool non_finite = false;

  bool ok(double tolerance) const { return !non_finite && max_rel_error < tolerance; }
};

/// Central-difference verification of an analytic gradient:
///   g_numeric(i) = (f(x + eps*e_i) - f(x - eps*e_i)) / (2*eps).
/// f must be a pure scalar function; evaluations run in double precision and
/// may be issued concurrently across coordinates.
FiniteDiffReport finite_diff_check(const std::function<double(const Tensor&)>& f,
                                   const Tensor& x, const Tensor& analytic_grad,
                                   const FiniteDiffOptions& options = {});

}  // namespace vcpost
