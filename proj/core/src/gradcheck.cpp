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

#include "vcpost/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <thread>

#include "vcpost/errors.hpp"
#include "vcpost/rng.hpp"

namespace vcpost {

FiniteDiffReport finite_diff_check(const std::function<double(const Tensor&)>& f,
                                   const Tensor& x, const Tensor& analytic_grad,
                                   const FiniteDiffOptions& options) {
  x.require_same_shape(analytic_grad, "finite_diff_check");
  if (options.eps <= 0.0) throw ValidationError("finite_diff_check: eps must be positive");
  if (options.skip != nullptr && options.skip->size() != x.size()) {
    throw ValidationError("finite_diff_check: skip mask length mismatch");
  }

  std::vector<std::size_t> coords;
  coords.reserve(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (options.skip != nullptr && (*options.skip)[i] != 0) continue;
    coords.push_back(i);
  }
  if (options.max_coords != 0 && coords.size() > options.max_coords) {
    Rng rng(options.sample_seed);
    rng.shuffle(coords);
    coords.resize(options.max_coords);
    std::sort(coords.begin(), coords.end());
  }

  struct CoordResult {
    double rel = 0.0;
    bool non_finite = false;
  };
  std::vector<CoordResult> results(coords.size());

  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  const unsigned workers =
      options.threads == 0 ? hw : options.threads;
  const std::size_t n = coords.size();

  auto worker = [&](std::size_t begin, std::size_t end) {
    Tensor probe = x;  // thread-local copy, perturbed one coordinate at a time
    for (std::size_t j = begin; j < end; ++j) {
      const std::size_t i = coords[j];
      const double saved = probe[i];
      probe[i] = saved + options.eps;
      const double f_plus = f(probe);
      probe[i] = saved - options.eps;
      const double f_minus = f(probe);
      probe[i] = saved;
      if (!std::isfinite(f_plus) || !std::isfinite(f_minus)) {
        results[j].non_finite = true;
        continue;
      }
      const double g_num = (f_plus - f_minus) / (2.0 * options.eps);
      const double denom = std::max(1.0, std::abs(g_num));
      results[j].rel = std::abs(analytic_grad[i] - g_num) / denom;
    }
  };

  if (workers <= 1 || n < 2) {
    worker(0, n);
  } else {
    const unsigned w = static_cast<unsigned>(std::min<std::size_t>(workers, n));
    std::vector<std::thread> threads;
    threads.reserve(w);
    for (unsigned t = 0; t < w; ++t) {
      threads.emplace_back(worker, n * t / w, n * (t + 1) / w);
    }
    for (auto& th : threads) th.join();
  }

  FiniteDiffReport report;
  report.coords_checked = n;
  for (std::size_t j = 0; j < n; ++j) {
    if (results[j].non_finite) report.non_finite = true;
    if (results[j].rel > report.max_rel_error) {
      report.max_rel_error = results[j].rel;
      report.worst_coord = coords[j];
    }
  }
  if (report.non_finite) {
    report.max_rel_error = std::numeric_limits<double>::infinity();
  }
  return report;
}

}  // namespace vcpost
