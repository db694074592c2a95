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

#include <doctest.h>

#include <cmath>

#include "vcpost/errors.hpp"
#include "vcpost/rng.hpp"

using namespace vcpost;

TEST_CASE("finite_diff_check: f = sum(x) has an all-ones gradient") {
  Rng rng(1);
  Tensor x({8});
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.uniform(-2.0, 2.0);
  Tensor grad = Tensor::full({8}, 1.0);
  auto f = [](const Tensor& t) { return t.sum(); };
  FiniteDiffReport r = finite_diff_check(f, x, grad);
  CHECK(r.coords_checked == 8);
  CHECK(r.max_rel_error < 1e-10);
}

TEST_CASE("finite_diff_check: f = sum(x^2) at [1,2]") {
  Tensor x({2}, {1.0, 2.0});
  Tensor grad({2}, {2.0, 4.0});
  auto f = [](const Tensor& t) {
    double acc = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) acc += t[i] * t[i];
    return acc;
  };
  FiniteDiffReport r = finite_diff_check(f, x, grad);
  CHECK(r.max_rel_error < 1e-8);
}

TEST_CASE("finite_diff_check flags a mis-scaled analytic gradient") {
  // Claimed gradient is half the true one; with |g_numeric| >= 1 the
  // reported relative error is |g/2 - g| / |g| = 0.5.
  Tensor x({2}, {1.0, 2.0});
  Tensor half_grad({2}, {1.0, 2.0});
  auto f = [](const Tensor& t) {
    double acc = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) acc += t[i] * t[i];
    return acc;
  };
  FiniteDiffReport r = finite_diff_check(f, x, half_grad);
  CHECK(r.max_rel_error == doctest::Approx(0.5).epsilon(1e-6));
  CHECK_FALSE(r.ok(1e-4));
}

TEST_CASE("finite_diff_check reports non-finite evaluations as failure") {
  Tensor x({2}, {0.5, 0.5});
  Tensor grad({2}, {1.0, 1.0});
  auto f = [](const Tensor& t) { return std::log(t[0] - 10.0) + t[1]; };  // NaN at probes
  FiniteDiffReport r = finite_diff_check(f, x, grad);
  CHECK(r.non_finite);
  CHECK_FALSE(r.ok(1e-4));
}

TEST_CASE("finite_diff_check honors skip masks and subsampling") {
  Rng rng(2);
  Tensor x({32});
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = rng.uniform(-1.0, 1.0);
  Tensor grad = Tensor::full({32}, 1.0);
  auto f = [](const Tensor& t) { return t.sum(); };

  std::vector<std::uint8_t> skip(32, 0);
  skip[0] = skip[5] = 1;
  FiniteDiffOptions opts;
  opts.skip = &skip;
  FiniteDiffReport r = finite_diff_check(f, x, grad, opts);
  CHECK(r.coords_checked == 30);

  FiniteDiffOptions sub;
  sub.max_coords = 10;
  FiniteDiffReport r2 = finite_diff_check(f, x, grad, sub);
  CHECK(r2.coords_checked == 10);
  CHECK(r2.max_rel_error < 1e-10);

  // Subsampling is seeded: same options, same coordinates.
  FiniteDiffReport r3 = finite_diff_check(f, x, grad, sub);
  CHECK(r3.worst_coord == r2.worst_coord);
}

TEST_CASE("finite_diff_check validates arguments") {
  Tensor x({4});
  Tensor grad({5});
  auto f = [](const Tensor& t) { return t.sum(); };
  CHECK_THROWS_AS(finite_diff_check(f, x, grad), ValidationError);

  Tensor g4({4});
  FiniteDiffOptions opts;
  opts.eps = 0.0;
  CHECK_THROWS_AS(finite_diff_check(f, x, g4, opts), ValidationError);
}
