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

#include "vcpost/model.hpp"

#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>

#include "vcpost/errors.hpp"
#include "vcpost/gradcheck.hpp"
#include "vcpost/rng.hpp"

using namespace vcpost;
namespace fs = std::filesystem;

namespace {

fs::path temp_dir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "vcpost_model_tests";
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

Tensor random_patch(std::vector<int> shape, Rng& rng) {
  Tensor t(std::move(shape));
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = rng.uniform();
  return t;
}

GeneratorConfig tiny_config() {
  GeneratorConfig c;
  c.hidden_width = 8;
  c.residual_blocks = 2;
  return c;
}

std::vector<char> file_bytes(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

}  // namespace

TEST_CASE("init_generator: deterministic in the seed") {
  GeneratorModel a = init_generator(tiny_config(), 7);
  GeneratorModel b = init_generator(tiny_config(), 7);
  GeneratorModel c = init_generator(tiny_config(), 8);
  REQUIRE(a.kernels.size() == b.kernels.size());
  bool any_difference_to_c = false;
  for (std::size_t i = 0; i < a.kernels.size(); ++i) {
    for (std::size_t j = 0; j < a.kernels[i].size(); ++j) {
      CHECK(a.kernels[i][j] == b.kernels[i][j]);
      if (a.kernels[i][j] != c.kernels[i][j]) any_difference_to_c = true;
    }
  }
  CHECK(any_difference_to_c);
}

TEST_CASE("fresh model with global skip is the identity") {
  Rng rng(1);
  GeneratorModel model = init_generator(tiny_config(), 42);
  for (int size : {16, 96}) {
    Tensor x = random_patch({9, size, size}, rng);
    Tensor y = generator_forward(model, x);
    REQUIRE(y.shape() == x.shape());
    double max_delta = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      max_delta = std::max(max_delta, std::abs(y[i] - x[i]));
    }
    CHECK(max_delta < 1e-12);
  }
}

TEST_CASE("parameter count matches the closed form") {
  GeneratorConfig def;  // width 32, 4 blocks, 3x3
  // head 32*9*9+32, blocks 4*2*(32*32*9+32), tail 9*32*9+9
  CHECK(def.parameter_count() == 2624 + 73984 + 2601);

  GeneratorModel model = init_generator(def, 1);
  std::int64_t actual = 0;
  for (const Tensor& k : model.kernels) actual += static_cast<std::int64_t>(k.size());
  for (const Tensor& b : model.biases) actual += static_cast<std::int64_t>(b.size());
  CHECK(actual == def.parameter_count());
}

TEST_CASE("forward preserves spatial size and validates channels") {
  Rng rng(2);
  GeneratorModel model = init_generator(tiny_config(), 3);
  for (int size : {16, 96, 128}) {
    Tensor x = random_patch({9, size, size}, rng);
    CHECK(generator_forward(model, x).shape() == std::vector<int>{9, size, size});
  }
  Tensor x = random_patch({9, 24, 40}, rng);
  CHECK(generator_forward(model, x).shape() == std::vector<int>{9, 24, 40});

  Tensor bad = random_patch({3, 16, 16}, rng);
  CHECK_THROWS_AS(generator_forward(model, bad), ValidationError);
}

TEST_CASE("config validation") {
  GeneratorConfig bad_channels;
  bad_channels.channels_in = 3;
  CHECK_THROWS_AS(bad_channels.validate(), ValidationError);
  GeneratorConfig bad_kernel;
  bad_kernel.kernel = 4;
  CHECK_THROWS_AS(bad_kernel.validate(), ValidationError);
  GeneratorConfig bad_width;
  bad_width.hidden_width = 0;
  CHECK_THROWS_AS(bad_width.validate(), ValidationError);
}

TEST_CASE("backward: zero grad_output gives zero parameter gradients") {
  Rng rng(3);
  GeneratorModel model = init_generator(tiny_config(), 4);
  Tensor x = random_patch({9, 16, 16}, rng);
  ForwardTape tape;
  generator_forward(model, x, &tape);
  ParameterGradients grads = generator_backward(model, tape, Tensor({9, 16, 16}));
  for (const Tensor& k : grads.kernels) CHECK(k.sum() == 0.0);
  for (const Tensor& b : grads.biases) CHECK(b.sum() == 0.0);
  CHECK(grads.input.sum() == 0.0);
}

TEST_CASE("backward: global skip passes grad_output through when the body is zeroed") {
  Rng rng(4);
  GeneratorModel model = init_generator(tiny_config(), 5);
  for (Tensor& k : model.kernels) k.fill(0.0);
  for (Tensor& b : model.biases) b.fill(0.0);
  Tensor x = random_patch({9, 12, 12}, rng);
  ForwardTape tape;
  generator_forward(model, x, &tape);
  Tensor grad_out = random_patch({9, 12, 12}, rng);
  ParameterGradients grads = generator_backward(model, tape, grad_out);
  for (std::size_t i = 0; i < grad_out.size(); ++i) {
    CHECK(grads.input[i] == grad_out[i]);
  }
}

TEST_CASE("backward requires a recorded tape and a matching grad shape") {
  GeneratorModel model = init_generator(tiny_config(), 6);
  ForwardTape stale;
  CHECK_THROWS_AS(generator_backward(model, stale, Tensor({9, 16, 16})), ValidationError);

  Rng rng(5);
  Tensor x = random_patch({9, 16, 16}, rng);
  ForwardTape tape;
  generator_forward(model, x, &tape);
  CHECK_THROWS_AS(generator_backward(model, tape, Tensor({9, 8, 8})), ValidationError);
}

TEST_CASE("end-to-end parameter and input gradients match finite differences") {
  Rng rng(6);
  GeneratorModel model = init_generator(tiny_config(), 7);
  // Break the identity so gradients are generic.
  for (Tensor& k : model.kernels) {
    for (std::size_t i = 0; i < k.size(); ++i) k[i] += rng.uniform(-0.05, 0.05);
  }
  Tensor x = random_patch({9, 12, 12}, rng);
  Tensor weights = random_patch({9, 12, 12}, rng);
  const auto objective = [&](const GeneratorModel& m, const Tensor& input) {
    Tensor out = generator_forward(m, input);
    double acc = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) acc += out[i] * weights[i];
    return acc;
  };

  ForwardTape tape;
  generator_forward(model, x, &tape);
  ParameterGradients grads = generator_backward(model, tape, weights);

  FiniteDiffOptions opts;
  opts.max_coords = 150;

  // Input gradient.
  auto f_input = [&](const Tensor& probe) { return objective(model, probe); };
  CHECK(finite_diff_check(f_input, x, grads.input, opts).ok(1e-3));

  // Every layer's kernel and bias.
  for (std::size_t layer = 0; layer < model.kernels.size(); ++layer) {
    auto f_kernel = [&](const Tensor& probe) {
      GeneratorModel m = model;
      m.kernels[layer] = probe;
      return objective(m, x);
    };
    CHECK(finite_diff_check(f_kernel, model.kernels[layer], grads.kernels[layer], opts).ok(1e-3));

    auto f_bias = [&](const Tensor& probe) {
      GeneratorModel m = model;
      m.biases[layer] = probe;
      return objective(m, x);
    };
    CHECK(finite_diff_check(f_bias, model.biases[layer], grads.biases[layer], opts).ok(1e-3));
  }
}

TEST_CASE("apply_gradients performs one Adam step per parameter") {
  GeneratorModel model = init_generator(tiny_config(), 8);
  ParameterGradients grads;
  for (const Tensor& k : model.kernels) grads.kernels.push_back(Tensor::zeros_like(k));
  for (const Tensor& b : model.biases) grads.biases.push_back(Tensor::zeros_like(b));
  grads.kernels[0].fill(1.0);
  GeneratorModel before = model;
  apply_gradients(model, grads, 1e-4);
  CHECK(model.kernel_adam[0].t == 1);
  CHECK(model.kernels[0][0] != before.kernels[0][0]);
  // Zero-gradient parameters stay put.
  for (std::size_t j = 0; j < model.kernels[1].size(); ++j) {
    CHECK(model.kernels[1][j] == before.kernels[1][j]);
  }
}

TEST_CASE("checkpoint: save -> load -> save is byte-identical") {
  GeneratorModel model = init_generator(tiny_config(), 9);
  model.meta.epochs_completed = 12;
  model.meta.target_bitrate = BitrateTag::low;
  const fs::path a = temp_dir() / "ckpt_a.bin";
  const fs::path b = temp_dir() / "ckpt_b.bin";
  save_checkpoint(model, a);
  GeneratorModel loaded = load_checkpoint(a);
  save_checkpoint(loaded, b);
  CHECK(file_bytes(a) == file_bytes(b));

  CHECK(loaded.meta.epochs_completed == 12);
  CHECK(loaded.meta.target_bitrate == BitrateTag::low);
  CHECK(loaded.meta.seed == 9);
  CHECK(loaded.config.hidden_width == 8);
  CHECK(loaded.kernel_adam.size() == loaded.kernels.size());
}

TEST_CASE("checkpoint: repeated load preserves every parameter bit") {
  GeneratorModel model = init_generator(tiny_config(), 10);
  const fs::path p1 = temp_dir() / "bits_1.bin";
  const fs::path p2 = temp_dir() / "bits_2.bin";
  save_checkpoint(model, p1);
  GeneratorModel l1 = load_checkpoint(p1);
  save_checkpoint(l1, p2);
  GeneratorModel l2 = load_checkpoint(p2);
  for (std::size_t i = 0; i < l1.kernels.size(); ++i) {
    for (std::size_t j = 0; j < l1.kernels[i].size(); ++j) {
      CHECK(l1.kernels[i][j] == l2.kernels[i][j]);
    }
  }
}

TEST_CASE("checkpoint: config pinning and corruption handling") {
  GeneratorModel model = init_generator(tiny_config(), 11);
  const fs::path path = temp_dir() / "ckpt_guard.bin";
  save_checkpoint(model, path);

  // Self-describing load works; a pinned mismatching config is refused.
  CHECK(load_checkpoint(path).config.hidden_width == 8);
  GeneratorConfig other = tiny_config();
  other.hidden_width = 16;
  CHECK_THROWS_AS(load_checkpoint(path, &other), ValidationError);
  GeneratorConfig same = tiny_config();
  CHECK(load_checkpoint(path, &same).config.hidden_width == 8);

  // Truncation: no partial model, diagnostic carries the offset.
  auto bytes = file_bytes(path);
  bytes.resize(bytes.size() / 2);
  const fs::path cut = temp_dir() / "ckpt_cut.bin";
  std::ofstream(cut, std::ios::binary).write(bytes.data(),
                                             static_cast<std::streamsize>(bytes.size()));
  CHECK_THROWS_WITH_AS(load_checkpoint(cut), doctest::Contains("truncated"), IoError);

  // Magic mismatch.
  auto garbage = file_bytes(path);
  garbage[0] = 'X';
  const fs::path bad = temp_dir() / "ckpt_bad.bin";
  std::ofstream(bad, std::ios::binary).write(garbage.data(),
                                             static_cast<std::streamsize>(garbage.size()));
  CHECK_THROWS_WITH_AS(load_checkpoint(bad), doctest::Contains("bad magic"), IoError);

  // Trailing garbage.
  auto padded = file_bytes(path);
  padded.push_back('\0');
  const fs::path pad = temp_dir() / "ckpt_pad.bin";
  std::ofstream(pad, std::ios::binary).write(padded.data(),
                                             static_cast<std::streamsize>(padded.size()));
  CHECK_THROWS_AS(load_checkpoint(pad), IoError);
}
