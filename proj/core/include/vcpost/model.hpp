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
#include <filesystem>
#include <string>
#include <vector>

#include "vcpost/nn.hpp"
#include "vcpost/tensor.hpp"

namespace vcpost {

/// Compact residual restorer: head conv + LeakyReLU, `residual_blocks`
/// two-conv blocks with local skips, a zero-initialized tail conv, and a
/// global skip. The 9-in/9-out channel contract mirrors the tri-frame patch
/// format; depth and width are configuration, not a claim about any
/// particular published architecture.
struct GeneratorConfig {
  int channels_in = 9;
  int channels_out = 9;
  int hidden_width = 32;
  int residual_blocks = 4;
  int kernel = 3;
  double activation_slope = 0.2;
  bool global_skip = true;

  void validate() const;
  int conv_count() const { return 2 + 2 * residual_blocks; }
  std::int64_t parameter_count() const;
  /// "head", "block0.conv1", ..., "tail" in forward order.
  std::vector<std::string> conv_names() const;
};

enum class BitrateTag : std::uint8_t { high = 0, low = 1 };

struct ModelMeta {
  std::uint64_t seed = 0;
  std::int32_t epochs_completed = 0;
  BitrateTag target_bitrate = BitrateTag::high;
};

struct GeneratorModel {
  GeneratorConfig config;
  std::vector<Tensor> kernels;  // per conv, forward order
  std::vector<Tensor> biases;
  std::vector<AdamState> kernel_adam;
  std::vector<AdamState> bias_adam;
  ModelMeta meta;
};

/// Kaiming-style fan-in initialization with zero biases; the tail conv is
/// zero-initialized so a fresh model with the global skip is exactly the
/// identity map. Deterministic in the seed.
GeneratorModel init_generator(const GeneratorConfig& config, std::uint64_t seed);

/// Activations saved by a recorded forward pass, consumed by backward.
struct ForwardTape {
  std::vector<Tensor> conv_inputs;  // input to each conv, forward order
  std::vector<Tensor> act_inputs;   // input to each LeakyReLU (head, then one per block)
  std::vector<int> input_shape;
  bool recorded = false;
};

/// Runs the generator on a [channels_in x H x W] patch (any spatial size at
/// least 1); output has identical shape. Pass a tape to record for backward.
Tensor generator_forward(const GeneratorModel& model, const Tensor& patch,
                         ForwardTape* tape = nullptr);

struct ParameterGradients {
  std::vector<Tensor> kernels;
  std::vector<Tensor> biases;
  Tensor input;  // gradient with respect to the patch

  void accumulate(const ParameterGradients& other);
  void scale(double factor);
};

/// Exact gradients of the recorded forward pass.
ParameterGradients generator_backward(const GeneratorModel& model, const ForwardTape& tape,
                                      const Tensor& grad_output);

/// One Adam step over every parameter using per-parameter state stored in
/// the model. Rejects non-finite gradients.
void apply_gradients(GeneratorModel& model, const ParameterGradients& grads, double lr);

/// Versioned binary checkpoint: magic, format version, config record, meta,
/// named little-endian float32 tensors, optional Adam section. save -> load
/// -> save is byte-identical.
void save_checkpoint(const GeneratorModel& model, const std::filesystem::path& path);

/// Reads a checkpoint, validating structure against the embedded config.
/// When `expected_config` is given, a mismatching file is refused.
GeneratorModel load_checkpoint(const std::filesystem::path& path,
                               const GeneratorConfig* expected_config = nullptr);

}  // namespace vcpost
