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

#include <cmath>
#include <cstring>
#include <fstream>

#include "vcpost/errors.hpp"
#include "vcpost/rng.hpp"

namespace vcpost {
namespace {

constexpr char kMagic[4] = {'V', 'C', 'P', 'K'};
constexpr std::uint32_t kFormatVersion = 1;

struct ConvShape {
  int in_channels;
  int out_channels;
};

std::vector<ConvShape> conv_shapes(const GeneratorConfig& c) {
  std::vector<ConvShape> shapes;
  shapes.push_back({c.channels_in, c.hidden_width});
  for (int b = 0; b < c.residual_blocks; ++b) {
    shapes.push_back({c.hidden_width, c.hidden_width});
    shapes.push_back({c.hidden_width, c.hidden_width});
  }
  shapes.push_back({c.hidden_width, c.channels_out});
  return shapes;
}

// --- little-endian encoding helpers -----------------------------------------

void put_bytes(std::string& out, const void* data, std::size_t n) {
  out.append(static_cast<const char*>(data), n);
}

void put_u8(std::string& out, std::uint8_t v) { out.push_back(static_cast<char>(v)); }

void put_u16(std::string& out, std::uint16_t v) {
  for (int i = 0; i < 2; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_u64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}

void put_i32(std::string& out, std::int32_t v) { put_u32(out, static_cast<std::uint32_t>(v)); }

void put_f32(std::string& out, float v) {
  std::uint32_t bits;
  std::memcpy(&bits, &v, 4);
  put_u32(out, bits);
}

void put_f64(std::string& out, double v) {
  std::uint64_t bits;
  std::memcpy(&bits, &v, 8);
  put_u64(out, bits);
}

void put_tensor_f32(std::string& out, const Tensor& t) {
  for (std::size_t i = 0; i < t.size(); ++i) put_f32(out, static_cast<float>(t[i]));
}

class ByteReader {
 public:
  ByteReader(std::vector<std::uint8_t> bytes, std::string name)
      : bytes_(std::move(bytes)), name_(std::move(name)) {}

  std::size_t offset() const { return pos_; }
  bool exhausted() const { return pos_ == bytes_.size(); }

  void need(std::size_t n, const char* what) {
    if (bytes_.size() - pos_ < n) {
      throw IoError("checkpoint " + name_ + ": truncated while reading " + what +
                    " at byte offset " + std::to_string(pos_) + " (need " + std::to_string(n) +
                    " bytes, have " + std::to_string(bytes_.size() - pos_) + ")");
    }
  }

  std::uint8_t get_u8(const char* what) {
    need(1, what);
    return bytes_[pos_++];
  }

  std::uint16_t get_u16(const char* what) {
    need(2, what);
    std::uint16_t v = 0;
    for (int i = 0; i < 2; ++i) v |= static_cast<std::uint16_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }

  std::uint32_t get_u32(const char* what) {
    need(4, what);
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }

  std::uint64_t get_u64(const char* what) {
    need(8, what);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(bytes_[pos_++]) << (8 * i);
    return v;
  }

  std::int32_t get_i32(const char* what) { return static_cast<std::int32_t>(get_u32(what)); }

  float get_f32(const char* what) {
    const std::uint32_t bits = get_u32(what);
    float v;
    std::memcpy(&v, &bits, 4);
    return v;
  }

  double get_f64(const char* what) {
    const std::uint64_t bits = get_u64(what);
    double v;
    std::memcpy(&v, &bits, 8);
    return v;
  }

  std::string get_string(std::size_t n, const char* what) {
    need(n, what);
    std::string s(reinterpret_cast<const char*>(bytes_.data() + pos_), n);
    pos_ += n;
    return s;
  }

  void get_tensor_f32(Tensor& t, const char* what) {
    for (std::size_t i = 0; i < t.size(); ++i) {
      t[i] = static_cast<double>(get_f32(what));
    }
  }

  const std::string& name() const { return name_; }

 private:
  std::vector<std::uint8_t> bytes_;
  std::string name_;
  std::size_t pos_ = 0;
};

}  // namespace

void GeneratorConfig::validate() const {
  if (channels_in != 9 || channels_out != 9) {
    throw ValidationError("generator must map 9 channels to 9 channels (tri-frame patch "
                          "contract), got " +
                          std::to_string(channels_in) + " -> " + std::to_string(channels_out));
  }
  if (hidden_width < 1) throw ValidationError("generator hidden width must be positive");
  if (residual_blocks < 0) throw ValidationError("generator block count must be >= 0");
  if (kernel < 1 || kernel % 2 == 0) {
    throw ValidationError("generator kernel size must be odd and positive");
  }
  if (activation_slope < 0.0 || activation_slope >= 1.0) {
    throw ValidationError("generator activation slope must lie in [0, 1)");
  }
}

std::int64_t GeneratorConfig::parameter_count() const {
  const std::int64_t k2 = static_cast<std::int64_t>(kernel) * kernel;
  std::int64_t count = 0;
  for (const ConvShape& s : conv_shapes(*this)) {
    count += static_cast<std::int64_t>(s.out_channels) * s.in_channels * k2 + s.out_channels;
  }
  return count;
}

std::vector<std::string> GeneratorConfig::conv_names() const {
  std::vector<std::string> names;
  names.emplace_back("head");
  for (int b = 0; b < residual_blocks; ++b) {
    names.push_back("block" + std::to_string(b) + ".conv1");
    names.push_back("block" + std::to_string(b) + ".conv2");
  }
  names.emplace_back("tail");
  return names;
}

GeneratorModel init_generator(const GeneratorConfig& config, std::uint64_t seed) {
  config.validate();
  GeneratorModel model;
  model.config = config;
  model.meta.seed = seed;
  Rng rng(seed);

  const auto shapes = conv_shapes(config);
  const int last = static_cast<int>(shapes.size()) - 1;
  for (int i = 0; i <= last; ++i) {
    const ConvShape& s = shapes[static_cast<std::size_t>(i)];
    Tensor kernel({s.out_channels, s.in_channels, config.kernel, config.kernel});
    Tensor bias({s.out_channels});
    if (i != last) {
      // Fan-in scaling adjusted for the LeakyReLU gain.
      const double fan_in = static_cast<double>(s.in_channels) * config.kernel * config.kernel;
      const double stddev =
          std::sqrt(2.0 / ((1.0 + config.activation_slope * config.activation_slope) * fan_in));
      for (std::size_t j = 0; j < kernel.size(); ++j) kernel[j] = stddev * rng.normal();
    }
    // Tail conv stays zero so the fresh network is the identity under the
    // global skip.
    model.kernel_adam.push_back(AdamState::for_param(kernel));
    model.bias_adam.push_back(AdamState::for_param(bias));
    model.kernels.push_back(std::move(kernel));
    model.biases.push_back(std::move(bias));
  }
  return model;
}

Tensor generator_forward(const GeneratorModel& model, const Tensor& patch, ForwardTape* tape) {
  model.config.validate();
  if (patch.rank() != 3 || patch.dim(0) != model.config.channels_in) {
    throw ValidationError("generator_forward: patch must be " +
                          std::to_string(model.config.channels_in) + "xHxW, got " +
                          shape_string(patch.shape()));
  }
  const double slope = model.config.activation_slope;
  const int blocks = model.config.residual_blocks;
  if (tape != nullptr) {
    tape->conv_inputs.clear();
    tape->act_inputs.clear();
    tape->input_shape = patch.shape();
    tape->recorded = true;
  }
  auto record_conv = [&](const Tensor& t) {
    if (tape != nullptr) tape->conv_inputs.push_back(t);
  };
  auto record_act = [&](const Tensor& t) {
    if (tape != nullptr) tape->act_inputs.push_back(t);
  };

  int conv = 0;
  record_conv(patch);
  Tensor pre = conv2d_forward(patch, model.kernels[conv], model.biases[conv]);
  ++conv;
  record_act(pre);
  Tensor h = leaky_relu(pre, slope);

  for (int b = 0; b < blocks; ++b) {
    record_conv(h);
    Tensor t1 = conv2d_forward(h, model.kernels[conv], model.biases[conv]);
    ++conv;
    record_act(t1);
    Tensor t2 = leaky_relu(t1, slope);
    record_conv(t2);
    Tensor t3 = conv2d_forward(t2, model.kernels[conv], model.biases[conv]);
    ++conv;
    h += t3;
  }

  record_conv(h);
  Tensor out = conv2d_forward(h, model.kernels[conv], model.biases[conv]);
  if (model.config.global_skip) out += patch;
  return out;
}

void ParameterGradients::accumulate(const ParameterGradients& other) {
  if (kernels.size() != other.kernels.size() || biases.size() != other.biases.size()) {
    throw ValidationError("gradient accumulate: layer count mismatch");
  }
  for (std::size_t i = 0; i < kernels.size(); ++i) kernels[i] += other.kernels[i];
  for (std::size_t i = 0; i < biases.size(); ++i) biases[i] += other.biases[i];
  if (!input.empty() && !other.input.empty()) input += other.input;
}

void ParameterGradients::scale(double factor) {
  for (Tensor& k : kernels) k *= factor;
  for (Tensor& b : biases) b *= factor;
  if (!input.empty()) input *= factor;
}

ParameterGradients generator_backward(const GeneratorModel& model, const ForwardTape& tape,
                                      const Tensor& grad_output) {
  if (!tape.recorded) {
    throw ValidationError("generator_backward: tape was not recorded by a forward pass");
  }
  const int blocks = model.config.residual_blocks;
  const int convs = model.config.conv_count();
  if (static_cast<int>(tape.conv_inputs.size()) != convs ||
      static_cast<int>(tape.act_inputs.size()) != blocks + 1) {
    throw ValidationError("generator_backward: tape does not match the model configuration");
  }
  if (grad_output.shape() != tape.input_shape) {
    throw ValidationError("generator_backward: grad_output shape " +
                          shape_string(grad_output.shape()) + " does not match forward input " +
                          shape_string(tape.input_shape));
  }
  const double slope = model.config.activation_slope;

  ParameterGradients grads;
  grads.kernels.resize(static_cast<std::size_t>(convs));
  grads.biases.resize(static_cast<std::size_t>(convs));

  int conv = convs - 1;
  ConvGradients tail = conv2d_backward(grad_output, tape.conv_inputs[static_cast<std::size_t>(conv)],
                                       model.kernels[static_cast<std::size_t>(conv)]);
  grads.kernels[static_cast<std::size_t>(conv)] = std::move(tail.kernel);
  grads.biases[static_cast<std::size_t>(conv)] = std::move(tail.bias);
  Tensor g = std::move(tail.input);
  --conv;

  for (int b = blocks - 1; b >= 0; --b) {
    // h_out = h_in + conv2(lrelu(conv1(h_in)))
    ConvGradients c2 = conv2d_backward(g, tape.conv_inputs[static_cast<std::size_t>(conv)],
                                       model.kernels[static_cast<std::size_t>(conv)]);
    grads.kernels[static_cast<std::size_t>(conv)] = std::move(c2.kernel);
    grads.biases[static_cast<std::size_t>(conv)] = std::move(c2.bias);
    --conv;
    Tensor ga =
        leaky_relu_backward(c2.input, tape.act_inputs[static_cast<std::size_t>(b + 1)], slope);
    ConvGradients c1 = conv2d_backward(ga, tape.conv_inputs[static_cast<std::size_t>(conv)],
                                       model.kernels[static_cast<std::size_t>(conv)]);
    grads.kernels[static_cast<std::size_t>(conv)] = std::move(c1.kernel);
    grads.biases[static_cast<std::size_t>(conv)] = std::move(c1.bias);
    --conv;
    g += c1.input;  // local skip
  }

  Tensor gh = leaky_relu_backward(g, tape.act_inputs[0], slope);
  ConvGradients head = conv2d_backward(gh, tape.conv_inputs[0], model.kernels[0]);
  grads.kernels[0] = std::move(head.kernel);
  grads.biases[0] = std::move(head.bias);
  grads.input = std::move(head.input);
  if (model.config.global_skip) grads.input += grad_output;
  return grads;
}

void apply_gradients(GeneratorModel& model, const ParameterGradients& grads, double lr) {
  const std::size_t convs = model.kernels.size();
  if (grads.kernels.size() != convs || grads.biases.size() != convs) {
    throw ValidationError("apply_gradients: layer count mismatch");
  }
  for (std::size_t i = 0; i < convs; ++i) {
    adam_step(model.kernels[i], grads.kernels[i], model.kernel_adam[i], lr);
    adam_step(model.biases[i], grads.biases[i], model.bias_adam[i], lr);
  }
}

void save_checkpoint(const GeneratorModel& model, const std::filesystem::path& path) {
  model.config.validate();
  const auto names = model.config.conv_names();
  if (model.kernels.size() != names.size() || model.biases.size() != names.size()) {
    throw ValidationError("save_checkpoint: model layer count does not match its config");
  }

  std::string out;
  put_bytes(out, kMagic, 4);
  put_u32(out, kFormatVersion);
  put_i32(out, model.config.channels_in);
  put_i32(out, model.config.channels_out);
  put_i32(out, model.config.hidden_width);
  put_i32(out, model.config.residual_blocks);
  put_i32(out, model.config.kernel);
  put_f64(out, model.config.activation_slope);
  put_u8(out, model.config.global_skip ? 1 : 0);
  put_u64(out, model.meta.seed);
  put_i32(out, model.meta.epochs_completed);
  put_u8(out, static_cast<std::uint8_t>(model.meta.target_bitrate));

  put_u32(out, static_cast<std::uint32_t>(2 * names.size()));
  for (std::size_t i = 0; i < names.size(); ++i) {
    for (const char* suffix : {".kernel", ".bias"}) {
      const std::string name = names[i] + suffix;
      const Tensor& t = suffix[1] == 'k' ? model.kernels[i] : model.biases[i];
      put_u16(out, static_cast<std::uint16_t>(name.size()));
      put_bytes(out, name.data(), name.size());
      put_u8(out, static_cast<std::uint8_t>(t.rank()));
      for (int d = 0; d < t.rank(); ++d) put_i32(out, t.dim(d));
      put_tensor_f32(out, t);
    }
  }

  const bool has_adam = !model.kernel_adam.empty();
  put_u8(out, has_adam ? 1 : 0);
  if (has_adam) {
    if (model.kernel_adam.size() != names.size() || model.bias_adam.size() != names.size()) {
      throw ValidationError("save_checkpoint: optimizer state count does not match layers");
    }
    put_f64(out, model.kernel_adam[0].beta1);
    put_f64(out, model.kernel_adam[0].beta2);
    put_f64(out, model.kernel_adam[0].eps);
    for (std::size_t i = 0; i < names.size(); ++i) {
      for (const AdamState* s : {&model.kernel_adam[i], &model.bias_adam[i]}) {
        put_u64(out, static_cast<std::uint64_t>(s->t));
        put_tensor_f32(out, s->m);
        put_tensor_f32(out, s->v);
      }
    }
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot open " + path.string() + " for writing");
  file.write(out.data(), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("failed writing " + path.string());
}

GeneratorModel load_checkpoint(const std::filesystem::path& path,
                               const GeneratorConfig* expected_config) {
  std::ifstream file(path, std::ios::binary);
  if (!file) throw IoError("cannot open " + path.string());
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(file)),
                                  std::istreambuf_iterator<char>());
  ByteReader in(std::move(bytes), path.string());

  const std::string magic = in.get_string(4, "magic");
  if (std::memcmp(magic.data(), kMagic, 4) != 0) {
    throw IoError("checkpoint " + path.string() + ": bad magic, not a checkpoint file");
  }
  const std::uint32_t version = in.get_u32("format version");
  if (version != kFormatVersion) {
    throw IoError("checkpoint " + path.string() + ": unsupported format version " +
                  std::to_string(version));
  }

  GeneratorModel model;
  model.config.channels_in = in.get_i32("config.channels_in");
  model.config.channels_out = in.get_i32("config.channels_out");
  model.config.hidden_width = in.get_i32("config.hidden_width");
  model.config.residual_blocks = in.get_i32("config.residual_blocks");
  model.config.kernel = in.get_i32("config.kernel");
  model.config.activation_slope = in.get_f64("config.activation_slope");
  model.config.global_skip = in.get_u8("config.global_skip") != 0;
  model.config.validate();
  if (expected_config != nullptr) {
    const GeneratorConfig& e = *expected_config;
    const GeneratorConfig& c = model.config;
    if (e.channels_in != c.channels_in || e.channels_out != c.channels_out ||
        e.hidden_width != c.hidden_width || e.residual_blocks != c.residual_blocks ||
        e.kernel != c.kernel || e.global_skip != c.global_skip ||
        e.activation_slope != c.activation_slope) {
      throw ValidationError("checkpoint " + path.string() +
                            ": stored config does not match the expected config");
    }
  }

  model.meta.seed = in.get_u64("meta.seed");
  model.meta.epochs_completed = in.get_i32("meta.epochs_completed");
  const std::uint8_t tag = in.get_u8("meta.target_bitrate");
  if (tag > 1) {
    throw IoError("checkpoint " + path.string() + ": invalid bitrate tag " + std::to_string(tag));
  }
  model.meta.target_bitrate = static_cast<BitrateTag>(tag);

  const auto names = model.config.conv_names();
  const auto shapes = conv_shapes(model.config);
  const std::uint32_t tensor_count = in.get_u32("tensor count");
  if (tensor_count != 2 * names.size()) {
    throw IoError("checkpoint " + path.string() + ": expected " +
                  std::to_string(2 * names.size()) + " tensors for this config, found " +
                  std::to_string(tensor_count));
  }

  for (std::size_t i = 0; i < names.size(); ++i) {
    const ConvShape& s = shapes[i];
    const std::vector<int> kernel_shape{s.out_channels, s.in_channels, model.config.kernel,
                                        model.config.kernel};
    const std::vector<int> bias_shape{s.out_channels};
    for (const char* suffix : {".kernel", ".bias"}) {
      const std::string expected_name = names[i] + suffix;
      const std::vector<int>& expected_shape = suffix[1] == 'k' ? kernel_shape : bias_shape;

      const std::uint16_t name_len = in.get_u16("tensor name length");
      const std::string name = in.get_string(name_len, "tensor name");
      if (name != expected_name) {
        throw IoError("checkpoint " + path.string() + ": expected tensor '" + expected_name +
                      "', found '" + name + "'");
      }
      const std::uint8_t rank = in.get_u8("tensor rank");
      std::vector<int> shape(rank);
      for (std::uint8_t d = 0; d < rank; ++d) shape[d] = in.get_i32("tensor extent");
      if (shape != expected_shape) {
        throw IoError("checkpoint " + path.string() + ": tensor '" + name + "' has shape " +
                      shape_string(shape) + " but the config implies " +
                      shape_string(expected_shape));
      }
      Tensor t(shape);
      in.get_tensor_f32(t, "tensor data");
      if (suffix[1] == 'k') {
        model.kernels.push_back(std::move(t));
      } else {
        model.biases.push_back(std::move(t));
      }
    }
  }

  const std::uint8_t has_adam = in.get_u8("optimizer flag");
  if (has_adam != 0) {
    const double beta1 = in.get_f64("adam beta1");
    const double beta2 = in.get_f64("adam beta2");
    const double eps = in.get_f64("adam eps");
    for (std::size_t i = 0; i < names.size(); ++i) {
      for (Tensor* param : {&model.kernels[i], &model.biases[i]}) {
        AdamState s = AdamState::for_param(*param, beta1, beta2);
        s.eps = eps;
        s.t = static_cast<std::int64_t>(in.get_u64("adam step counter"));
        in.get_tensor_f32(s.m, "adam first moment");
        in.get_tensor_f32(s.v, "adam second moment");
        if (param == &model.kernels[i]) {
          model.kernel_adam.push_back(std::move(s));
        } else {
          model.bias_adam.push_back(std::move(s));
        }
      }
    }
  }

  if (!in.exhausted()) {
    throw IoError("checkpoint " + path.string() + ": " +
                  std::to_string(in.offset()) + " bytes parsed but file continues (corrupt "
                  "length field or trailing garbage)");
  }
  return model;
}

}  // namespace vcpost
