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

#include "vcpost/tensor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "vcpost/errors.hpp"

namespace vcpost {
namespace {

std::size_t checked_volume(const std::vector<int>& shape) {
  if (shape.empty()) throw ValidationError("tensor shape must not be empty");
  std::size_t volume = 1;
  for (int extent : shape) {
    if (extent <= 0) {
      throw ValidationError("tensor extents must be positive, got shape " + shape_string(shape));
    }
    const std::size_t next = volume * static_cast<std::size_t>(extent);
    if (next / static_cast<std::size_t>(extent) != volume) {
      throw ValidationError("tensor shape overflows size_t: " + shape_string(shape));
    }
    volume = next;
  }
  return volume;
}

}  // namespace

Tensor::Tensor(std::vector<int> shape) : shape_(std::move(shape)) {
  data_.assign(checked_volume(shape_), 0.0);
}

Tensor::Tensor(std::vector<int> shape, std::vector<double> data)
    : shape_(std::move(shape)), data_(std::move(data)) {
  if (checked_volume(shape_) != data_.size()) {
    throw ValidationError("tensor data length " + std::to_string(data_.size()) +
                          " does not match shape " + shape_string(shape_));
  }
}

Tensor Tensor::full(std::vector<int> shape, double value) {
  Tensor t(std::move(shape));
  t.fill(value);
  return t;
}

namespace {

std::size_t flat_index(const std::vector<int>& shape, std::initializer_list<int> idx) {
  if (idx.size() != shape.size()) {
    throw ValidationError("index rank mismatch for shape " + shape_string(shape));
  }
  std::size_t flat = 0;
  std::size_t axis = 0;
  for (int i : idx) {
    const int extent = shape[axis];
    if (i < 0 || i >= extent) {
      throw ValidationError("index out of bounds for shape " + shape_string(shape));
    }
    flat = flat * static_cast<std::size_t>(extent) + static_cast<std::size_t>(i);
    ++axis;
  }
  return flat;
}

}  // namespace

double& Tensor::at(std::initializer_list<int> idx) { return data_[flat_index(shape_, idx)]; }

double Tensor::at(std::initializer_list<int> idx) const { return data_[flat_index(shape_, idx)]; }

void Tensor::require_same_shape(const Tensor& other, const char* what) const {
  if (!same_shape(other)) {
    throw ValidationError(std::string(what) + ": shape mismatch " + shape_string(shape_) +
                          " vs " + shape_string(other.shape_));
  }
}

bool Tensor::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double Tensor::sum() const {
  double acc = 0.0;
  for (double v : data_) acc += v;
  return acc;
}

double Tensor::min() const {
  double m = std::numeric_limits<double>::infinity();
  for (double v : data_) m = std::min(m, v);
  return m;
}

double Tensor::max() const {
  double m = -std::numeric_limits<double>::infinity();
  for (double v : data_) m = std::max(m, v);
  return m;
}

void Tensor::fill(double value) { std::fill(data_.begin(), data_.end(), value); }

Tensor& Tensor::operator+=(const Tensor& other) {
  require_same_shape(other, "tensor add");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
  return *this;
}

Tensor& Tensor::operator-=(const Tensor& other) {
  require_same_shape(other, "tensor subtract");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
  return *this;
}

Tensor& Tensor::operator*=(double scalar) {
  for (double& v : data_) v *= scalar;
  return *this;
}

void Tensor::add_scaled(double alpha, const Tensor& other) {
  require_same_shape(other, "tensor add_scaled");
  for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += alpha * other.data_[i];
}

Tensor operator+(Tensor lhs, const Tensor& rhs) {
  lhs += rhs;
  return lhs;
}

Tensor operator-(Tensor lhs, const Tensor& rhs) {
  lhs -= rhs;
  return lhs;
}

Tensor operator*(double scalar, Tensor t) {
  t *= scalar;
  return t;
}

Tensor hadamard(const Tensor& a, const Tensor& b) {
  a.require_same_shape(b, "hadamard");
  Tensor out = Tensor::zeros_like(a);
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] * b[i];
  return out;
}

std::string shape_string(const std::vector<int>& shape) {
  std::string s;
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i > 0) s += 'x';
    s += std::to_string(shape[i]);
  }
  return s;
}

}  // namespace vcpost
