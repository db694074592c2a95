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

#include <cstddef>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace vcpost {

/// Dense row-major tensor of doubles. The shape is fixed at construction
/// and element-wise operations require identical shapes. Double storage is
/// used throughout so the same code path serves training, inference and
/// finite-difference gradient verification.
class Tensor {
 public:
  Tensor() = default;

  /// Zero-filled tensor. Every extent must be positive.
  explicit Tensor(std::vector<int> shape);

  /// Takes ownership of data; data.size() must equal the shape product.
  Tensor(std::vector<int> shape, std::vector<double> data);

  static Tensor full(std::vector<int> shape, double value);
  static Tensor zeros_like(const Tensor& other) { return Tensor(other.shape_); }

  const std::vector<int>& shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int dim(int i) const { return shape_[static_cast<std::size_t>(i)]; }
  std::size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  double* data() { return data_.data(); }
  const double* data() const { return data_.data(); }
  std::span<double> values() { return data_; }
  std::span<const double> values() const { return data_; }

  double& operator[](std::size_t i) { return data_[i]; }
  double operator[](std::size_t i) const { return data_[i]; }

  /// Bounds-checked multi-index access.
  double& at(std::initializer_list<int> idx);
  double at(std::initializer_list<int> idx) const;

  bool same_shape(const Tensor& other) const { return shape_ == other.shape_; }

  /// Throws ValidationError naming `what` when shapes differ.
  void require_same_shape(const Tensor& other, const char* what) const;

  bool all_finite() const;

  double sum() const;
  double min() const;
  double max() const;

  void fill(double value);

  Tensor& operator+=(const Tensor& other);
  Tensor& operator-=(const Tensor& other);
  Tensor& operator*=(double scalar);

  /// this += alpha * other (shape-checked).
  void add_scaled(double alpha, const Tensor& other);

 private:
  std::vector<int> shape_;
  std::vector<double> data_;
};

Tensor operator+(Tensor lhs, const Tensor& rhs);
Tensor operator-(Tensor lhs, const Tensor& rhs);
Tensor operator*(double scalar, Tensor t);

/// Element-wise product (shape-checked).
Tensor hadamard(const Tensor& a, const Tensor& b);

/// "9x96x96" style rendering for diagnostics.
std::string shape_string(const std::vector<int>& shape);

}  // namespace vcpost
