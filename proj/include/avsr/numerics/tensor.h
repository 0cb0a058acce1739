// avsr/numerics/tensor.h

// Copyright 2026  The AVSR Toolkit Authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABLITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#ifndef AVSR_NUMERICS_TENSOR_H_
#define AVSR_NUMERICS_TENSOR_H_

#include <cstddef>
#include <initializer_list>
#include <map>
#include <new>
#include <span>
#include <string>
#include <vector>

#include "avsr/base/random.h"

namespace avsr {

using Shape = std::vector<int>;

// Fixed 64-byte alignment keeps vectorized reductions bit-reproducible
// from run to run.
template <typename T>
struct AlignedAllocator {
  using value_type = T;
  static constexpr std::align_val_t kAlignment{64};

  AlignedAllocator() = default;
  template <typename U>
  AlignedAllocator(const AlignedAllocator<U> &) {}

  T *allocate(size_t n) { return static_cast<T *>(::operator new(n * sizeof(T), kAlignment)); }
  void deallocate(T *p, size_t) { ::operator delete(p, kAlignment); }
  template <typename U>
  bool operator==(const AlignedAllocator<U> &) const { return true; }
};

using TensorStorage = std::vector<double, AlignedAllocator<double>>;

size_t ShapeSize(const Shape &shape);
std::string ShapeString(const Shape &shape);

// Dense row-major float64 array. Shapes have only positive dimensions and
// the element count always equals the product of the shape.
class Tensor {
 public:
  Tensor() = default;
  explicit Tensor(Shape shape, double fill = 0.0);
  Tensor(Shape shape, std::vector<double> data);

  static Tensor Scalar(double v) { return Tensor({1}, {v}); }
  static Tensor Vector(std::vector<double> v);
  static Tensor Matrix(int rows, int cols, std::vector<double> data);
  static Tensor Identity(int n);

  const Shape &shape() const { return shape_; }
  int rank() const { return static_cast<int>(shape_.size()); }
  int dim(int axis) const;
  size_t size() const { return data_.size(); }
  bool empty() const { return data_.empty(); }

  // Matrix view: every leading axis folded into rows, last axis = cols.
  int rows() const;
  int cols() const;

  std::span<const double> data() const { return data_; }
  std::span<double> data() { return data_; }

  double operator[](size_t i) const { return data_[i]; }
  double &operator[](size_t i) { return data_[i]; }
  double at(int r, int c) const { return data_[static_cast<size_t>(r) * cols() + c]; }
  double &at(int r, int c) { return data_[static_cast<size_t>(r) * cols() + c]; }

  Tensor Reshaped(Shape shape) const;
  // Rows [begin, begin+count) of the matrix view.
  Tensor RowSlice(int begin, int count) const;

  bool AllFinite() const;
  double Sum() const;
  double MaxAbs() const;

  bool operator==(const Tensor &other) const = default;

 private:
  Tensor(Shape shape, TensorStorage data, bool);

  Shape shape_;
  TensorStorage data_;
};

// Uniform Glorot initialisation over the last two axes.
Tensor GlorotUniform(const Shape &shape, Rng &rng);
Tensor RandomNormal(const Shape &shape, double stddev, Rng &rng);

// Named trainable tensors; the ordered map keeps iteration deterministic.
using ParameterSet = std::map<std::string, Tensor>;
using GradientMap = std::map<std::string, Tensor>;

size_t CountParameters(const ParameterSet &params);

}  // namespace avsr

#endif  // AVSR_NUMERICS_TENSOR_H_
