// numerics/tensor.cc

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

#include "avsr/numerics/tensor.h"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "avsr/base/error.h"

namespace avsr {

size_t ShapeSize(const Shape &shape) {
  size_t n = 1;
  for (int d : shape) n *= static_cast<size_t>(d);
  return n;
}

std::string ShapeString(const Shape &shape) {
  std::ostringstream os;
  os << '[';
  for (size_t i = 0; i < shape.size(); ++i) os << (i ? "x" : "") << shape[i];
  os << ']';
  return os.str();
}

static void CheckShape(const Shape &shape) {
  if (shape.empty()) throw DimensionError("tensor: empty shape");
  for (int d : shape)
    if (d <= 0)
      throw DimensionError("tensor: non-positive dimension in " + ShapeString(shape));
}

Tensor::Tensor(Shape shape, double fill) : shape_(std::move(shape)) {
  CheckShape(shape_);
  data_.assign(ShapeSize(shape_), fill);
}

Tensor::Tensor(Shape shape, std::vector<double> data)
    : Tensor(std::move(shape), TensorStorage(data.begin(), data.end()), true) {}

Tensor::Tensor(Shape shape, TensorStorage data, bool)
    : shape_(std::move(shape)), data_(std::move(data)) {
  CheckShape(shape_);
  if (ShapeSize(shape_) != data_.size())
    throw DimensionError("tensor: shape " + ShapeString(shape_) + " holds " +
                         std::to_string(ShapeSize(shape_)) + " values, got " +
                         std::to_string(data_.size()));
}

Tensor Tensor::Vector(std::vector<double> v) {
  int n = static_cast<int>(v.size());
  return Tensor({n}, std::move(v));
}

Tensor Tensor::Matrix(int rows, int cols, std::vector<double> data) {
  return Tensor({rows, cols}, std::move(data));
}

Tensor Tensor::Identity(int n) {
  Tensor t({n, n});
  for (int i = 0; i < n; ++i) t.at(i, i) = 1.0;
  return t;
}

int Tensor::dim(int axis) const {
  if (axis < 0) axis += rank();
  if (axis < 0 || axis >= rank())
    throw DimensionError("tensor: axis out of range for " + ShapeString(shape_));
  return shape_[axis];
}

int Tensor::rows() const {
  if (shape_.empty()) return 0;
  return static_cast<int>(data_.size() / shape_.back());
}

int Tensor::cols() const { return shape_.empty() ? 0 : shape_.back(); }

Tensor Tensor::Reshaped(Shape shape) const {
  if (ShapeSize(shape) != data_.size())
    throw DimensionError("reshape: " + ShapeString(shape_) + " -> " + ShapeString(shape));
  return Tensor(std::move(shape), data_, true);
}

Tensor Tensor::RowSlice(int begin, int count) const {
  if (begin < 0 || count <= 0 || begin + count > rows())
    throw DimensionError("row slice out of range for " + ShapeString(shape_));
  size_t c = cols();
  TensorStorage out(data_.begin() + begin * c, data_.begin() + (begin + count) * c);
  return Tensor({count, static_cast<int>(c)}, std::move(out), true);
}

bool Tensor::AllFinite() const {
  return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double Tensor::Sum() const {
  double s = 0.0;
  for (double v : data_) s += v;
  return s;
}

double Tensor::MaxAbs() const {
  double m = 0.0;
  for (double v : data_) m = std::max(m, std::fabs(v));
  return m;
}

Tensor GlorotUniform(const Shape &shape, Rng &rng) {
  int fan_in = shape.size() >= 2 ? shape[shape.size() - 2] : shape.back();
  int fan_out = shape.back();
  size_t receptive = ShapeSize(shape) / (static_cast<size_t>(fan_in) * fan_out);
  double limit = std::sqrt(6.0 / ((fan_in + fan_out) * static_cast<double>(receptive)));
  std::uniform_real_distribution<double> dist(-limit, limit);
  Tensor t(shape);
  for (double &v : t.data()) v = dist(rng);
  return t;
}

Tensor RandomNormal(const Shape &shape, double stddev, Rng &rng) {
  std::normal_distribution<double> dist(0.0, stddev);
  Tensor t(shape);
  for (double &v : t.data()) v = dist(rng);
  return t;
}

size_t CountParameters(const ParameterSet &params) {
  size_t n = 0;
  for (const auto &[name, t] : params) n += t.size();
  return n;
}

}  // namespace avsr
