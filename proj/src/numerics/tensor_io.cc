// numerics/tensor_io.cc

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


#include "avsr/numerics/tensor_io.h"

#include <cstring>
#include <fstream>

#include "avsr/base/binary_io.h"
#include "avsr/base/error.h"

namespace avsr {

namespace {
constexpr char kMagic[8] = {'A', 'V', 'S', 'R', 'T', 'E', 'N', 'S'};
constexpr uint32_t kMaxRank = 8;
}  // namespace

void WriteTensor(std::ostream &os, const Tensor &t) {
  binary::WriteLe<uint32_t>(os, t.rank());
  for (int d : t.shape()) binary::WriteLe<uint32_t>(os, d);
  for (double v : t.data()) binary::WriteLe<double>(os, v);
}

Tensor ReadTensor(std::istream &is) {
  uint32_t rank = binary::ReadLe<uint32_t>(is, "tensor rank");
  if (rank == 0 || rank > kMaxRank) throw DataError("tensor: bad rank " + std::to_string(rank));
  Shape shape(rank);
  for (auto &d : shape) {
    uint32_t v = binary::ReadLe<uint32_t>(is, "tensor dim");
    if (v == 0 || v > (1u << 28)) throw DataError("tensor: bad dimension");
    d = static_cast<int>(v);
  }
  Tensor t(shape);
  for (double &v : t.data()) v = binary::ReadLe<double>(is, "tensor data");
  return t;
}

void WriteTensorMap(std::ostream &os, const ParameterSet &tensors) {
  binary::WriteLe<uint32_t>(os, tensors.size());
  for (const auto &[name, t] : tensors) {
    binary::WriteString(os, name);
    WriteTensor(os, t);
  }
}

ParameterSet ReadTensorMap(std::istream &is) {
  uint32_t n = binary::ReadLe<uint32_t>(is, "tensor count");
  ParameterSet out;
  for (uint32_t i = 0; i < n; ++i) {
    std::string name = binary::ReadString(is, "tensor name");
    if (out.count(name)) throw DataError("tensor map: duplicate name " + name);
    out.emplace(name, ReadTensor(is));
  }
  return out;
}

void SaveTensor(const std::string &path, const Tensor &t) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot write " + path);
  os.write(kMagic, sizeof(kMagic));
  WriteTensor(os, t);
  if (!os) throw DataError("write failed: " + path);
}

Tensor LoadTensor(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open " + path);
  char magic[8];
  if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
    throw DataError(path + ": not a tensor blob");
  return ReadTensor(is);
}

}  // namespace avsr
