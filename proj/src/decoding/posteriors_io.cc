// decoding/posteriors_io.cc

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

#include "avsr/decoding/posteriors_io.h"

#include <fstream>

#include "avsr/base/binary_io.h"

namespace avsr {

void WritePosteriors(std::ostream &os, const Tensor &posteriors) {
  if (posteriors.rank() != 2) throw DimensionError("posteriors: expected [T x K]");
  binary::WriteLe<uint32_t>(os, static_cast<uint32_t>(posteriors.dim(0)));
  binary::WriteLe<uint32_t>(os, static_cast<uint32_t>(posteriors.dim(1)));
  for (double v : posteriors.data()) binary::WriteLe<double>(os, v);
}

std::vector<Tensor> ReadPosteriors(std::istream &is) {
  std::vector<Tensor> out;
  uint32_t frames;
  while (binary::TryReadLe(is, &frames)) {
    uint32_t classes = binary::ReadLe<uint32_t>(is, "posterior class count");
    if (frames == 0 || classes == 0) throw DataError("posteriors: empty record");
    if (static_cast<uint64_t>(frames) * classes > (1ull << 28))
      throw DataError("posteriors: implausible record size");
    Tensor t({static_cast<int>(frames), static_cast<int>(classes)});
    for (double &v : t.data()) v = binary::ReadLe<double>(is, "posterior values");
    out.push_back(std::move(t));
  }
  if (is.gcount() != 0) throw DataError("posteriors: trailing partial record");
  return out;
}

void SavePosteriors(const std::string &path, const std::vector<Tensor> &records) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot write " + path);
  for (const Tensor &t : records) WritePosteriors(os, t);
  if (!os) throw DataError("write failed: " + path);
}

std::vector<Tensor> LoadPosteriors(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot read " + path);
  return ReadPosteriors(is);
}

}  // namespace avsr
