// avsr/decoding/posteriors_io.h

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

#ifndef AVSR_DECODING_POSTERIORS_IO_H_
#define AVSR_DECODING_POSTERIORS_IO_H_

#include <iosfwd>
#include <string>
#include <vector>

#include "avsr/numerics/tensor.h"

namespace avsr {

// Framed posterior file: a sequence of records, each
//   uint32 T, uint32 K, then T*K float64 values row-major,
// all little-endian. The file ends after the last complete record.
void WritePosteriors(std::ostream &os, const Tensor &posteriors);
std::vector<Tensor> ReadPosteriors(std::istream &is);

void SavePosteriors(const std::string &path, const std::vector<Tensor> &records);
std::vector<Tensor> LoadPosteriors(const std::string &path);

}  // namespace avsr

#endif  // AVSR_DECODING_POSTERIORS_IO_H_
