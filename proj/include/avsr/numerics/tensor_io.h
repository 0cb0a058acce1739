// avsr/numerics/tensor_io.h

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


#ifndef AVSR_NUMERICS_TENSOR_IO_H_
#define AVSR_NUMERICS_TENSOR_IO_H_

#include <iosfwd>
#include <string>

#include "avsr/numerics/tensor.h"

namespace avsr {

// uint32 rank, uint32 dims, float64 values; little-endian.
void WriteTensor(std::ostream &os, const Tensor &t);
Tensor ReadTensor(std::istream &is);

// uint32 count, then (string name, tensor) pairs in name order.
void WriteTensorMap(std::ostream &os, const ParameterSet &tensors);
ParameterSet ReadTensorMap(std::istream &is);

// Standalone blob: "AVSRTENS" + tensor.
void SaveTensor(const std::string &path, const Tensor &t);
Tensor LoadTensor(const std::string &path);

}  // namespace avsr

#endif  // AVSR_NUMERICS_TENSOR_IO_H_
