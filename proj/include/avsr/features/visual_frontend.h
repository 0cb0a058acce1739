// avsr/features/visual_frontend.h

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


#ifndef AVSR_FEATURES_VISUAL_FRONTEND_H_
#define AVSR_FEATURES_VISUAL_FRONTEND_H_

#include <string>
#include <vector>

#include "avsr/numerics/graph.h"

namespace avsr {

// Every strided stage pads to ceil(size / stride).
inline int CeilDiv(int size, int stride) { return (size + stride - 1) / stride; }

struct FrontendConfig {
  // Stem width followed by the four residual stage widths.
  std::vector<int> channels = {64, 64, 128, 256, 512};
  int temporal_width = 5;
  int stem_kernel = 7;
  int input_channels = 1;  // grayscale
  int blocks_per_stage = 2;
  int pool_window = 3;

  int output_dim() const { return channels.back(); }
  void Validate() const;

  // Tiny schedule for desk runs: 8/8/16/16/32, one block per stage.
  static FrontendConfig Toy();
};

// Spatial size of the map before the final mean-pool for an H x W input.
std::pair<int, int> FrontendMapSize(int height, int width);
// Throws DimensionError unless the input survives the five halvings.
void CheckFrontendGeometry(int height, int width);

ParameterSet InitFrontend(const FrontendConfig &config, uint64_t seed,
                          const std::string &prefix = "fe");

// Clip [T x H x W x C] in [0, 1] -> features [T x channels.back()].
// 3D convolution (temporal_width x k x k, spatial stride 2), 3x3 max-pool
// (stride 2), four stages of residual 3x3 blocks applied per frame with
// strides 1, 2, 2, 2, then a spatial mean.
NodeId VisualFrontend(Graph &graph, const ParameterSet &params, const FrontendConfig &config,
                      NodeId clip, const std::string &prefix = "fe");

Tensor ExtractVisualFeatures(const ParameterSet &params, const FrontendConfig &config,
                             const Tensor &clip, const std::string &prefix = "fe");

}  // namespace avsr

#endif  // AVSR_FEATURES_VISUAL_FRONTEND_H_
