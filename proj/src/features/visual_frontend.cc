// features/visual_frontend.cc

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


#include "avsr/features/visual_frontend.h"

#include <cmath>

#include "avsr/base/error.h"
#include "avsr/model/transformer.h"

namespace avsr {

namespace {

std::string Block(const std::string &prefix, int stage, int block) {
  return prefix + "/s" + std::to_string(stage) + "b" + std::to_string(block);
}

int StageStride(int stage, int block) { return block == 0 && stage > 0 ? 2 : 1; }

bool NeedsProjection(const FrontendConfig &c, int stage, int block) {
  int in = block == 0 ? c.channels[stage] : c.channels[stage + 1];
  return StageStride(stage, block) != 1 || in != c.channels[stage + 1];
}

NodeId ConvBias(Graph &g, const ParameterSet &p, const std::string &name, NodeId x, int stride) {
  return g.AddRow(g.Conv(x, g.Parameter(p, name + "/w"), stride), g.Parameter(p, name + "/b"));
}

}  // namespace

void FrontendConfig::Validate() const {
  if (channels.size() != 5) throw ConfigError("frontend: channels needs 5 entries (stem + 4 stages)");
  for (int c : channels)
    if (c < 1) throw ConfigError("frontend: channel widths must be positive");
  if (temporal_width < 1 || temporal_width % 2 == 0)
    throw ConfigError("frontend: temporal width must be odd and positive");
  if (stem_kernel < 1 || input_channels < 1 || blocks_per_stage < 1 || pool_window < 1)
    throw ConfigError("frontend: kernel, channel, block and pool sizes must be positive");
}

FrontendConfig FrontendConfig::Toy() {
  FrontendConfig c;
  c.channels = {8, 8, 16, 16, 32};
  c.blocks_per_stage = 1;
  return c;
}

std::pair<int, int> FrontendMapSize(int height, int width) {
  int h = height, w = width;
  for (int i = 0; i < 5; ++i) {
    h = CeilDiv(h, 2);
    w = CeilDiv(w, 2);
  }
  return {h, w};
}

void CheckFrontendGeometry(int height, int width) {
  if (height < 32 || width < 32)
    throw DimensionError("frontend: " + std::to_string(height) + "x" + std::to_string(width) +
                         " input cannot survive five spatial halvings (need at least 32x32)");
}

ParameterSet InitFrontend(const FrontendConfig &c, uint64_t seed, const std::string &prefix) {
  c.Validate();
  ParameterSet p;
  p[prefix + "/stem/w"] =
      Tensor({c.temporal_width, c.stem_kernel, c.stem_kernel, c.input_channels, c.channels[0]});
  p[prefix + "/stem/b"] = Tensor({c.channels[0]});
  for (int s = 0; s < 4; ++s)
    for (int b = 0; b < c.blocks_per_stage; ++b) {
      std::string name = Block(prefix, s, b);
      int in = b == 0 ? c.channels[s] : c.channels[s + 1], out = c.channels[s + 1];
      p[name + "/conv1/w"] = Tensor({1, 3, 3, in, out});
      p[name + "/conv1/b"] = Tensor({out});
      p[name + "/conv2/w"] = Tensor({1, 3, 3, out, out});
      p[name + "/conv2/b"] = Tensor({out});
      if (NeedsProjection(c, s, b)) {
        p[name + "/proj/w"] = Tensor({1, 1, 1, in, out});
        p[name + "/proj/b"] = Tensor({out});
      }
    }
  InitializeParameters(&p, seed);
  // Rescale the Glorot draw to He scale for the ReLU stack.
  for (auto &[name, t] : p) {
    if (t.rank() != 5) continue;
    const double fan_in = t.dim(3), fan_out = t.dim(4);
    const double gain = std::sqrt((fan_in + fan_out) / fan_in);
    for (double &v : t.data()) v *= gain;
  }
  return p;
}

NodeId VisualFrontend(Graph &g, const ParameterSet &p, const FrontendConfig &c, NodeId clip,
                      const std::string &prefix) {
  c.Validate();
  const Tensor &x = g.value(clip);
  if (x.rank() != 4 || x.dim(3) != c.input_channels)
    throw DimensionError("frontend: clip " + ShapeString(x.shape()) + ", expected [T x H x W x " +
                         std::to_string(c.input_channels) + "]");
  CheckFrontendGeometry(x.dim(1), x.dim(2));
  const int T = x.dim(0);
  NodeId h = g.Relu(ConvBias(g, p, prefix + "/stem", clip, 2));
  h = g.MaxPool(h, c.pool_window, 2);
  for (int s = 0; s < 4; ++s)
    for (int b = 0; b < c.blocks_per_stage; ++b) {
      std::string name = Block(prefix, s, b);
      int stride = StageStride(s, b);
      NodeId y = g.Relu(ConvBias(g, p, name + "/conv1", h, stride));
      y = ConvBias(g, p, name + "/conv2", y, 1);
      NodeId shortcut = NeedsProjection(c, s, b) ? ConvBias(g, p, name + "/proj", h, stride) : h;
      h = g.Relu(g.Add(y, shortcut));
    }
  const Shape &m = g.value(h).shape();
  NodeId flat = g.Reshape(h, {T, m[1] * m[2], m[3]});
  return g.Mean(flat, 1);
}

Tensor ExtractVisualFeatures(const ParameterSet &params, const FrontendConfig &config,
                             const Tensor &clip, const std::string &prefix) {
  Graph g;
  return g.value(VisualFrontend(g, params, config, g.Constant(clip), prefix));
}

}  // namespace avsr
