// model/transformer.cc

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

#include "avsr/model/transformer.h"

#include <cmath>

#include "avsr/base/error.h"
#include "avsr/base/random.h"

namespace avsr {

Tensor PositionalEncoding(int length, int d_model) {
  if (length < 1 || d_model < 1) throw DimensionError("positional encoding: empty shape");
  Tensor pe({length, d_model});
  for (int pos = 0; pos < length; ++pos)
    for (int j = 0; j < d_model; ++j) {
      double angle = pos / std::pow(10000.0, static_cast<double>(j - j % 2) / d_model);
      pe.at(pos, j) = j % 2 == 0 ? std::sin(angle) : std::cos(angle);
    }
  return pe;
}

Tensor KeyMask(int keys, int valid) {
  if (valid <= 0 || valid > keys) valid = keys;
  Tensor m({keys});
  for (int k = 0; k < valid; ++k) m[k] = 1.0;
  return m;
}

Tensor CausalMask(int length, int valid) {
  if (valid <= 0 || valid > length) valid = length;
  Tensor m({length, length});
  for (int q = 0; q < length; ++q)
    for (int k = 0; k <= q && k < valid; ++k) m.at(q, k) = 1.0;
  // Padded queries still need one live key.
  for (int q = valid; q < length; ++q) m.at(q, 0) = 1.0;
  return m;
}

NodeId MultiHeadAttention(const ForwardContext &ctx, const std::string &prefix, NodeId queries,
                          NodeId keys, const Tensor &mask) {
  Graph &g = ctx.graph;
  const int h = ctx.config.heads, dk = ctx.config.head_size();
  const Tensor &kv = g.value(keys);
  if (kv.rank() != 2 || kv.dim(0) == 0) throw DimensionError("attention: empty key sequence");
  if (!mask.empty()) {
    bool ok = mask.size() == static_cast<size_t>(kv.dim(0)) ||
              mask.shape() == Shape{g.value(queries).dim(0), kv.dim(0)};
    if (!ok)
      throw DimensionError("attention: mask " + ShapeString(mask.shape()) + " does not fit " +
                           std::to_string(g.value(queries).dim(0)) + " queries x " +
                           std::to_string(kv.dim(0)) + " keys");
  }
  NodeId q = g.MatMul(queries, ctx.P(prefix + "/wq"));
  NodeId k = g.MatMul(keys, ctx.P(prefix + "/wk"));
  NodeId v = g.MatMul(keys, ctx.P(prefix + "/wv"));
  const double scale = 1.0 / std::sqrt(static_cast<double>(dk));
  std::vector<NodeId> heads;
  for (int i = 0; i < h; ++i) {
    NodeId qi = h == 1 ? q : g.SliceCols(q, i * dk, dk);
    NodeId ki = h == 1 ? k : g.SliceCols(k, i * dk, dk);
    NodeId vi = h == 1 ? v : g.SliceCols(v, i * dk, dk);
    NodeId weights = g.Softmax(g.Scale(g.MatMulNT(qi, ki), scale), mask);
    if (ctx.attention) ctx.attention->push_back(weights);
    heads.push_back(g.MatMul(weights, vi));
  }
  return h == 1 ? heads[0] : g.Concat(heads);
}

NodeId FeedForward(const ForwardContext &ctx, const std::string &prefix, NodeId x) {
  Graph &g = ctx.graph;
  NodeId hidden = g.Relu(g.AddRow(g.MatMul(x, ctx.P(prefix + "/w1")), ctx.P(prefix + "/b1")));
  return g.AddRow(g.MatMul(hidden, ctx.P(prefix + "/w2")), ctx.P(prefix + "/b2"));
}

NodeId LayerNorm(const ForwardContext &ctx, const std::string &prefix, NodeId x) {
  return ctx.graph.LayerNorm(x, ctx.P(prefix + "/gain"), ctx.P(prefix + "/bias"));
}

NodeId EncoderLayer(const ForwardContext &ctx, const std::string &prefix, NodeId x,
                    const Tensor &mask) {
  Graph &g = ctx.graph;
  const double p = ctx.config.dropout;
  NodeId att = MultiHeadAttention(ctx, prefix + "/att", x, x, mask);
  NodeId y = LayerNorm(ctx, prefix + "/ln1", g.Add(x, g.Dropout(att, p)));
  NodeId ff = FeedForward(ctx, prefix + "/ff", y);
  return LayerNorm(ctx, prefix + "/ln2", g.Add(y, g.Dropout(ff, p)));
}

void AddAttentionParameters(ParameterSet *params, const std::string &prefix,
                            const ModelConfig &config) {
  for (const char *w : {"/wq", "/wk", "/wv"})
    (*params)[prefix + w] = Tensor({config.d_model, config.d_model});
}

void AddFeedForwardParameters(ParameterSet *params, const std::string &prefix, int in, int hidden,
                              int out) {
  (*params)[prefix + "/w1"] = Tensor({in, hidden});
  (*params)[prefix + "/b1"] = Tensor({hidden});
  (*params)[prefix + "/w2"] = Tensor({hidden, out});
  (*params)[prefix + "/b2"] = Tensor({out});
}

void AddLayerNormParameters(ParameterSet *params, const std::string &prefix, int size) {
  (*params)[prefix + "/gain"] = Tensor({size}, 1.0);
  (*params)[prefix + "/bias"] = Tensor({size});
}

void AddEncoderLayerParameters(ParameterSet *params, const std::string &prefix,
                               const ModelConfig &config) {
  AddAttentionParameters(params, prefix + "/att", config);
  AddLayerNormParameters(params, prefix + "/ln1", config.d_model);
  AddFeedForwardParameters(params, prefix + "/ff", config.d_model, config.ff_size, config.d_model);
  AddLayerNormParameters(params, prefix + "/ln2", config.d_model);
}

namespace {

uint64_t NameHash(const std::string &name) {
  uint64_t h = 1469598103934665603ull;  // FNV-1a
  for (unsigned char c : name) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

bool EndsWith(const std::string &s, const std::string &suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

void InitializeParameters(ParameterSet *params, uint64_t seed) {
  for (auto &[name, tensor] : *params) {
    if (EndsWith(name, "/gain")) {
      tensor = Tensor(tensor.shape(), 1.0);
    } else if (tensor.rank() == 1) {
      tensor = Tensor(tensor.shape(), 0.0);
    } else {
      Rng rng = MakeRng(seed, NameHash(name));
      tensor = GlorotUniform(tensor.shape(), rng);
    }
  }
}

}  // namespace avsr
