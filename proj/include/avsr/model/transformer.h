// avsr/model/transformer.h

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

#ifndef AVSR_MODEL_TRANSFORMER_H_
#define AVSR_MODEL_TRANSFORMER_H_

#include <string>
#include <vector>

#include "avsr/model/model_config.h"
#include "avsr/numerics/graph.h"

namespace avsr {

// Sinusoids: column 2i holds sin(pos / 10000^(2i/d)), column 2i+1 the cosine
// of the same argument.
Tensor PositionalEncoding(int length, int d_model);

// Everything a forward pass needs. attention, when set, collects every
// attention-probability node in creation order.
struct ForwardContext {
  Graph &graph;
  const ParameterSet &params;
  const ModelConfig &config;
  std::vector<NodeId> *attention = nullptr;

  NodeId P(const std::string &name) const { return graph.Parameter(params, name); }
};

// Keep-masks for attention logits (1 keeps, 0 masks).
Tensor KeyMask(int keys, int valid);          // [keys], first valid kept
Tensor CausalMask(int length, int valid = -1); // [length x length]

// Multi-head attention without an output projection: head i attends with
// query/key/value projections taken from columns [i*d_k, (i+1)*d_k) of
// prefix/wq, prefix/wk, prefix/wv, and the head contexts are concatenated.
NodeId MultiHeadAttention(const ForwardContext &ctx, const std::string &prefix, NodeId queries,
                          NodeId keys, const Tensor &mask);

// relu(x W1 + b1) W2 + b2.
NodeId FeedForward(const ForwardContext &ctx, const std::string &prefix, NodeId x);

NodeId LayerNorm(const ForwardContext &ctx, const std::string &prefix, NodeId x);

// Post-norm self-attention layer:
//   y = LN(x + drop(MHA(x, x))), out = LN(y + drop(FF(y))).
NodeId EncoderLayer(const ForwardContext &ctx, const std::string &prefix, NodeId x,
                    const Tensor &mask);

// Parameter shapes for the blocks above, added to *params under prefix.
void AddAttentionParameters(ParameterSet *params, const std::string &prefix, const ModelConfig &config);
void AddFeedForwardParameters(ParameterSet *params, const std::string &prefix, int in, int hidden, int out);
void AddLayerNormParameters(ParameterSet *params, const std::string &prefix, int size);
void AddEncoderLayerParameters(ParameterSet *params, const std::string &prefix, const ModelConfig &config);

// Fills every parameter: gains with 1, biases with 0, matrices with Glorot
// uniform drawn from a stream keyed by (seed, name), so a parameter's initial
// value does not depend on which other parameters exist.
void InitializeParameters(ParameterSet *params, uint64_t seed);

}  // namespace avsr

#endif  // AVSR_MODEL_TRANSFORMER_H_
