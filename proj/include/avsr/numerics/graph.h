// avsr/numerics/graph.h

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

#ifndef AVSR_NUMERICS_GRAPH_H_
#define AVSR_NUMERICS_GRAPH_H_

#include <cstdint>
#include <string>
#include <vector>

#include "avsr/base/random.h"
#include "avsr/numerics/tensor.h"

namespace avsr {

using NodeId = int;

// The closed set of differentiable ops. Every op has a matching backward
// rule in graph.cc; there is no mechanism for user-defined ops.
enum class OpKind {
  kConstant,
  kParameter,
  kMatMul,       // [m,k] x [k,n]
  kMatMulNT,     // [m,k] x [n,k]^T
  kAdd,          // same shape
  kAddRow,       // [.., n] + [n], broadcast over rows
  kScale,        // attrs.scalar * x
  kMul,          // elementwise, same shape
  kConcat,       // along the last axis
  kRelu,
  kSoftmax,      // last axis, optional keep-mask
  kLogSoftmax,   // last axis
  kLayerNorm,    // last axis, inputs (x, gain, bias)
  kEmbedding,    // rows attrs.ids of a [V, d] table
  kMean,         // over attrs.axis
  kSum,          // all elements -> [1]
  kTranspose,    // rank 2
  kSliceCols,    // columns [attrs.start, attrs.start + attrs.length)
  kReshape,      // to attrs.shape
  kDropout,      // inverted dropout with probability attrs.scalar
  kConv,         // [T,H,W,Ci] * [kt,kh,kw,Ci,Co], same padding, spatial stride
  kMaxPool,      // [T,H,W,C], 1 x window x window, same padding, spatial stride
  kAttachedLoss, // scalar computed outside the graph with a known input gradient
};

const char *OpName(OpKind op);

struct OpAttrs {
  double scalar = 0.0;
  int axis = -1;
  int start = 0;
  int length = 0;
  int stride = 1;
  int window = 0;
  Shape shape;
  std::vector<int> ids;
  // kSoftmax: 1 keeps a logit, 0 masks it. Either the input's shape or a
  // single row broadcast over all rows.
  Tensor mask;
  // kAttachedLoss: d(loss)/d(input).
  Tensor gradient;
};

struct GraphOptions {
  bool training = false;  // enables dropout
  uint64_t seed = 0;      // dropout masks
};

// Tape of forward evaluations. Nodes only ever reference earlier nodes, so
// the vector order is a topological order and backward is a reverse sweep.
// Parameter nodes alias tensors of the ParameterSet they were taken from;
// the set must outlive the graph.
class Graph {
 public:
  explicit Graph(GraphOptions options = {});
  Graph(const Graph &) = delete;
  Graph &operator=(const Graph &) = delete;

  NodeId Constant(Tensor value);
  // Repeated requests for the same name return the same node.
  NodeId Parameter(const ParameterSet &params, const std::string &name);
  NodeId Apply(OpKind op, std::vector<NodeId> inputs, OpAttrs attrs = {});

  NodeId MatMul(NodeId a, NodeId b) { return Apply(OpKind::kMatMul, {a, b}); }
  NodeId MatMulNT(NodeId a, NodeId b) { return Apply(OpKind::kMatMulNT, {a, b}); }
  NodeId Add(NodeId a, NodeId b) { return Apply(OpKind::kAdd, {a, b}); }
  NodeId AddRow(NodeId a, NodeId bias) { return Apply(OpKind::kAddRow, {a, bias}); }
  NodeId Scale(NodeId a, double s);
  NodeId Mul(NodeId a, NodeId b) { return Apply(OpKind::kMul, {a, b}); }
  NodeId Concat(std::vector<NodeId> parts) { return Apply(OpKind::kConcat, std::move(parts)); }
  NodeId Relu(NodeId a) { return Apply(OpKind::kRelu, {a}); }
  NodeId Softmax(NodeId a, Tensor mask = {});
  NodeId LogSoftmax(NodeId a) { return Apply(OpKind::kLogSoftmax, {a}); }
  NodeId LayerNorm(NodeId x, NodeId gain, NodeId bias) {
    return Apply(OpKind::kLayerNorm, {x, gain, bias});
  }
  NodeId Embedding(NodeId table, std::vector<int> ids);
  NodeId Mean(NodeId a, int axis);
  NodeId Sum(NodeId a) { return Apply(OpKind::kSum, {a}); }
  NodeId Transpose(NodeId a) { return Apply(OpKind::kTranspose, {a}); }
  NodeId SliceCols(NodeId a, int start, int length);
  NodeId Reshape(NodeId a, Shape shape);
  // Identity outside training mode or when p == 0.
  NodeId Dropout(NodeId a, double p);
  NodeId Conv(NodeId x, NodeId kernel, int stride);
  NodeId MaxPool(NodeId x, int window, int stride);
  NodeId AttachLoss(NodeId input, double value, Tensor gradient);

  const Tensor &value(NodeId id) const;
  // Valid after Backward(); zero tensor for nodes the loss does not reach.
  Tensor gradient(NodeId id) const;
  OpKind op(NodeId id) const { return nodes_.at(id).op; }
  const std::vector<NodeId> &inputs(NodeId id) const { return nodes_.at(id).inputs; }
  size_t size() const { return nodes_.size(); }
  bool training() const { return options_.training; }

  // Reverse sweep from a scalar ([1]) node. Returns a gradient for every
  // parameter node on the tape, zeros where the loss does not depend on it.
  GradientMap Backward(NodeId loss);

 private:
  struct Node {
    OpKind op = OpKind::kConstant;
    std::vector<NodeId> inputs;
    OpAttrs attrs;
    Tensor value;
    const Tensor *alias = nullptr;  // parameter storage
    std::string name;
    std::vector<double> cache;       // op-specific intermediates
    std::vector<int> index_cache;
    Tensor grad;
  };

  const Tensor &Value(const Node &n) const { return n.alias ? *n.alias : n.value; }
  Tensor Evaluate(Node &node);
  void Propagate(Node &node);
  Tensor &GradOf(NodeId id);

  GraphOptions options_;
  Rng rng_;
  std::vector<Node> nodes_;
  std::vector<std::pair<std::string, NodeId>> params_;
};

}  // namespace avsr

#endif  // AVSR_NUMERICS_GRAPH_H_
