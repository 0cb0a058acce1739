// numerics/graph.cc

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

#include "avsr/numerics/graph.h"

#include <Eigen/Core>
#include <algorithm>
#include <cmath>
#include <limits>

#include "avsr/base/error.h"

namespace avsr {

namespace {

using MatR = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using CMap = Eigen::Map<const MatR>;
using MMap = Eigen::Map<MatR>;

constexpr double kLayerNormEpsilon = 1e-6;

CMap AsMatrix(const Tensor &t) { return CMap(t.data().data(), t.rows(), t.cols()); }
MMap AsMatrix(Tensor &t) { return MMap(t.data().data(), t.rows(), t.cols()); }
CMap AsMatrix(const Tensor &t, int rows, int cols) { return CMap(t.data().data(), rows, cols); }
MMap AsMatrix(Tensor &t, int rows, int cols) { return MMap(t.data().data(), rows, cols); }

[[noreturn]] void Mismatch(OpKind op, const std::string &what) {
  throw DimensionError(std::string(OpName(op)) + ": " + what);
}

void RequireRank(OpKind op, const Tensor &t, int rank, const char *arg) {
  if (t.rank() != rank)
    Mismatch(op, std::string(arg) + " must have rank " + std::to_string(rank) + ", got " +
                     ShapeString(t.shape()));
}

// Geometry shared by kConv and kMaxPool. Same padding: out = ceil(in/stride),
// padding split with the smaller half in front.
struct Window {
  int in, out, k, stride, pad;
};

Window MakeWindow(int in, int k, int stride) {
  Window w{in, (in + stride - 1) / stride, k, stride, 0};
  int total = std::max((w.out - 1) * stride + k - in, 0);
  w.pad = total / 2;
  return w;
}

struct ConvGeometry {
  Window t, h, w;
  int cin, cout;
  int patch() const { return t.k * h.k * w.k * cin; }
  int positions() const { return h.out * w.out; }
};

ConvGeometry MakeConvGeometry(const Tensor &x, const Tensor &k, int stride) {
  RequireRank(OpKind::kConv, x, 4, "input");
  RequireRank(OpKind::kConv, k, 5, "kernel");
  if (k.dim(3) != x.dim(3))
    Mismatch(OpKind::kConv, "input channels " + std::to_string(x.dim(3)) +
                                " vs kernel axis 3 " + std::to_string(k.dim(3)));
  if (stride < 1) Mismatch(OpKind::kConv, "stride must be positive");
  return {MakeWindow(x.dim(0), k.dim(0), 1), MakeWindow(x.dim(1), k.dim(1), stride),
          MakeWindow(x.dim(2), k.dim(2), stride), x.dim(3), k.dim(4)};
}

// Fills the im2col matrix for output frame ot. Out-of-range taps are zero.
void Im2Col(const Tensor &x, const ConvGeometry &g, int ot, MatR &col) {
  col.setZero(g.positions(), g.patch());
  const double *src = x.data().data();
  for (int oy = 0; oy < g.h.out; ++oy)
    for (int ox = 0; ox < g.w.out; ++ox) {
      double *row = col.row(oy * g.w.out + ox).data();
      int c = 0;
      for (int dt = 0; dt < g.t.k; ++dt) {
        int it = ot - g.t.pad + dt;
        for (int dy = 0; dy < g.h.k; ++dy) {
          int iy = oy * g.h.stride - g.h.pad + dy;
          for (int dx = 0; dx < g.w.k; ++dx, c += g.cin) {
            int ix = ox * g.w.stride - g.w.pad + dx;
            if (it < 0 || it >= g.t.in || iy < 0 || iy >= g.h.in || ix < 0 || ix >= g.w.in)
              continue;
            const double *p = src + ((static_cast<size_t>(it) * g.h.in + iy) * g.w.in + ix) * g.cin;
            std::copy(p, p + g.cin, row + c);
          }
        }
      }
    }
}

void Col2ImAdd(const MatR &col, const ConvGeometry &g, int ot, Tensor &dx) {
  double *dst = dx.data().data();
  for (int oy = 0; oy < g.h.out; ++oy)
    for (int ox = 0; ox < g.w.out; ++ox) {
      const double *row = col.row(oy * g.w.out + ox).data();
      int c = 0;
      for (int dt = 0; dt < g.t.k; ++dt) {
        int it = ot - g.t.pad + dt;
        for (int dy = 0; dy < g.h.k; ++dy) {
          int iy = oy * g.h.stride - g.h.pad + dy;
          for (int dxx = 0; dxx < g.w.k; ++dxx, c += g.cin) {
            int ix = ox * g.w.stride - g.w.pad + dxx;
            if (it < 0 || it >= g.t.in || iy < 0 || iy >= g.h.in || ix < 0 || ix >= g.w.in)
              continue;
            double *p = dst + ((static_cast<size_t>(it) * g.h.in + iy) * g.w.in + ix) * g.cin;
            for (int ci = 0; ci < g.cin; ++ci) p[ci] += row[c + ci];
          }
        }
      }
    }
}

// Splits a shape around axis into (outer, axis length, inner).
void SplitAxis(const Shape &s, int axis, size_t &outer, int &len, size_t &inner) {
  outer = 1;
  inner = 1;
  for (int i = 0; i < axis; ++i) outer *= s[i];
  len = s[axis];
  for (size_t i = axis + 1; i < s.size(); ++i) inner *= s[i];
}

}  // namespace

const char *OpName(OpKind op) {
  switch (op) {
    case OpKind::kConstant: return "constant";
    case OpKind::kParameter: return "parameter";
    case OpKind::kMatMul: return "matmul";
    case OpKind::kMatMulNT: return "matmul_nt";
    case OpKind::kAdd: return "add";
    case OpKind::kAddRow: return "add_row";
    case OpKind::kScale: return "scale";
    case OpKind::kMul: return "mul";
    case OpKind::kConcat: return "concat";
    case OpKind::kRelu: return "relu";
    case OpKind::kSoftmax: return "softmax";
    case OpKind::kLogSoftmax: return "log_softmax";
    case OpKind::kLayerNorm: return "layer_norm";
    case OpKind::kEmbedding: return "embedding";
    case OpKind::kMean: return "mean";
    case OpKind::kSum: return "sum";
    case OpKind::kTranspose: return "transpose";
    case OpKind::kSliceCols: return "slice_cols";
    case OpKind::kReshape: return "reshape";
    case OpKind::kDropout: return "dropout";
    case OpKind::kConv: return "conv";
    case OpKind::kMaxPool: return "max_pool";
    case OpKind::kAttachedLoss: return "attached_loss";
  }
  return "unknown";
}

Graph::Graph(GraphOptions options) : options_(options), rng_(MakeRng(options.seed, 0x6772)) {}

NodeId Graph::Constant(Tensor value) {
  if (!value.AllFinite()) throw NumericError("constant: non-finite value");
  Node n;
  n.op = OpKind::kConstant;
  n.value = std::move(value);
  nodes_.push_back(std::move(n));
  return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId Graph::Parameter(const ParameterSet &params, const std::string &name) {
  for (const auto &[pname, id] : params_)
    if (pname == name) return id;
  auto it = params.find(name);
  if (it == params.end()) throw ConfigError("graph: unknown parameter '" + name + "'");
  Node n;
  n.op = OpKind::kParameter;
  n.alias = &it->second;
  n.name = name;
  nodes_.push_back(std::move(n));
  NodeId id = static_cast<NodeId>(nodes_.size() - 1);
  params_.emplace_back(name, id);
  return id;
}

NodeId Graph::Apply(OpKind op, std::vector<NodeId> inputs, OpAttrs attrs) {
  if (op == OpKind::kConstant || op == OpKind::kParameter)
    throw ConfigError("graph: use Constant()/Parameter() for leaf nodes");
  for (NodeId id : inputs)
    if (id < 0 || static_cast<size_t>(id) >= nodes_.size())
      throw ConfigError(std::string(OpName(op)) + ": input refers to a missing node");
  Node n;
  n.op = op;
  n.inputs = std::move(inputs);
  n.attrs = std::move(attrs);
  n.value = Evaluate(n);
  if (!n.value.AllFinite())
    throw NumericError(std::string(OpName(op)) + ": produced a non-finite value");
  nodes_.push_back(std::move(n));
  return static_cast<NodeId>(nodes_.size() - 1);
}

NodeId Graph::Scale(NodeId a, double s) {
  OpAttrs at;
  at.scalar = s;
  return Apply(OpKind::kScale, {a}, std::move(at));
}

NodeId Graph::Softmax(NodeId a, Tensor mask) {
  OpAttrs at;
  at.mask = std::move(mask);
  return Apply(OpKind::kSoftmax, {a}, std::move(at));
}

NodeId Graph::Embedding(NodeId table, std::vector<int> ids) {
  OpAttrs at;
  at.ids = std::move(ids);
  return Apply(OpKind::kEmbedding, {table}, std::move(at));
}

NodeId Graph::Mean(NodeId a, int axis) {
  OpAttrs at;
  at.axis = axis;
  return Apply(OpKind::kMean, {a}, std::move(at));
}

NodeId Graph::SliceCols(NodeId a, int start, int length) {
  OpAttrs at;
  at.start = start;
  at.length = length;
  return Apply(OpKind::kSliceCols, {a}, std::move(at));
}

NodeId Graph::Reshape(NodeId a, Shape shape) {
  OpAttrs at;
  at.shape = std::move(shape);
  return Apply(OpKind::kReshape, {a}, std::move(at));
}

NodeId Graph::Dropout(NodeId a, double p) {
  if (p < 0.0 || p >= 1.0) throw ConfigError("dropout: probability must be in [0, 1)");
  if (!options_.training || p == 0.0) return a;
  OpAttrs at;
  at.scalar = p;
  return Apply(OpKind::kDropout, {a}, std::move(at));
}

NodeId Graph::Conv(NodeId x, NodeId kernel, int stride) {
  OpAttrs at;
  at.stride = stride;
  return Apply(OpKind::kConv, {x, kernel}, std::move(at));
}

NodeId Graph::MaxPool(NodeId x, int window, int stride) {
  OpAttrs at;
  at.window = window;
  at.stride = stride;
  return Apply(OpKind::kMaxPool, {x}, std::move(at));
}

NodeId Graph::AttachLoss(NodeId input, double value, Tensor gradient) {
  OpAttrs at;
  at.scalar = value;
  at.gradient = std::move(gradient);
  return Apply(OpKind::kAttachedLoss, {input}, std::move(at));
}

const Tensor &Graph::value(NodeId id) const { return Value(nodes_.at(id)); }

Tensor Graph::gradient(NodeId id) const {
  const Node &n = nodes_.at(id);
  if (!n.grad.empty()) return n.grad;
  return Tensor(Value(n).shape());
}

Tensor &Graph::GradOf(NodeId id) {
  Node &n = nodes_[id];
  if (n.grad.empty()) n.grad = Tensor(Value(n).shape());
  return n.grad;
}

Tensor Graph::Evaluate(Node &n) {
  auto in = [&](int i) -> const Tensor & { return Value(nodes_[n.inputs[i]]); };
  auto need = [&](size_t count) {
    if (n.inputs.size() != count)
      Mismatch(n.op, "expects " + std::to_string(count) + " inputs, got " +
                         std::to_string(n.inputs.size()));
  };
  switch (n.op) {
    case OpKind::kMatMul:
    case OpKind::kMatMulNT: {
      need(2);
      const Tensor &a = in(0), &b = in(1);
      RequireRank(n.op, b, 2, "rhs");
      bool nt = n.op == OpKind::kMatMulNT;
      int inner_b = nt ? b.dim(1) : b.dim(0);
      if (a.cols() != inner_b)
        Mismatch(n.op, "inner axes differ: lhs " + ShapeString(a.shape()) + " axis -1 vs rhs " +
                           ShapeString(b.shape()) + " axis " + (nt ? "1" : "0"));
      int out_cols = nt ? b.dim(0) : b.dim(1);
      Tensor out({a.rows(), out_cols});
      if (nt)
        AsMatrix(out).noalias() = AsMatrix(a) * AsMatrix(b).transpose();
      else
        AsMatrix(out).noalias() = AsMatrix(a) * AsMatrix(b);
      return out;
    }
    case OpKind::kAdd:
    case OpKind::kMul: {
      need(2);
      const Tensor &a = in(0), &b = in(1);
      if (a.shape() != b.shape())
        Mismatch(n.op, "shapes " + ShapeString(a.shape()) + " and " + ShapeString(b.shape()));
      Tensor out = a;
      auto o = out.data();
      auto bd = b.data();
      if (n.op == OpKind::kAdd)
        for (size_t i = 0; i < o.size(); ++i) o[i] += bd[i];
      else
        for (size_t i = 0; i < o.size(); ++i) o[i] *= bd[i];
      return out;
    }
    case OpKind::kAddRow: {
      need(2);
      const Tensor &a = in(0), &b = in(1);
      if (static_cast<int>(b.size()) != a.cols())
        Mismatch(n.op, "bias of " + ShapeString(b.shape()) + " vs last axis of " +
                           ShapeString(a.shape()));
      Tensor out = a;
      AsMatrix(out).rowwise() += AsMatrix(b, 1, a.cols()).row(0);
      return out;
    }
    case OpKind::kScale: {
      need(1);
      Tensor out = in(0);
      for (double &v : out.data()) v *= n.attrs.scalar;
      return out;
    }
    case OpKind::kConcat: {
      if (n.inputs.empty()) Mismatch(n.op, "needs at least one input");
      int rows = in(0).rows(), cols = 0;
      for (size_t i = 0; i < n.inputs.size(); ++i) {
        if (in(i).rows() != rows)
          Mismatch(n.op, "leading axes differ: " + ShapeString(in(0).shape()) + " vs " +
                             ShapeString(in(i).shape()));
        cols += in(i).cols();
      }
      Shape s = in(0).shape();
      s.back() = cols;
      Tensor out(s);
      int offset = 0;
      for (size_t i = 0; i < n.inputs.size(); ++i) {
        AsMatrix(out).middleCols(offset, in(i).cols()) = AsMatrix(in(i));
        offset += in(i).cols();
      }
      return out;
    }
    case OpKind::kRelu: {
      need(1);
      Tensor out = in(0);
      for (double &v : out.data()) v = v > 0.0 ? v : 0.0;
      return out;
    }
    case OpKind::kSoftmax: {
      need(1);
      const Tensor &a = in(0);
      const Tensor &mask = n.attrs.mask;
      bool masked = !mask.empty();
      bool broadcast = masked && mask.size() == static_cast<size_t>(a.cols()) &&
                       mask.size() != a.size();
      if (masked && !broadcast && mask.size() != a.size())
        Mismatch(n.op, "mask " + ShapeString(mask.shape()) + " vs input " +
                           ShapeString(a.shape()));
      Tensor out(a.shape());
      int R = a.rows(), C = a.cols();
      for (int r = 0; r < R; ++r) {
        const double *x = a.data().data() + static_cast<size_t>(r) * C;
        double *y = out.data().data() + static_cast<size_t>(r) * C;
        const double *m =
            masked ? mask.data().data() + (broadcast ? 0 : static_cast<size_t>(r) * C) : nullptr;
        double mx = -std::numeric_limits<double>::infinity();
        for (int c = 0; c < C; ++c)
          if (!m || m[c] != 0.0) mx = std::max(mx, x[c]);
        if (!std::isfinite(mx)) Mismatch(n.op, "row " + std::to_string(r) + " is fully masked");
        double z = 0.0;
        for (int c = 0; c < C; ++c) {
          y[c] = (!m || m[c] != 0.0) ? std::exp(x[c] - mx) : 0.0;
          z += y[c];
        }
        for (int c = 0; c < C; ++c) y[c] /= z;
      }
      return out;
    }
    case OpKind::kLogSoftmax: {
      need(1);
      const Tensor &a = in(0);
      Tensor out(a.shape());
      int R = a.rows(), C = a.cols();
      for (int r = 0; r < R; ++r) {
        const double *x = a.data().data() + static_cast<size_t>(r) * C;
        double *y = out.data().data() + static_cast<size_t>(r) * C;
        double mx = *std::max_element(x, x + C);
        double z = 0.0;
        for (int c = 0; c < C; ++c) z += std::exp(x[c] - mx);
        double lse = mx + std::log(z);
        for (int c = 0; c < C; ++c) y[c] = x[c] - lse;
      }
      return out;
    }
    case OpKind::kLayerNorm: {
      need(3);
      const Tensor &x = in(0), &g = in(1), &b = in(2);
      int R = x.rows(), C = x.cols();
      if (static_cast<int>(g.size()) != C || static_cast<int>(b.size()) != C)
        Mismatch(n.op, "gain/bias must match last axis " + std::to_string(C));
      Tensor out(x.shape());
      n.cache.assign(static_cast<size_t>(R) * C + R, 0.0);  // xhat then rstd
      for (int r = 0; r < R; ++r) {
        const double *xr = x.data().data() + static_cast<size_t>(r) * C;
        double mean = 0.0;
        for (int c = 0; c < C; ++c) mean += xr[c];
        mean /= C;
        double var = 0.0;
        for (int c = 0; c < C; ++c) var += (xr[c] - mean) * (xr[c] - mean);
        var /= C;
        double rstd = 1.0 / std::sqrt(var + kLayerNormEpsilon);
        double *xh = n.cache.data() + static_cast<size_t>(r) * C;
        n.cache[static_cast<size_t>(R) * C + r] = rstd;
        for (int c = 0; c < C; ++c) {
          xh[c] = (xr[c] - mean) * rstd;
          out.data()[static_cast<size_t>(r) * C + c] = xh[c] * g[c] + b[c];
        }
      }
      return out;
    }
    case OpKind::kEmbedding: {
      need(1);
      const Tensor &table = in(0);
      RequireRank(n.op, table, 2, "table");
      if (n.attrs.ids.empty()) Mismatch(n.op, "no ids");
      int d = table.dim(1);
      Tensor out({static_cast<int>(n.attrs.ids.size()), d});
      for (size_t i = 0; i < n.attrs.ids.size(); ++i) {
        int id = n.attrs.ids[i];
        if (id < 0 || id >= table.dim(0))
          Mismatch(n.op, "id " + std::to_string(id) + " outside table axis 0 of size " +
                             std::to_string(table.dim(0)));
        std::copy_n(table.data().data() + static_cast<size_t>(id) * d, d,
                    out.data().data() + i * d);
      }
      return out;
    }
    case OpKind::kMean: {
      need(1);
      const Tensor &a = in(0);
      int axis = n.attrs.axis < 0 ? n.attrs.axis + a.rank() : n.attrs.axis;
      if (axis < 0 || axis >= a.rank())
        Mismatch(n.op, "axis " + std::to_string(n.attrs.axis) + " out of range for " +
                           ShapeString(a.shape()));
      size_t outer, inner;
      int len;
      SplitAxis(a.shape(), axis, outer, len, inner);
      Shape s = a.shape();
      s.erase(s.begin() + axis);
      if (s.empty()) s = {1};
      Tensor out(s);
      for (size_t o = 0; o < outer; ++o)
        for (int l = 0; l < len; ++l)
          for (size_t i = 0; i < inner; ++i)
            out.data()[o * inner + i] += a.data()[(o * len + l) * inner + i];
      for (double &v : out.data()) v /= len;
      return out;
    }
    case OpKind::kSum: {
      need(1);
      return Tensor::Scalar(in(0).Sum());
    }
    case OpKind::kTranspose: {
      need(1);
      const Tensor &a = in(0);
      RequireRank(n.op, a, 2, "input");
      Tensor out({a.dim(1), a.dim(0)});
      AsMatrix(out) = AsMatrix(a).transpose();
      return out;
    }
    case OpKind::kSliceCols: {
      need(1);
      const Tensor &a = in(0);
      if (n.attrs.start < 0 || n.attrs.length <= 0 || n.attrs.start + n.attrs.length > a.cols())
        Mismatch(n.op, "columns [" + std::to_string(n.attrs.start) + ", " +
                           std::to_string(n.attrs.start + n.attrs.length) + ") of " +
                           ShapeString(a.shape()));
      Shape s = a.shape();
      s.back() = n.attrs.length;
      Tensor out(s);
      AsMatrix(out) = AsMatrix(a).middleCols(n.attrs.start, n.attrs.length);
      return out;
    }
    case OpKind::kReshape: {
      need(1);
      if (ShapeSize(n.attrs.shape) != in(0).size())
        Mismatch(n.op, ShapeString(in(0).shape()) + " -> " + ShapeString(n.attrs.shape));
      return in(0).Reshaped(n.attrs.shape);
    }
    case OpKind::kDropout: {
      need(1);
      const Tensor &a = in(0);
      double keep = 1.0 - n.attrs.scalar;
      std::bernoulli_distribution coin(keep);
      n.cache.resize(a.size());
      Tensor out(a.shape());
      for (size_t i = 0; i < a.size(); ++i) {
        n.cache[i] = coin(rng_) ? 1.0 / keep : 0.0;
        out[i] = a[i] * n.cache[i];
      }
      return out;
    }
    case OpKind::kConv: {
      need(2);
      const Tensor &x = in(0), &k = in(1);
      ConvGeometry g = MakeConvGeometry(x, k, n.attrs.stride);
      Tensor out({g.t.out, g.h.out, g.w.out, g.cout});
      CMap kernel = AsMatrix(k, g.patch(), g.cout);
      MatR col;
      for (int ot = 0; ot < g.t.out; ++ot) {
        Im2Col(x, g, ot, col);
        MMap(out.data().data() + static_cast<size_t>(ot) * g.positions() * g.cout,
             g.positions(), g.cout)
            .noalias() = col * kernel;
      }
      return out;
    }
    case OpKind::kMaxPool: {
      need(1);
      const Tensor &x = in(0);
      RequireRank(n.op, x, 4, "input");
      if (n.attrs.window < 1 || n.attrs.stride < 1) Mismatch(n.op, "window/stride must be >= 1");
      Window wh = MakeWindow(x.dim(1), n.attrs.window, n.attrs.stride);
      Window ww = MakeWindow(x.dim(2), n.attrs.window, n.attrs.stride);
      int T = x.dim(0), C = x.dim(3);
      Tensor out({T, wh.out, ww.out, C});
      n.index_cache.assign(out.size(), 0);
      for (int t = 0; t < T; ++t)
        for (int oy = 0; oy < wh.out; ++oy)
          for (int ox = 0; ox < ww.out; ++ox)
            for (int c = 0; c < C; ++c) {
              double best = -std::numeric_limits<double>::infinity();
              int arg = -1;
              for (int dy = 0; dy < wh.k; ++dy) {
                int iy = oy * wh.stride - wh.pad + dy;
                if (iy < 0 || iy >= wh.in) continue;
                for (int dx = 0; dx < ww.k; ++dx) {
                  int ix = ox * ww.stride - ww.pad + dx;
                  if (ix < 0 || ix >= ww.in) continue;
                  int idx = ((t * wh.in + iy) * ww.in + ix) * C + c;
                  if (x[idx] > best) {
                    best = x[idx];
                    arg = idx;
                  }
                }
              }
              size_t o = ((static_cast<size_t>(t) * wh.out + oy) * ww.out + ox) * C + c;
              out[o] = best;
              n.index_cache[o] = arg;
            }
      return out;
    }
    case OpKind::kAttachedLoss: {
      need(1);
      if (n.attrs.gradient.shape() != in(0).shape())
        Mismatch(n.op, "gradient " + ShapeString(n.attrs.gradient.shape()) + " vs input " +
                           ShapeString(in(0).shape()));
      return Tensor::Scalar(n.attrs.scalar);
    }
    case OpKind::kConstant:
    case OpKind::kParameter:
      break;
  }
  throw ConfigError("graph: unhandled op");
}

void Graph::Propagate(Node &n) {
  const Tensor &dy = n.grad;
  auto in = [&](int i) -> const Tensor & { return Value(nodes_[n.inputs[i]]); };
  auto grad = [&](int i) -> Tensor & { return GradOf(n.inputs[i]); };
  switch (n.op) {
    case OpKind::kMatMul: {
      const Tensor &a = in(0), &b = in(1);
      AsMatrix(grad(0), a.rows(), a.cols()).noalias() += AsMatrix(dy) * AsMatrix(b).transpose();
      AsMatrix(grad(1)).noalias() += AsMatrix(a).transpose() * AsMatrix(dy);
      break;
    }
    case OpKind::kMatMulNT: {
      const Tensor &a = in(0), &b = in(1);
      AsMatrix(grad(0), a.rows(), a.cols()).noalias() += AsMatrix(dy) * AsMatrix(b);
      AsMatrix(grad(1)).noalias() += AsMatrix(dy).transpose() * AsMatrix(a);
      break;
    }
    case OpKind::kAdd: {
      for (int i = 0; i < 2; ++i) {
        auto g = grad(i).data();
        for (size_t j = 0; j < g.size(); ++j) g[j] += dy[j];
      }
      break;
    }
    case OpKind::kMul: {
      const Tensor &a = in(0), &b = in(1);
      auto ga = grad(0).data();
      for (size_t j = 0; j < ga.size(); ++j) ga[j] += dy[j] * b[j];
      auto gb = grad(1).data();
      for (size_t j = 0; j < gb.size(); ++j) gb[j] += dy[j] * a[j];
      break;
    }
    case OpKind::kAddRow: {
      auto g = grad(0).data();
      for (size_t j = 0; j < g.size(); ++j) g[j] += dy[j];
      Tensor &gb = grad(1);
      AsMatrix(gb, 1, dy.cols()).row(0) += AsMatrix(dy).colwise().sum();
      break;
    }
    case OpKind::kScale: {
      auto g = grad(0).data();
      for (size_t j = 0; j < g.size(); ++j) g[j] += n.attrs.scalar * dy[j];
      break;
    }
    case OpKind::kConcat: {
      int offset = 0;
      for (size_t i = 0; i < n.inputs.size(); ++i) {
        int c = in(i).cols();
        AsMatrix(grad(i)) += AsMatrix(dy).middleCols(offset, c);
        offset += c;
      }
      break;
    }
    case OpKind::kRelu: {
      const Tensor &a = in(0);
      auto g = grad(0).data();
      for (size_t j = 0; j < g.size(); ++j)
        if (a[j] > 0.0) g[j] += dy[j];
      break;
    }
    case OpKind::kSoftmax: {
      const Tensor &y = n.value;
      Tensor &g = grad(0);
      int R = y.rows(), C = y.cols();
      for (int r = 0; r < R; ++r) {
        const double *yr = y.data().data() + static_cast<size_t>(r) * C;
        const double *dr = dy.data().data() + static_cast<size_t>(r) * C;
        double dot = 0.0;
        for (int c = 0; c < C; ++c) dot += yr[c] * dr[c];
        double *gr = g.data().data() + static_cast<size_t>(r) * C;
        for (int c = 0; c < C; ++c) gr[c] += yr[c] * (dr[c] - dot);
      }
      break;
    }
    case OpKind::kLogSoftmax: {
      const Tensor &y = n.value;
      Tensor &g = grad(0);
      int R = y.rows(), C = y.cols();
      for (int r = 0; r < R; ++r) {
        const double *yr = y.data().data() + static_cast<size_t>(r) * C;
        const double *dr = dy.data().data() + static_cast<size_t>(r) * C;
        double total = 0.0;
        for (int c = 0; c < C; ++c) total += dr[c];
        double *gr = g.data().data() + static_cast<size_t>(r) * C;
        for (int c = 0; c < C; ++c) gr[c] += dr[c] - std::exp(yr[c]) * total;
      }
      break;
    }
    case OpKind::kLayerNorm: {
      const Tensor &gain = in(1);
      int R = n.value.rows(), C = n.value.cols();
      Tensor &gx = grad(0);
      Tensor &gg = grad(1);
      Tensor &gb = grad(2);
      std::vector<double> dxh(C);
      for (int r = 0; r < R; ++r) {
        const double *xh = n.cache.data() + static_cast<size_t>(r) * C;
        double rstd = n.cache[static_cast<size_t>(R) * C + r];
        const double *dr = dy.data().data() + static_cast<size_t>(r) * C;
        double mean_d = 0.0, mean_dx = 0.0;
        for (int c = 0; c < C; ++c) {
          gg[c] += dr[c] * xh[c];
          gb[c] += dr[c];
          dxh[c] = dr[c] * gain[c];
          mean_d += dxh[c];
          mean_dx += dxh[c] * xh[c];
        }
        mean_d /= C;
        mean_dx /= C;
        double *gr = gx.data().data() + static_cast<size_t>(r) * C;
        for (int c = 0; c < C; ++c) gr[c] += rstd * (dxh[c] - mean_d - xh[c] * mean_dx);
      }
      break;
    }
    case OpKind::kEmbedding: {
      Tensor &g = grad(0);
      int d = g.dim(1);
      for (size_t i = 0; i < n.attrs.ids.size(); ++i) {
        double *row = g.data().data() + static_cast<size_t>(n.attrs.ids[i]) * d;
        for (int c = 0; c < d; ++c) row[c] += dy[i * d + c];
      }
      break;
    }
    case OpKind::kMean: {
      const Tensor &a = in(0);
      int axis = n.attrs.axis < 0 ? n.attrs.axis + a.rank() : n.attrs.axis;
      size_t outer, inner;
      int len;
      SplitAxis(a.shape(), axis, outer, len, inner);
      Tensor &g = grad(0);
      for (size_t o = 0; o < outer; ++o)
        for (int l = 0; l < len; ++l)
          for (size_t i = 0; i < inner; ++i)
            g[(o * len + l) * inner + i] += dy[o * inner + i] / len;
      break;
    }
    case OpKind::kSum: {
      for (double &v : grad(0).data()) v += dy[0];
      break;
    }
    case OpKind::kTranspose: {
      AsMatrix(grad(0)) += AsMatrix(dy).transpose();
      break;
    }
    case OpKind::kSliceCols: {
      AsMatrix(grad(0)).middleCols(n.attrs.start, n.attrs.length) += AsMatrix(dy);
      break;
    }
    case OpKind::kReshape: {
      auto g = grad(0).data();
      for (size_t j = 0; j < g.size(); ++j) g[j] += dy[j];
      break;
    }
    case OpKind::kDropout: {
      auto g = grad(0).data();
      for (size_t j = 0; j < g.size(); ++j) g[j] += dy[j] * n.cache[j];
      break;
    }
    case OpKind::kConv: {
      const Tensor &x = in(0), &k = in(1);
      ConvGeometry g = MakeConvGeometry(x, k, n.attrs.stride);
      CMap kernel = AsMatrix(k, g.patch(), g.cout);
      MMap gk = AsMatrix(grad(1), g.patch(), g.cout);
      Tensor &gx = grad(0);
      MatR col, dcol;
      for (int ot = 0; ot < g.t.out; ++ot) {
        CMap dout(dy.data().data() + static_cast<size_t>(ot) * g.positions() * g.cout,
                  g.positions(), g.cout);
        Im2Col(x, g, ot, col);
        gk.noalias() += col.transpose() * dout;
        dcol.noalias() = dout * kernel.transpose();
        Col2ImAdd(dcol, g, ot, gx);
      }
      break;
    }
    case OpKind::kMaxPool: {
      Tensor &g = grad(0);
      for (size_t o = 0; o < n.index_cache.size(); ++o) g[n.index_cache[o]] += dy[o];
      break;
    }
    case OpKind::kAttachedLoss: {
      Tensor &g = grad(0);
      for (size_t j = 0; j < g.size(); ++j) g[j] += dy[0] * n.attrs.gradient[j];
      break;
    }
    case OpKind::kConstant:
    case OpKind::kParameter:
      break;
  }
}

GradientMap Graph::Backward(NodeId loss) {
  if (loss < 0 || static_cast<size_t>(loss) >= nodes_.size())
    throw ConfigError("backward: loss node does not exist");
  if (Value(nodes_[loss]).shape() != Shape{1})
    throw ConfigError("backward: loss must be a scalar [1], got " +
                      ShapeString(Value(nodes_[loss]).shape()));
  for (Node &n : nodes_) n.grad = Tensor();
  GradOf(loss)[0] = 1.0;
  for (NodeId id = loss; id >= 0; --id) {
    Node &n = nodes_[id];
    if (n.grad.empty() || n.op == OpKind::kConstant || n.op == OpKind::kParameter) continue;
    Propagate(n);
  }
  GradientMap out;
  for (const auto &[name, id] : params_) out.emplace(name, gradient(id));
  return out;
}

}  // namespace avsr
