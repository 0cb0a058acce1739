// tests/unit/numerics_test.cc

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

#include <cmath>
#include <limits>

#include "doctest.h"

#include "avsr/base/error.h"
#include "avsr/numerics/adam.h"
#include "avsr/numerics/grad_check.h"
#include "avsr/numerics/graph.h"

using namespace avsr;

namespace {

Tensor Random(Shape shape, uint64_t seed, double scale = 1.0) {
  Rng rng = MakeRng(seed);
  return RandomNormal(shape, scale, rng);
}

// Wraps a one-input op so it can be grad-checked on random inputs: the loss
// is a fixed random projection of the output, which exercises every output
// entry with a distinct weight.
double CheckUnaryOp(const std::function<NodeId(Graph &, NodeId)> &op, Shape shape,
                    uint64_t seed) {
  ParameterSet params{{"x", Random(shape, seed)}};
  Tensor probe;
  LossBuilder build = [&](Graph &g, const ParameterSet &p) {
    NodeId y = op(g, g.Parameter(p, "x"));
    if (probe.empty()) probe = Random(g.value(y).shape(), seed + 1);
    return g.Sum(g.Mul(y, g.Constant(probe)));
  };
  return GradCheckAll(build, params, 1e-6).at("x");
}

}  // namespace

TEST_CASE("matmul with identity returns the other operand") {
  Tensor a = Random({3, 3}, 1);
  Graph g;
  NodeId y = g.MatMul(g.Constant(Tensor::Identity(3)), g.Constant(a));
  CHECK(g.value(y) == a);
}

TEST_CASE("softmax of equal logits is uniform") {
  Graph g;
  NodeId y = g.Softmax(g.Constant(Tensor::Vector({0, 0, 0, 0})));
  for (double v : g.value(y).data()) CHECK(v == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("layer norm of a constant vector is zero before the affine part") {
  Graph g;
  NodeId y = g.LayerNorm(g.Constant(Tensor({1, 5}, 3.7)), g.Constant(Tensor({5}, 1.0)),
                         g.Constant(Tensor({5}, 0.0)));
  for (double v : g.value(y).data()) CHECK(v == 0.0);
}

TEST_CASE("shape mismatch names the op and the axes") {
  Graph g;
  NodeId a = g.Constant(Tensor({2, 3}));
  NodeId b = g.Constant(Tensor({2, 3}));
  try {
    g.MatMul(a, b);
    FAIL("expected DimensionError");
  } catch (const DimensionError &e) {
    std::string msg = e.what();
    CHECK(msg.find("matmul") != std::string::npos);
    CHECK(msg.find("axis") != std::string::npos);
  }
  CHECK_THROWS_AS(g.Add(a, g.Constant(Tensor({3, 2}))), DimensionError);
  CHECK_THROWS_AS(g.Softmax(a, Tensor({2, 3}, 0.0)), DimensionError);
}

TEST_CASE("backward of a linear op and of a conserved sum") {
  ParameterSet params{{"p", Random({2, 3}, 3)}};
  {
    Graph g;
    GradientMap grads = g.Backward(g.Sum(g.Scale(g.Parameter(params, "p"), 3.0)));
    for (double v : grads.at("p").data()) CHECK(v == 3.0);
  }
  {
    Graph g;
    GradientMap grads = g.Backward(g.Sum(g.Softmax(g.Parameter(params, "p"))));
    for (double v : grads.at("p").data()) CHECK(std::fabs(v) < 1e-15);
  }
}

TEST_CASE("backward rejects non-scalar losses and zeroes unreachable parameters") {
  ParameterSet params{{"a", Random({2, 2}, 4)}, {"b", Random({2, 2}, 5)}};
  Graph g;
  NodeId a = g.Parameter(params, "a");
  g.Parameter(params, "b");
  CHECK_THROWS_AS(g.Backward(a), ConfigError);
  GradientMap grads = g.Backward(g.Sum(a));
  CHECK(grads.at("b").MaxAbs() == 0.0);
  CHECK(grads.at("b").shape() == Shape{2, 2});
}

TEST_CASE("random two-layer network matches central differences") {
  ParameterSet params{{"w1", Random({4, 6}, 10, 0.5)},
                      {"b1", Random({6}, 11, 0.1)},
                      {"w2", Random({6, 3}, 12, 0.5)},
                      {"b2", Random({3}, 13, 0.1)}};
  Tensor x = Random({5, 4}, 14);
  LossBuilder build = [&](Graph &g, const ParameterSet &p) {
    NodeId h = g.Relu(g.AddRow(g.MatMul(g.Constant(x), g.Parameter(p, "w1")), g.Parameter(p, "b1")));
    NodeId y = g.AddRow(g.MatMul(h, g.Parameter(p, "w2")), g.Parameter(p, "b2"));
    return g.Sum(g.Mul(g.LogSoftmax(y), g.Constant(Random({5, 3}, 15))));
  };
  for (auto &[name, err] : GradCheckAll(build, params, 1e-6)) {
    INFO(name);
    CHECK(err < 1e-5);
  }
}

TEST_CASE("grad check is near-exact on a linear model and empty without parameters") {
  ParameterSet params{{"w", Random({3, 2}, 20)}};
  Tensor x = Random({4, 3}, 21);
  LossBuilder linear = [&](Graph &g, const ParameterSet &p) {
    return g.Sum(g.MatMul(g.Constant(x), g.Parameter(p, "w")));
  };
  CHECK(GradCheck(linear, params, "w", 1e-6) < 1e-7);

  ParameterSet none;
  LossBuilder constant = [&](Graph &g, const ParameterSet &) {
    return g.Sum(g.Constant(x));
  };
  CHECK(GradCheckAll(constant, none, 1e-6).empty());
}

TEST_CASE("every op passes central differences on random inputs") {
  for (uint64_t seed = 100; seed < 103; ++seed) {
    CHECK(CheckUnaryOp([](Graph &g, NodeId x) { return g.Relu(x); }, {4, 5}, seed) < 1e-4);
    CHECK(CheckUnaryOp([](Graph &g, NodeId x) { return g.Softmax(x); }, {3, 4}, seed) < 1e-4);
    CHECK(CheckUnaryOp([](Graph &g, NodeId x) { return g.LogSoftmax(x); }, {3, 4}, seed) < 1e-4);
    CHECK(CheckUnaryOp([](Graph &g, NodeId x) { return g.Transpose(x); }, {3, 4}, seed) < 1e-4);
    CHECK(CheckUnaryOp([](Graph &g, NodeId x) { return g.Mean(x, 0); }, {3, 4}, seed) < 1e-4);
    CHECK(CheckUnaryOp([](Graph &g, NodeId x) { return g.Mean(x, 1); }, {2, 3, 4}, seed) < 1e-4);
    CHECK(CheckUnaryOp([](Graph &g, NodeId x) { return g.Scale(x, -1.5); }, {3, 4}, seed) < 1e-4);
    CHECK(CheckUnaryOp([](Graph &g, NodeId x) { return g.SliceCols(x, 1, 2); }, {3, 4}, seed) <
          1e-4);
    CHECK(CheckUnaryOp([](Graph &g, NodeId x) { return g.Reshape(x, {6, 2}); }, {3, 4}, seed) <
          1e-4);
    CHECK(CheckUnaryOp([](Graph &g, NodeId x) { return g.MatMulNT(x, x); }, {3, 4}, seed) < 1e-4);
    CHECK(CheckUnaryOp([](Graph &g, NodeId x) { return g.Concat({x, g.Scale(x, 2.0)}); }, {3, 4},
                       seed) < 1e-4);
    CHECK(CheckUnaryOp(
              [](Graph &g, NodeId x) {
                Tensor mask = Tensor::Matrix(2, 3, {1, 0, 1, 0, 1, 1});
                return g.Softmax(x, mask);
              },
              {2, 3}, seed) < 1e-4);
    CHECK(CheckUnaryOp(
              [](Graph &g, NodeId x) {
                Rng rng = MakeRng(7);
                return g.LayerNorm(x, g.Constant(RandomNormal({5}, 1.0, rng)),
                                   g.Constant(RandomNormal({5}, 1.0, rng)));
              },
              {3, 5}, seed) < 1e-4);
    CHECK(CheckUnaryOp([](Graph &g, NodeId x) { return g.Embedding(x, {2, 0, 2, 1}); }, {3, 4},
                       seed) < 1e-4);
    CHECK(CheckUnaryOp([](Graph &g, NodeId x) { return g.MaxPool(x, 3, 2); }, {2, 5, 6, 2},
                       seed) < 1e-4);
  }
}

TEST_CASE("layer norm gain and bias, conv kernel and input gradients") {
  ParameterSet params{{"x", Random({2, 6, 5, 2}, 30)},
                      {"k", Random({3, 3, 3, 2, 3}, 31, 0.3)},
                      {"gain", Random({3}, 32)},
                      {"bias", Random({3}, 33)}};
  Tensor probe = Random({2, 3, 3, 3}, 34);
  LossBuilder build = [&](Graph &g, const ParameterSet &p) {
    NodeId y = g.Conv(g.Parameter(p, "x"), g.Parameter(p, "k"), 2);
    y = g.LayerNorm(y, g.Parameter(p, "gain"), g.Parameter(p, "bias"));
    return g.Sum(g.Mul(y, g.Constant(probe)));
  };
  for (auto &[name, err] : GradCheckAll(build, params, 1e-6)) {
    INFO(name);
    CHECK(err < 1e-4);
  }
}

TEST_CASE("conv uses same padding with ceil division") {
  Graph g;
  NodeId x = g.Constant(Tensor({3, 112, 112, 1}, 1.0));
  NodeId k = g.Constant(Tensor({5, 7, 7, 1, 2}, 0.01));
  CHECK(g.value(g.Conv(x, k, 2)).shape() == Shape{3, 56, 56, 2});
  NodeId y = g.Constant(Tensor({1, 7, 7, 1}, 1.0));
  CHECK(g.value(g.MaxPool(y, 3, 2)).shape() == Shape{1, 4, 4, 1});
}

TEST_CASE("dropout is identity at inference and scales kept units in training") {
  Tensor x = Random({10, 10}, 40);
  {
    Graph g;
    NodeId a = g.Constant(x);
    CHECK(g.Dropout(a, 0.1) == a);
  }
  Graph g({.training = true, .seed = 9});
  NodeId y = g.Dropout(g.Constant(x), 0.5);
  int dropped = 0;
  for (size_t i = 0; i < x.size(); ++i) {
    double v = g.value(y)[i];
    if (v == 0.0) ++dropped;
    else CHECK(v == doctest::Approx(2.0 * x[i]));
  }
  CHECK(dropped > 20);
  CHECK(dropped < 80);
}

TEST_CASE("softmax rows sum to one for arbitrary finite inputs") {
  Rng rng = MakeRng(50);
  for (int trial = 0; trial < 200; ++trial) {
    Tensor x = RandomNormal({4, 9}, 30.0, rng);
    Graph g;
    const Tensor &y = g.value(g.Softmax(g.Constant(x)));
    for (int r = 0; r < 4; ++r) {
      double s = 0.0;
      for (int c = 0; c < 9; ++c) {
        CHECK(y.at(r, c) >= 0.0);
        s += y.at(r, c);
      }
      CHECK(std::fabs(s - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("non-finite values never escape an op") {
  Graph g;
  CHECK_THROWS_AS(g.Constant(Tensor::Vector({std::numeric_limits<double>::quiet_NaN()})),
                  NumericError);
  NodeId big = g.Constant(Tensor::Vector({1e200}));
  CHECK_THROWS_AS(g.Mul(big, big), NumericError);
}

TEST_CASE("forward evaluation is deterministic") {
  Tensor x = Random({4, 4}, 60);
  auto run = [&] {
    Graph g({.training = true, .seed = 3});
    return g.value(g.Softmax(g.Dropout(g.Constant(x), 0.3)));
  };
  CHECK(run() == run());
}

TEST_CASE("adam: zero gradient leaves parameters unchanged") {
  ParameterSet params{{"w", Random({3}, 70)}};
  ParameterSet before = params;
  AdamState state;
  AdamStep(state, params, {{"w", Tensor({3})}});
  CHECK(params == before);
  CHECK(state.step == 1);
}

TEST_CASE("adam: constant gradient steps approach lr * sign(g)") {
  ParameterSet params{{"w", Tensor::Vector({0.0, 0.0})}};
  AdamState state;
  state.learning_rate = 1e-3;
  GradientMap grads{{"w", Tensor::Vector({0.7, -2.0})}};
  double last_a = 0.0, last_b = 0.0;
  for (int i = 0; i < 200; ++i) {
    double a = params["w"][0], b = params["w"][1];
    AdamStep(state, params, grads);
    last_a = params["w"][0] - a;
    last_b = params["w"][1] - b;
  }
  CHECK(last_a == doctest::Approx(-1e-3).epsilon(1e-6));
  CHECK(last_b == doctest::Approx(1e-3).epsilon(1e-6));
}

TEST_CASE("adam: NaN gradient is a poisoned update") {
  ParameterSet params{{"w", Random({2}, 71)}};
  ParameterSet before = params;
  AdamState state;
  CHECK_THROWS_AS(
      AdamStep(state, params,
               {{"w", Tensor::Vector({1.0, std::numeric_limits<double>::quiet_NaN()})}}),
      NumericError);
  CHECK(params == before);
  CHECK(state.step == 0);
}

TEST_CASE("plateau schedule halves from 1e-4 down to the 1e-6 floor") {
  PlateauSchedule sched(1e-4, 0.5, 1e-6, 2);
  CHECK_FALSE(sched.Observe(1.0));
  CHECK_FALSE(sched.Observe(1.0));
  CHECK(sched.Observe(1.0));
  CHECK(sched.learning_rate() == doctest::Approx(5e-5));
  CHECK_FALSE(sched.Observe(0.5));  // improvement resets patience
  for (int i = 0; i < 40; ++i) sched.Observe(0.5);
  CHECK(sched.learning_rate() == 1e-6);
  CHECK(sched.at_floor());
}
