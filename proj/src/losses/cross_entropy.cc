// losses/cross_entropy.cc

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

#include "avsr/losses/cross_entropy.h"

#include <cmath>

#include "avsr/base/error.h"

namespace avsr {

CrossEntropyResult SmoothedCrossEntropy(const Tensor &log_probs, const std::vector<int> &targets,
                                        double smoothing, int pad_id) {
  if (!(smoothing >= 0.0 && smoothing < 1.0))
    throw ConfigError("cross entropy: smoothing must be in [0, 1)");
  const int N = log_probs.rows(), V = log_probs.cols();
  if (static_cast<int>(targets.size()) != N)
    throw DimensionError("cross entropy: " + std::to_string(targets.size()) + " targets for " +
                         std::to_string(N) + " rows");
  const bool has_pad = pad_id >= 0 && pad_id < V;
  const int spread = has_pad ? V - 1 : V;
  CrossEntropyResult r;
  r.logit_grad = Tensor(log_probs.shape());
  int counted = 0;
  for (int n = 0; n < N; ++n) {
    if (targets[n] == pad_id) continue;
    if (targets[n] < 0 || targets[n] >= V)
      throw DataError("cross entropy: target " + std::to_string(targets[n]) + " out of range");
    ++counted;
  }
  if (counted == 0) return r;
  for (int n = 0; n < N; ++n) {
    if (targets[n] == pad_id) continue;
    double mean_nll = 0.0;
    for (int v = 0; v < V; ++v)
      if (!(has_pad && v == pad_id)) mean_nll -= log_probs.at(n, v);
    mean_nll /= spread;
    r.loss += (1.0 - smoothing) * -log_probs.at(n, targets[n]) + smoothing * mean_nll;
    for (int v = 0; v < V; ++v) {
      double q = (has_pad && v == pad_id) ? 0.0 : smoothing / spread;
      if (v == targets[n]) q += 1.0 - smoothing;
      r.logit_grad.at(n, v) = (std::exp(log_probs.at(n, v)) - q) / counted;
    }
  }
  r.loss /= counted;
  return r;
}

NodeId SmoothedCrossEntropyNode(Graph &graph, NodeId logits, const std::vector<int> &targets,
                                double smoothing, int pad_id) {
  NodeId lp = graph.LogSoftmax(logits);
  CrossEntropyResult r = SmoothedCrossEntropy(graph.value(lp), targets, smoothing, pad_id);
  return graph.AttachLoss(logits, r.loss, std::move(r.logit_grad));
}

}  // namespace avsr
