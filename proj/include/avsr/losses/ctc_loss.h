// avsr/losses/ctc_loss.h

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

#ifndef AVSR_LOSSES_CTC_LOSS_H_
#define AVSR_LOSSES_CTC_LOSS_H_

#include <vector>

#include "avsr/numerics/graph.h"

namespace avsr {

// Label sequence plus its blank-interleaved expansion (# l1 # l2 ... # lL #).
class CtcTarget {
 public:
  CtcTarget(std::vector<int> labels, int blank);

  const std::vector<int> &labels() const { return labels_; }
  const std::vector<int> &expanded() const { return expanded_; }
  int blank() const { return blank_; }
  // Frames needed by the shortest valid alignment: L plus one separating
  // blank per adjacent repeat.
  int MinFrames() const;

 private:
  std::vector<int> labels_;
  std::vector<int> expanded_;
  int blank_;
};

struct CtcResult {
  double loss = 0.0;   // -log p(target | x)
  Tensor logit_grad;   // d loss / d logits, where log_posteriors = log_softmax(logits)
};

// Forward-backward in the log domain. log_posteriors is [T x K] and must be
// normalized per frame. Throws NumericError when no alignment exists.
CtcResult CtcLoss(const Tensor &log_posteriors, const CtcTarget &target);

double LogSumExp(double a, double b);

// Graph node for the CTC loss of logits [T x K]; gradients flow to the
// logits through the precomputed occupancy.
NodeId CtcLossNode(Graph &graph, NodeId logits, const CtcTarget &target);

}  // namespace avsr

#endif  // AVSR_LOSSES_CTC_LOSS_H_
