// avsr/losses/cross_entropy.h

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

#ifndef AVSR_LOSSES_CROSS_ENTROPY_H_
#define AVSR_LOSSES_CROSS_ENTROPY_H_

#include <vector>

#include "avsr/numerics/graph.h"

namespace avsr {

struct CrossEntropyResult {
  double loss = 0.0;
  Tensor logit_grad;
};

// Label-smoothed cross-entropy averaged over non-pad positions:
//   (1 - s) * NLL(target) + s * mean over non-pad symbols of NLL(v).
// Rows whose target is pad_id are skipped; the pad column never receives
// smoothing mass. pad_id < 0 disables padding.
CrossEntropyResult SmoothedCrossEntropy(const Tensor &log_probs, const std::vector<int> &targets,
                                        double smoothing, int pad_id = -1);

NodeId SmoothedCrossEntropyNode(Graph &graph, NodeId logits, const std::vector<int> &targets,
                                double smoothing, int pad_id = -1);

}  // namespace avsr

#endif  // AVSR_LOSSES_CROSS_ENTROPY_H_
