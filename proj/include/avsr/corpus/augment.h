// avsr/corpus/augment.h

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


#ifndef AVSR_CORPUS_AUGMENT_H_
#define AVSR_CORPUS_AUGMENT_H_

#include "avsr/base/random.h"
#include "avsr/numerics/tensor.h"

namespace avsr {

// Clip augmentation for front-end pretraining. Spatial transforms need a
// [T x H x W x C] clip; frame removal and temporal shift also accept
// [T x D] feature sequences.
struct AugmentConfig {
  double flip_prob = 0.5;
  double frame_drop_prob = 0.1;  // per frame
  int max_spatial_shift = 5;     // pixels, each axis
  int max_temporal_shift = 2;    // frames
  double shift_prob = 0.5;

  static AugmentConfig None() { return {0.0, 0.0, 0, 0, 0.0}; }
  void Validate() const;
};

Tensor HorizontalFlip(const Tensor &clip);
// Moves content by (dy, dx); uncovered pixels replicate the edge.
Tensor SpatialShift(const Tensor &clip, int dy, int dx);
// Positive shift delays content; uncovered frames replicate the edge.
Tensor TemporalShift(const Tensor &clip, int shift);
// Keeps frames with keep[t] true. At least one frame must survive.
Tensor DropFrames(const Tensor &clip, const std::vector<bool> &keep);

// Random composition of the above. Returns the input unchanged when every
// probability and range is zero. Frame removal always leaves one frame.
Tensor AugmentClip(const Tensor &clip, const AugmentConfig &config, Rng &rng);

}  // namespace avsr

#endif  // AVSR_CORPUS_AUGMENT_H_
