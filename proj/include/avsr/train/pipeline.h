// avsr/train/pipeline.h

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


#ifndef AVSR_TRAIN_PIPELINE_H_
#define AVSR_TRAIN_PIPELINE_H_

#include <optional>

#include "avsr/corpus/synth.h"
#include "avsr/features/audio.h"
#include "avsr/features/visual_frontend.h"
#include "avsr/model/av_models.h"

namespace avsr {

// Utterance -> model input. Audio: STFT magnitudes scaled so a unit tone
// peaks at 1, grouped by audio_group frames. Video: feature-mode clips pass
// through; image clips go through the front-end, whose weights are looked
// up under "fe/" in the parameter set given to Input.
struct FeaturePipeline {
  StftConfig stft;
  int audio_group = 4;
  int sample_rate = 16000;
  std::optional<FrontendConfig> frontend;

  static FeaturePipeline Default(int sample_rate = 16000);
  static FeaturePipeline ForCorpus(const CorpusSpec &spec,
                                   std::optional<FrontendConfig> frontend = std::nullopt);

  int audio_dim() const;
  // Width of the visual features for a clip of the given rank.
  int video_dim(const CorpusSpec &spec) const;

  Tensor Audio(const Waveform &wave) const;
  // Feature rows for a clip; image clips need a front-end and its weights.
  Tensor Video(const Tensor &clip, const ParameterSet &params) const;

  // Streams outside `modalities` are left empty; pad_frames > 0 zero-pads
  // both streams to that many rows and records the valid lengths.
  AvInput Input(const Utterance &u, Modalities modalities, const ParameterSet &params,
                int pad_frames = 0) const;
};

// Rows beyond the input are zero; rows must be >= t.dim(0).
Tensor PadRows(const Tensor &t, int rows);

// Copies every "fe/" entry of from into to.
void CopyFrontendParameters(const ParameterSet &from, ParameterSet *to);

}  // namespace avsr

#endif  // AVSR_TRAIN_PIPELINE_H_
