// avsr/train/recognizer.h

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


#ifndef AVSR_TRAIN_RECOGNIZER_H_
#define AVSR_TRAIN_RECOGNIZER_H_

#include <string>
#include <vector>

#include "avsr/decoding/beam.h"
#include "avsr/train/pipeline.h"

namespace avsr {

// A trained model with the feature pipeline it was trained on. Front-end
// weights, when present, live in params under "fe/".
struct Recognizer {
  Architecture architecture = Architecture::kCtc;
  ModelConfig config;
  ParameterSet params;
  FeaturePipeline pipeline;

  Modalities modalities() const { return ModelModalities(params); }
};

struct RecognizeOptions {
  bool greedy = false;
  BeamConfig beam;
  const LanguageModel *lm = nullptr;
  // Random visual transforms (horizontal flip with probability 1/2 and
  // spatial shifts up to max_shift) on top of the original pass. Seq2seq
  // averages decoder logits over the passes; CTC averages the visual
  // features and decodes once. Needs image clips.
  int tta_transforms = 0;
  int tta_max_shift = 5;
  uint64_t tta_seed = 0;
  int max_length = CorpusSpec::kMaxTranscript;
};

struct Hypothesis {
  std::string text;
  double score = 0.0;
};

// The transformed clips test-time augmentation runs on, original first.
std::vector<Tensor> TtaClips(const Tensor &clip, int transforms, int max_shift, uint64_t seed);

Hypothesis Recognize(const Recognizer &model, const Utterance &u, const RecognizeOptions &options);
std::vector<Hypothesis> RecognizeAll(const Recognizer &model, const std::vector<Utterance> &utterances,
                                     const RecognizeOptions &options, int workers = 1);

// Corpus WER in percent of hypotheses against the utterance transcripts.
double CorpusWer(const std::vector<Utterance> &utterances, const std::vector<Hypothesis> &hyps);

}  // namespace avsr

#endif  // AVSR_TRAIN_RECOGNIZER_H_
