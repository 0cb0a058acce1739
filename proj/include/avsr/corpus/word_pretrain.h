// avsr/corpus/word_pretrain.h

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


#ifndef AVSR_CORPUS_WORD_PRETRAIN_H_
#define AVSR_CORPUS_WORD_PRETRAIN_H_

#include <string>
#include <vector>

#include "avsr/corpus/augment.h"
#include "avsr/corpus/synth.h"
#include "avsr/features/visual_frontend.h"

namespace avsr {

// Word-level classifier used to pretrain the visual front-end: front-end,
// two temporal convolutions with ReLU, mean over time, linear, softmax.
struct WordPretrainConfig {
  FrontendConfig frontend = FrontendConfig::Toy();
  int backend_channels = 32;
  int backend_kernel = 3;
  int epochs = 20;
  double learning_rate = 1e-3;
  AugmentConfig augment;
  uint64_t seed = 1;
  // Stop once an epoch classifies every training clip correctly.
  bool stop_at_perfect = true;

  void Validate() const;
};

struct WordPretrainResult {
  ParameterSet params;  // front-end under "fe/", classifier under "wc/"
  std::vector<std::string> classes;
  std::vector<double> epoch_loss;
  double train_accuracy = 0.0;
};

// clips: image-mode single-word utterances; the transcript is the label.
WordPretrainResult PretrainWordClassifier(const std::vector<Utterance> &clips,
                                          const WordPretrainConfig &config);

// Index into classes of the predicted word.
int ClassifyWord(const WordPretrainResult &model, const WordPretrainConfig &config, const Tensor &clip);

// Frozen front-end: image-mode utterances to [T x output_dim] features.
Utterance WithFrontendFeatures(const Utterance &u, const ParameterSet &params,
                               const FrontendConfig &config);

}  // namespace avsr

#endif  // AVSR_CORPUS_WORD_PRETRAIN_H_
