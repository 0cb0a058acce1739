// avsr/cli/run_config.h

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


#ifndef AVSR_CLI_RUN_CONFIG_H_
#define AVSR_CLI_RUN_CONFIG_H_

#include <string>
#include <vector>

#include "avsr/base/key_value.h"
#include "avsr/corpus/word_pretrain.h"
#include "avsr/decoding/beam.h"
#include "avsr/train/trainer.h"

namespace avsr {

struct DecodeSettings {
  bool greedy = false;
  int beam_width = 0;             // 0: architecture default
  double lm_weight = -1.0;        // < 0: default for the architecture and LM use
  double length_penalty = -1.0;   // < 0: default
  int tta = 0;
  uint64_t tta_seed = 0;
  double snr_db = kCleanSnr;      // test-time babble
  uint64_t noise_seed = 5;

  BeamConfig Beam(Architecture arch, bool with_lm) const;
};

struct LmSettings {
  int order = 5;
  double delta = 0.01;
};

struct SweepSettings {
  std::vector<double> snr = {kCleanSnr, 20, 10, 5, 0, -5};
  std::vector<int> desync = {-4, -3, -2, -1, 0, 1, 2, 3, 4};
  std::vector<int> beam_width = {1, 2, 5, 10, 20, 35, 50, 100};
  // Desync sweeps fine-tune this many epochs on shifted samples first.
  int finetune_epochs = 0;
};

// One plain-text key = value file for every command. Keys are grouped by
// prefix: corpus., model., frontend., pretrain., train., decode., lm., sweep.
struct RunConfig {
  CorpusSpec corpus;
  uint64_t corpus_seed = 7;
  int babble_pool = 20;
  uint64_t babble_seed = 99;

  FrontendConfig frontend = FrontendConfig::Toy();
  WordPretrainConfig pretrain;
  int pretrain_clips_per_word = 6;

  TrainConfig train;
  // Image corpora: epochs of end-to-end training through the front-end
  // after the frozen-feature stage.
  int end_to_end_epochs = 0;
  DecodeSettings decode;
  LmSettings lm;
  SweepSettings sweep;
  int workers = 1;

  RunConfig();
  // Fails on unknown keys or malformed values; Validate is run afterwards.
  static RunConfig Load(const std::string &path);
  void Apply(const KeyValues &kv, const std::string &source);
  void Set(const std::string &key, const std::string &value);
  KeyValues Dump() const;
  void Validate() const;

  // Pipeline for the configured corpus (front-end for image corpora).
  FeaturePipeline Pipeline() const;
  // train.model with feature widths filled in from the pipeline.
  ModelConfig ResolvedModel() const;
};

KeyValueBinder BindModelConfig(ModelConfig *c, const std::string &prefix);
KeyValueBinder BindFrontendConfig(FrontendConfig *c, const std::string &prefix);

std::string JoinList(const std::vector<double> &values);
std::string JoinList(const std::vector<int> &values);
std::vector<double> ParseDoubleList(const std::string &text, const std::string &what);
std::vector<int> ParseIntList(const std::string &text, const std::string &what);

}  // namespace avsr

#endif  // AVSR_CLI_RUN_CONFIG_H_
