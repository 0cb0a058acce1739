// avsr/train/trainer.h

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


#ifndef AVSR_TRAIN_TRAINER_H_
#define AVSR_TRAIN_TRAINER_H_

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "avsr/corpus/curriculum.h"
#include "avsr/numerics/adam.h"
#include "avsr/train/recognizer.h"

namespace avsr {

struct TrainConfig {
  Architecture architecture = Architecture::kCtc;
  Modalities modalities = Modalities::Both();
  ModelConfig model;
  CurriculumSchedule curriculum = CurriculumSchedule::Doubling(8);

  int max_epochs = 40;
  // A curriculum stage ends when the epoch loss improves by less than
  // stage_min_improvement (relative) for stage_patience epochs, or after
  // stage_max_epochs.
  int stage_max_epochs = 4;
  int stage_patience = 1;
  double stage_min_improvement = 0.02;

  int batch_size = 8;
  double learning_rate = 1e-4;
  double lr_factor = 0.5;
  double lr_floor = 1e-6;
  int lr_patience = 3;

  // Babble injected into the training audio with this probability.
  double noise_prob = 0.25;
  double noise_snr_db = 0.0;
  // Video shifted against the audio by a uniform offset in
  // [-max_desync, max_desync] frames per example.
  int max_desync = 0;
  // Back-propagate into the visual front-end (image corpora).
  bool end_to_end = false;

  // Greedy validation on at most this many held-out utterances per epoch
  // (0 disables validation).
  int validation_limit = 50;
  uint64_t seed = 1;

  void Validate() const;
};

// Everything needed to continue training bit-identically.
struct TrainState {
  ParameterSet params;
  AdamState adam;
  double plateau_best = std::numeric_limits<double>::infinity();
  int plateau_since_best = 0;
  int epoch = 0;
  int stage = 0;
  int stage_epoch = 0;
  double stage_best_loss = std::numeric_limits<double>::infinity();
  int stage_since_best = 0;
  int64_t step = 0;
};

struct EpochMetrics {
  int epoch = 0;
  int stage = 0;
  int cap = 0;
  int examples = 0;
  double learning_rate = 0.0;
  double train_loss = 0.0;
  double validation_wer = -1.0;  // < 0 when not measured
  double seconds = 0.0;
};

class Trainer {
 public:
  // Front-end weights ("fe/") in `frontend` are needed for image corpora;
  // the babble pool is needed when noise_prob > 0.
  Trainer(TrainConfig config, FeaturePipeline pipeline, std::vector<Utterance> train,
          std::vector<Utterance> validation, const CorpusSpec &spec,
          std::vector<Waveform> babble = {}, const ParameterSet &frontend = {});

  void Initialize();
  void Resume(TrainState state);
  bool Done() const { return state_.epoch >= config_.max_epochs; }
  EpochMetrics RunEpoch();
  // Runs until Done; on_epoch sees each epoch's metrics and the state after it.
  void Run(const std::function<void(const EpochMetrics &, const TrainState &)> &on_epoch = {});

  const TrainState &state() const { return state_; }
  const TrainConfig &config() const { return config_; }
  Recognizer recognizer() const;

  // Mean loss of one example without dropout (for diagnostics and tests).
  double ExampleLoss(const Utterance &u, int pad_frames = 0) const;

 private:
  NodeId BuildLoss(Graph &graph, const ParameterSet &params, const Utterance &u, int pad_frames) const;
  Utterance PrepareExample(const Utterance &u, Rng &rng) const;

  TrainConfig config_;
  FeaturePipeline pipeline_;
  std::vector<Utterance> train_, validation_;
  CorpusSpec spec_;
  std::vector<Waveform> babble_;
  ParameterSet frontend_;
  TrainState state_;
};

// Convenience: trains to completion from scratch.
Recognizer TrainModel(const TrainConfig &config, const FeaturePipeline &pipeline,
                      const std::vector<Utterance> &train, const std::vector<Utterance> &validation,
                      const CorpusSpec &spec, const std::vector<Waveform> &babble = {},
                      std::vector<EpochMetrics> *log = nullptr);

}  // namespace avsr

#endif  // AVSR_TRAIN_TRAINER_H_
