// avsr/cli/checkpoint.h

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


#ifndef AVSR_CLI_CHECKPOINT_H_
#define AVSR_CLI_CHECKPOINT_H_

#include <iosfwd>
#include <string>

#include "avsr/train/trainer.h"

namespace avsr {

// Layout (little-endian):
//   "AVSRCKPT"  uint32 version
//   string      configuration echo, key = value lines
//   tensor map  parameters
//   int64 step, float64 lr, beta1, beta2, epsilon
//   tensor map  first moments, tensor map second moments
//   int32 epoch, stage, stage_epoch, stage_since_best, plateau_since_best
//   float64 stage_best_loss, plateau_best
//   int64 optimizer steps taken by the trainer
// Strings are uint32 length + bytes; tensor maps as in tensor_io.h.
struct Checkpoint {
  static constexpr uint32_t kVersion = 1;

  Architecture architecture = Architecture::kCtc;
  ModelConfig model;
  FeaturePipeline pipeline;
  TrainState state;

  Modalities modalities() const { return ModelModalities(state.params); }
  Recognizer ToRecognizer() const;
  // Front-end weights the trainer used are stored with the model's.
  static Checkpoint From(const Trainer &trainer);
};

void WriteCheckpoint(std::ostream &os, const Checkpoint &ckpt);
// Throws DataError on bad magic, truncation or a version mismatch.
Checkpoint ReadCheckpoint(std::istream &is);
void SaveCheckpoint(const std::string &path, const Checkpoint &ckpt);
Checkpoint LoadCheckpoint(const std::string &path);

}  // namespace avsr

#endif  // AVSR_CLI_CHECKPOINT_H_
