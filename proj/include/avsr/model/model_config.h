// avsr/model/model_config.h

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

#ifndef AVSR_MODEL_MODEL_CONFIG_H_
#define AVSR_MODEL_MODEL_CONFIG_H_

#include <string>

namespace avsr {

enum class Architecture { kSeq2Seq, kCtc };

const char *ArchitectureName(Architecture arch);
Architecture ParseArchitecture(const std::string &name);

// Which input streams a model is built for or fed with.
struct Modalities {
  bool video = true;
  bool audio = true;

  static Modalities Video() { return {true, false}; }
  static Modalities Audio() { return {false, true}; }
  static Modalities Both() { return {true, true}; }
  // "V", "A" or "AV".
  static Modalities Parse(const std::string &name);
  std::string Name() const;
  bool any() const { return video || audio; }
  bool operator==(const Modalities &) const = default;
};

struct ModelConfig {
  int d_model = 64;
  int heads = 4;
  int ff_size = 256;        // F1; F2 is d_model
  int encoder_layers = 3;   // per modality
  int decoder_layers = 3;   // seq2seq decoder, or the joint CTC stack
  double dropout = 0.1;
  double label_smoothing = 0.1;
  int video_dim = 512;      // visual feature width
  int audio_dim = 1284;     // grouped spectrogram width

  int head_size() const { return d_model / heads; }
  // Throws ConfigError.
  void Validate() const;

  // 512 / 8 / 2048 with six layers per stack.
  static ModelConfig FullScale();
  static ModelConfig Desk() { return {}; }
  // 32 / 4 / 64, two layers per stack, 16-wide visual features.
  static ModelConfig Toy() { return {32, 4, 64, 2, 2, 0.1, 0.1, 16, 1284}; }
};

}  // namespace avsr

#endif  // AVSR_MODEL_MODEL_CONFIG_H_
