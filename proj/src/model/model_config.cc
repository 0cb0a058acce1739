// model/model_config.cc

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

#include "avsr/model/model_config.h"

#include "avsr/base/error.h"

namespace avsr {

const char *ArchitectureName(Architecture arch) {
  return arch == Architecture::kSeq2Seq ? "seq2seq" : "ctc";
}

Architecture ParseArchitecture(const std::string &name) {
  if (name == "seq2seq") return Architecture::kSeq2Seq;
  if (name == "ctc") return Architecture::kCtc;
  throw ConfigError("unknown architecture '" + name + "' (expected seq2seq or ctc)");
}

Modalities Modalities::Parse(const std::string &name) {
  if (name == "V") return Video();
  if (name == "A") return Audio();
  if (name == "AV") return Both();
  throw ConfigError("unknown modality set '" + name + "' (expected V, A or AV)");
}

std::string Modalities::Name() const {
  return std::string(audio ? "A" : "") + (video ? "V" : "");
}

void ModelConfig::Validate() const {
  auto require = [](bool ok, const std::string &what) {
    if (!ok) throw ConfigError("model config: " + what);
  };
  require(d_model > 0 && heads > 0, "d_model and heads must be positive");
  require(d_model % heads == 0, "d_model " + std::to_string(d_model) +
                                    " not divisible by heads " + std::to_string(heads));
  require(ff_size > 0, "ff_size must be positive");
  require(encoder_layers >= 0 && decoder_layers >= 0, "layer counts must be >= 0");
  require(dropout >= 0.0 && dropout < 1.0, "dropout must be in [0, 1)");
  require(label_smoothing >= 0.0 && label_smoothing < 1.0, "label_smoothing must be in [0, 1)");
  require(video_dim > 0 && audio_dim > 0, "input widths must be positive");
}

ModelConfig ModelConfig::FullScale() {
  ModelConfig c;
  c.d_model = 512;
  c.heads = 8;
  c.ff_size = 2048;
  c.encoder_layers = 6;
  c.decoder_layers = 6;
  return c;
}

}  // namespace avsr
