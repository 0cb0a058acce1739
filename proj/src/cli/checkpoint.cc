// cli/checkpoint.cc

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


#include "avsr/cli/checkpoint.h"

#include <cstring>
#include <fstream>
#include <sstream>

#include "avsr/base/binary_io.h"
#include "avsr/base/error.h"
#include "avsr/cli/run_config.h"
#include "avsr/numerics/tensor_io.h"

namespace avsr {

namespace {

constexpr char kMagic[8] = {'A', 'V', 'S', 'R', 'C', 'K', 'P', 'T'};

KeyValueBinder EchoBinder(Checkpoint *c, bool with_frontend) {
  KeyValueBinder b;
  b.Bind(
      "architecture", [c](const std::string &s) { c->architecture = ParseArchitecture(s); },
      [c] { return std::string(ArchitectureName(c->architecture)); });
  b.Include(BindModelConfig(&c->model, "model."));
  FeaturePipeline *p = &c->pipeline;
  b.Bind("pipeline.window_ms", &p->stft.window_ms);
  b.Bind("pipeline.hop_ms", &p->stft.hop_ms);
  b.Bind(
      "pipeline.window",
      [p](const std::string &s) {
        if (s == "hann") p->stft.window = WindowKind::kHann;
        else if (s == "rectangular") p->stft.window = WindowKind::kRectangular;
        else throw ConfigError("unknown window " + s);
      },
      [p] { return std::string(p->stft.window == WindowKind::kHann ? "hann" : "rectangular"); });
  b.Bind("pipeline.scale", &p->stft.scale);
  b.Bind("pipeline.audio_group", &p->audio_group);
  b.Bind("pipeline.sample_rate", &p->sample_rate);
  if (with_frontend) {
    if (!p->frontend) p->frontend = FrontendConfig{};
    b.Include(BindFrontendConfig(&*p->frontend, "frontend."));
  }
  return b;
}

}  // namespace

Recognizer Checkpoint::ToRecognizer() const {
  Recognizer r;
  r.architecture = architecture;
  r.config = model;
  r.params = state.params;
  r.pipeline = pipeline;
  return r;
}

Checkpoint Checkpoint::From(const Trainer &trainer) {
  Checkpoint c;
  Recognizer r = trainer.recognizer();
  c.architecture = r.architecture;
  c.model = r.config;
  c.pipeline = r.pipeline;
  c.state = trainer.state();
  c.state.params = std::move(r.params);
  return c;
}

void WriteCheckpoint(std::ostream &os, const Checkpoint &ckpt) {
  os.write(kMagic, sizeof(kMagic));
  binary::WriteLe<uint32_t>(os, Checkpoint::kVersion);
  std::ostringstream echo;
  WriteKeyValues(echo, EchoBinder(const_cast<Checkpoint *>(&ckpt), ckpt.pipeline.frontend.has_value()).Dump());
  binary::WriteString(os, echo.str());
  const TrainState &s = ckpt.state;
  WriteTensorMap(os, s.params);
  binary::WriteLe<int64_t>(os, s.adam.step);
  binary::WriteLe<double>(os, s.adam.learning_rate);
  binary::WriteLe<double>(os, s.adam.config.beta1);
  binary::WriteLe<double>(os, s.adam.config.beta2);
  binary::WriteLe<double>(os, s.adam.config.epsilon);
  WriteTensorMap(os, s.adam.first_moment);
  WriteTensorMap(os, s.adam.second_moment);
  for (int v : {s.epoch, s.stage, s.stage_epoch, s.stage_since_best, s.plateau_since_best})
    binary::WriteLe<int32_t>(os, v);
  binary::WriteLe<double>(os, s.stage_best_loss);
  binary::WriteLe<double>(os, s.plateau_best);
  binary::WriteLe<int64_t>(os, s.step);
  if (!os) throw DataError("checkpoint: write failed");
}

Checkpoint ReadCheckpoint(std::istream &is) {
  char magic[8];
  if (!is.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(magic)) != 0)
    throw DataError("checkpoint: bad magic");
  uint32_t version = binary::ReadLe<uint32_t>(is, "checkpoint version");
  if (version != Checkpoint::kVersion)
    throw DataError("checkpoint: version " + std::to_string(version) + ", this build reads " +
                    std::to_string(Checkpoint::kVersion));
  Checkpoint c;
  std::istringstream echo(binary::ReadString(is, "checkpoint config"));
  KeyValues kv = ParseKeyValues(echo, "checkpoint config");
  bool with_frontend = false;
  for (const auto &[k, v] : kv) with_frontend |= k.rfind("frontend.", 0) == 0;
  try {
    EchoBinder(&c, with_frontend).Apply(kv, "checkpoint config");
  } catch (const ConfigError &e) {
    throw DataError(std::string("checkpoint: ") + e.what());
  }
  TrainState &s = c.state;
  s.params = ReadTensorMap(is);
  s.adam.step = binary::ReadLe<int64_t>(is, "adam step");
  s.adam.learning_rate = binary::ReadLe<double>(is, "learning rate");
  s.adam.config.beta1 = binary::ReadLe<double>(is, "beta1");
  s.adam.config.beta2 = binary::ReadLe<double>(is, "beta2");
  s.adam.config.epsilon = binary::ReadLe<double>(is, "epsilon");
  s.adam.first_moment = ReadTensorMap(is);
  s.adam.second_moment = ReadTensorMap(is);
  s.epoch = binary::ReadLe<int32_t>(is, "epoch");
  s.stage = binary::ReadLe<int32_t>(is, "stage");
  s.stage_epoch = binary::ReadLe<int32_t>(is, "stage epoch");
  s.stage_since_best = binary::ReadLe<int32_t>(is, "stage patience");
  s.plateau_since_best = binary::ReadLe<int32_t>(is, "plateau patience");
  s.stage_best_loss = binary::ReadLe<double>(is, "stage best loss");
  s.plateau_best = binary::ReadLe<double>(is, "plateau best");
  s.step = binary::ReadLe<int64_t>(is, "step");
  if (s.params.empty()) throw DataError("checkpoint: no parameters");
  return c;
}

void SaveCheckpoint(const std::string &path, const Checkpoint &ckpt) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw DataError("cannot write " + path);
  WriteCheckpoint(os, ckpt);
}

Checkpoint LoadCheckpoint(const std::string &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open checkpoint " + path);
  return ReadCheckpoint(is);
}

}  // namespace avsr
