// cli/run_config.cc

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


#include "avsr/cli/run_config.h"

#include <cmath>
#include <sstream>

#include "avsr/base/error.h"
#include "avsr/corpus/manifest.h"

namespace avsr {

namespace {

template <typename T>
std::vector<T> ParseList(const std::string &text, const std::string &what,
                         T (*parse)(const std::string &, const std::string &)) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t b = item.find_first_not_of(' '), e = item.find_last_not_of(' ');
    if (b == std::string::npos) throw ConfigError(what + ": empty list item");
    out.push_back(parse(item.substr(b, e - b + 1), what));
  }
  if (out.empty()) throw ConfigError(what + ": empty list");
  return out;
}

KeyValueBinder Binder(RunConfig *c) {
  KeyValueBinder b;
  b.Include(BindCorpusSpec(&c->corpus), "corpus.");
  b.Bind("corpus.seed", &c->corpus_seed);
  b.Bind("corpus.babble_pool", &c->babble_pool);
  b.Bind("corpus.babble_seed", &c->babble_seed);

  b.Include(BindModelConfig(&c->train.model, "model."));
  b.Include(BindFrontendConfig(&c->frontend, "frontend."));

  b.Bind("pretrain.epochs", &c->pretrain.epochs);
  b.Bind("pretrain.learning_rate", &c->pretrain.learning_rate);
  b.Bind("pretrain.backend_channels", &c->pretrain.backend_channels);
  b.Bind("pretrain.backend_kernel", &c->pretrain.backend_kernel);
  b.Bind("pretrain.seed", &c->pretrain.seed);
  b.Bind("pretrain.clips_per_word", &c->pretrain_clips_per_word);
  b.Bind("pretrain.flip_prob", &c->pretrain.augment.flip_prob);
  b.Bind("pretrain.frame_drop_prob", &c->pretrain.augment.frame_drop_prob);
  b.Bind("pretrain.shift_prob", &c->pretrain.augment.shift_prob);
  b.Bind("pretrain.max_spatial_shift", &c->pretrain.augment.max_spatial_shift);
  b.Bind("pretrain.max_temporal_shift", &c->pretrain.augment.max_temporal_shift);

  TrainConfig *t = &c->train;
  b.Bind(
      "train.architecture", [t](const std::string &s) { t->architecture = ParseArchitecture(s); },
      [t] { return std::string(ArchitectureName(t->architecture)); });
  b.Bind(
      "train.modalities", [t](const std::string &s) { t->modalities = Modalities::Parse(s); },
      [t] { return t->modalities.Name(); });
  b.Bind(
      "train.curriculum", [t](const std::string &s) { t->curriculum = CurriculumSchedule::Parse(s); },
      [t] { return t->curriculum.ToString(); });
  b.Bind("train.max_epochs", &t->max_epochs);
  b.Bind("train.stage_max_epochs", &t->stage_max_epochs);
  b.Bind("train.stage_patience", &t->stage_patience);
  b.Bind("train.stage_min_improvement", &t->stage_min_improvement);
  b.Bind("train.batch_size", &t->batch_size);
  b.Bind("train.learning_rate", &t->learning_rate);
  b.Bind("train.lr_factor", &t->lr_factor);
  b.Bind("train.lr_floor", &t->lr_floor);
  b.Bind("train.lr_patience", &t->lr_patience);
  b.Bind("train.noise_prob", &t->noise_prob);
  b.Bind("train.noise_snr_db", &t->noise_snr_db);
  b.Bind("train.max_desync", &t->max_desync);
  b.Bind("train.end_to_end_epochs", &c->end_to_end_epochs);
  b.Bind("train.validation_limit", &t->validation_limit);
  b.Bind("train.seed", &t->seed);

  DecodeSettings *d = &c->decode;
  b.Bind("decode.greedy", &d->greedy);
  b.Bind("decode.beam_width", &d->beam_width);
  b.Bind("decode.lm_weight", &d->lm_weight);
  b.Bind("decode.length_penalty", &d->length_penalty);
  b.Bind("decode.tta", &d->tta);
  b.Bind("decode.tta_seed", &d->tta_seed);
  b.Bind("decode.snr_db", &d->snr_db);
  b.Bind("decode.noise_seed", &d->noise_seed);

  b.Bind("lm.order", &c->lm.order);
  b.Bind("lm.delta", &c->lm.delta);

  SweepSettings *w = &c->sweep;
  b.Bind(
      "sweep.snr", [w](const std::string &s) { w->snr = ParseDoubleList(s, "sweep.snr"); },
      [w] { return JoinList(w->snr); });
  b.Bind(
      "sweep.desync", [w](const std::string &s) { w->desync = ParseIntList(s, "sweep.desync"); },
      [w] { return JoinList(w->desync); });
  b.Bind(
      "sweep.beam_width", [w](const std::string &s) { w->beam_width = ParseIntList(s, "sweep.beam_width"); },
      [w] { return JoinList(w->beam_width); });
  b.Bind("sweep.finetune_epochs", &w->finetune_epochs);
  b.Bind("workers", &c->workers);
  return b;
}

}  // namespace

BeamConfig DecodeSettings::Beam(Architecture arch, bool with_lm) const {
  BeamConfig beam = BeamConfig::Defaults(
      arch == Architecture::kCtc ? DecodeMode::kCtc : DecodeMode::kSeq2Seq, with_lm);
  if (beam_width > 0) beam.width = beam_width;
  if (lm_weight >= 0.0) beam.lm_weight = with_lm ? lm_weight : 0.0;
  if (length_penalty >= 0.0) beam.length_penalty = length_penalty;
  beam.Validate();
  return beam;
}

KeyValueBinder BindModelConfig(ModelConfig *c, const std::string &prefix) {
  KeyValueBinder b;
  b.Bind(prefix + "d_model", &c->d_model);
  b.Bind(prefix + "heads", &c->heads);
  b.Bind(prefix + "ff_size", &c->ff_size);
  b.Bind(prefix + "encoder_layers", &c->encoder_layers);
  b.Bind(prefix + "decoder_layers", &c->decoder_layers);
  b.Bind(prefix + "dropout", &c->dropout);
  b.Bind(prefix + "label_smoothing", &c->label_smoothing);
  b.Bind(prefix + "video_dim", &c->video_dim);
  b.Bind(prefix + "audio_dim", &c->audio_dim);
  return b;
}

KeyValueBinder BindFrontendConfig(FrontendConfig *c, const std::string &prefix) {
  KeyValueBinder b;
  b.Bind(
      prefix + "channels", [c](const std::string &s) { c->channels = ParseIntList(s, "frontend.channels"); },
      [c] { return JoinList(c->channels); });
  b.Bind(prefix + "temporal_width", &c->temporal_width);
  b.Bind(prefix + "stem_kernel", &c->stem_kernel);
  b.Bind(prefix + "input_channels", &c->input_channels);
  b.Bind(prefix + "blocks_per_stage", &c->blocks_per_stage);
  b.Bind(prefix + "pool_window", &c->pool_window);
  return b;
}

RunConfig::RunConfig() {
  train.model = ModelConfig::Toy();
  train.architecture = Architecture::kCtc;
  train.max_epochs = 30;
  train.batch_size = 8;
  train.learning_rate = 1e-3;
  pretrain.frontend = frontend;
}

RunConfig RunConfig::Load(const std::string &path) {
  RunConfig c;
  c.Apply(ReadKeyValueFile(path), path);
  c.Validate();
  return c;
}

void RunConfig::Apply(const KeyValues &kv, const std::string &source) {
  Binder(this).Apply(kv, source);
  pretrain.frontend = frontend;
}

void RunConfig::Set(const std::string &key, const std::string &value) {
  Binder(this).Set(key, value);
  pretrain.frontend = frontend;
}

KeyValues RunConfig::Dump() const { return Binder(const_cast<RunConfig *>(this)).Dump(); }

void RunConfig::Validate() const {
  corpus.Validate();
  frontend.Validate();
  pretrain.Validate();
  train.Validate();
  ResolvedModel().Validate();
  if (babble_pool < 20) throw ConfigError("corpus.babble_pool must be >= 20");
  if (pretrain_clips_per_word < 1) throw ConfigError("pretrain.clips_per_word must be >= 1");
  if (end_to_end_epochs < 0) throw ConfigError("train.end_to_end_epochs must be >= 0");
  if (decode.tta < 0) throw ConfigError("decode.tta must be >= 0");
  if (decode.beam_width < 0) throw ConfigError("decode.beam_width must be >= 0");
  if (lm.order < 1 || !(lm.delta > 0.0)) throw ConfigError("lm: order >= 1 and delta > 0 required");
  if (sweep.finetune_epochs < 0) throw ConfigError("sweep.finetune_epochs must be >= 0");
  for (int w : sweep.beam_width)
    if (w < 1) throw ConfigError("sweep.beam_width entries must be >= 1");
  if (workers < 1) throw ConfigError("workers must be >= 1");
  if (corpus.visual == VisualMode::kImages) CheckFrontendGeometry(corpus.image_size, corpus.image_size);
}

FeaturePipeline RunConfig::Pipeline() const {
  return FeaturePipeline::ForCorpus(
      corpus, corpus.visual == VisualMode::kImages ? std::optional<FrontendConfig>(frontend) : std::nullopt);
}

ModelConfig RunConfig::ResolvedModel() const {
  ModelConfig m = train.model;
  FeaturePipeline p = Pipeline();
  m.audio_dim = p.audio_dim();
  m.video_dim = p.video_dim(corpus);
  return m;
}

std::string JoinList(const std::vector<double> &values) {
  std::string s;
  for (double v : values) s += (s.empty() ? "" : ",") + FormatDouble(v);
  return s;
}

std::string JoinList(const std::vector<int> &values) {
  std::string s;
  for (int v : values) s += (s.empty() ? "" : ",") + std::to_string(v);
  return s;
}

std::vector<double> ParseDoubleList(const std::string &text, const std::string &what) {
  return ParseList<double>(text, what, &ParseDouble);
}

std::vector<int> ParseIntList(const std::string &text, const std::string &what) {
  return ParseList<int>(text, what, &ParseInt);
}

}  // namespace avsr
