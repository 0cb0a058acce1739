// train/trainer.cc

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


#include "avsr/train/trainer.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "avsr/base/error.h"

namespace avsr {

void TrainConfig::Validate() const {
  model.Validate();
  if (!modalities.any()) throw ConfigError("train: no modality selected");
  if (max_epochs < 0) throw ConfigError("train: max_epochs must be >= 0");
  if (stage_max_epochs < 1 || stage_patience < 1) throw ConfigError("train: stage limits must be >= 1");
  if (stage_min_improvement < 0.0) throw ConfigError("train: stage_min_improvement must be >= 0");
  if (batch_size < 1) throw ConfigError("train: batch_size must be >= 1");
  if (!(learning_rate > 0.0) || !(lr_floor > 0.0) || !(lr_factor > 0.0 && lr_factor < 1.0) ||
      lr_patience < 1)
    throw ConfigError("train: invalid learning rate schedule");
  if (noise_prob < 0.0 || noise_prob > 1.0) throw ConfigError("train: noise_prob must lie in [0, 1]");
  if (max_desync < 0) throw ConfigError("train: max_desync must be >= 0");
  if (validation_limit < 0) throw ConfigError("train: validation_limit must be >= 0");
}

Trainer::Trainer(TrainConfig config, FeaturePipeline pipeline, std::vector<Utterance> train,
                 std::vector<Utterance> validation, const CorpusSpec &spec, std::vector<Waveform> babble,
                 const ParameterSet &frontend)
    : config_(std::move(config)),
      pipeline_(std::move(pipeline)),
      train_(std::move(train)),
      validation_(std::move(validation)),
      spec_(spec),
      babble_(std::move(babble)) {
  config_.Validate();
  CopyFrontendParameters(frontend, &frontend_);
  if (train_.empty()) throw DataError("train: no training utterances");
  if (config_.modalities.audio && config_.model.audio_dim != pipeline_.audio_dim())
    throw DimensionError("train: model audio_dim " + std::to_string(config_.model.audio_dim) +
                         " but the pipeline produces " + std::to_string(pipeline_.audio_dim()));
  if (config_.modalities.video) {
    if (config_.model.video_dim != pipeline_.video_dim(spec_))
      throw DimensionError("train: model video_dim " + std::to_string(config_.model.video_dim) +
                           " but the pipeline produces " + std::to_string(pipeline_.video_dim(spec_)));
    if (spec_.visual == VisualMode::kImages && frontend_.empty())
      throw ConfigError("train: image corpus needs front-end weights");
  }
  if (config_.end_to_end && (spec_.visual != VisualMode::kImages || !config_.modalities.video))
    throw ConfigError("train: end-to-end training needs an image corpus and the video stream");
  if (config_.noise_prob > 0.0 && config_.modalities.audio && babble_.size() < 20)
    throw ConfigError("train: noise injection needs a babble pool of at least 20 waveforms");
}

void Trainer::Initialize() {
  TrainState s;
  s.params = InitModel(config_.architecture, config_.model, config_.modalities, config_.seed);
  if (config_.end_to_end) CopyFrontendParameters(frontend_, &s.params);
  s.adam.learning_rate = config_.learning_rate;
  state_ = std::move(s);
}

void Trainer::Resume(TrainState state) {
  if (ModelModalities(state.params).video != config_.modalities.video ||
      ModelModalities(state.params).audio != config_.modalities.audio)
    throw ConfigError("train: checkpoint modalities differ from the configuration");
  if (config_.end_to_end) {
    for (const auto &[name, t] : frontend_)
      if (!state.params.count(name)) state.params[name] = t;
  } else {
    // Frozen front-end weights travel with checkpoints but are not trained.
    for (auto it = state.params.begin(); it != state.params.end();) {
      if (it->first.rfind("fe/", 0) != 0) {
        ++it;
        continue;
      }
      frontend_.try_emplace(it->first, it->second);
      state.adam.first_moment.erase(it->first);
      state.adam.second_moment.erase(it->first);
      it = state.params.erase(it);
    }
  }
  state_ = std::move(state);
  if (state_.stage >= config_.curriculum.stages()) state_.stage = config_.curriculum.stages() - 1;
}

Utterance Trainer::PrepareExample(const Utterance &u, Rng &rng) const {
  Utterance x = u;
  std::uniform_real_distribution<double> coin(0.0, 1.0);
  if (config_.modalities.audio && config_.noise_prob > 0.0 && coin(rng) < config_.noise_prob)
    x.audio = MixBabble(x.audio, config_.noise_snr_db, babble_, rng);
  if (config_.modalities.video && config_.max_desync > 0 && x.frames() > 1) {
    int limit = std::min(config_.max_desync, x.frames() - 1);
    x = Desync(x, std::uniform_int_distribution<int>(-limit, limit)(rng));
  }
  return x;
}

NodeId Trainer::BuildLoss(Graph &g, const ParameterSet &params, const Utterance &u, int pad_frames) const {
  const bool e2e = config_.end_to_end && u.video.rank() == 4;
  Modalities m = config_.modalities;
  const ParameterSet &feature_params = frontend_.empty() ? params : frontend_;
  AvInput in = pipeline_.Input(u, {m.video && !e2e, m.audio}, feature_params, pad_frames);
  if (e2e) {
    NodeId clip = g.Constant(pad_frames > 0 ? PadRows(u.video, pad_frames) : u.video);
    in.video_node = VisualFrontend(g, params, *pipeline_.frontend, clip, "fe");
    if (pad_frames > 0) in.video_valid = u.video.dim(0);
  }
  ForwardContext ctx{g, params, config_.model};
  EncoderOutput enc = Encode(ctx, in);
  std::vector<int> ids = CharVocab::Encode(u.transcript);
  if (config_.architecture == Architecture::kSeq2Seq) return Seq2SeqLoss(ctx, enc, ids);
  NodeId logits = CtcLogits(ctx, enc);
  const int valid = pad_frames > 0 ? u.frames() : 0;
  return g.Scale(CtcLossOnFrames(g, logits, ids, valid), 1.0 / static_cast<double>(ids.size()));
}

double Trainer::ExampleLoss(const Utterance &u, int pad_frames) const {
  Graph g;
  return g.value(BuildLoss(g, state_.params, u, pad_frames))[0];
}

EpochMetrics Trainer::RunEpoch() {
  if (state_.params.empty()) throw ConfigError("train: call Initialize or Resume first");
  const auto start = std::chrono::steady_clock::now();
  TrainState &s = state_;
  EpochMetrics metrics;
  metrics.epoch = s.epoch;
  metrics.stage = s.stage;
  metrics.cap = config_.curriculum.cap(s.stage);
  metrics.learning_rate = s.adam.learning_rate;

  std::vector<Utterance> examples = StageExamples(train_, spec_, metrics.cap);
  const int pad = StagePadFrames(examples, spec_, metrics.cap);
  metrics.examples = static_cast<int>(examples.size());
  std::vector<size_t> order(examples.size());
  std::iota(order.begin(), order.end(), 0);
  Rng shuffle = MakeRng(config_.seed, 1000 + s.epoch);
  std::shuffle(order.begin(), order.end(), shuffle);

  const uint64_t epoch_seed = MixSeed(config_.seed, 2000 + s.epoch);
  double total = 0.0;
  for (size_t begin = 0; begin < order.size(); begin += config_.batch_size) {
    const size_t end = std::min(order.size(), begin + config_.batch_size);
    const double weight = 1.0 / static_cast<double>(end - begin);
    GradientMap batch;
    for (size_t k = begin; k < end; ++k) {
      Rng rng = MakeRng(epoch_seed, k);
      Utterance x = PrepareExample(examples[order[k]], rng);
      Graph g({true, MixSeed(epoch_seed, 1000000 + k)});
      NodeId loss = BuildLoss(g, s.params, x, pad);
      const double value = g.value(loss)[0];
      if (!std::isfinite(value)) throw NumericError("train: non-finite loss on " + x.id);
      total += value;
      for (auto &[name, grad] : g.Backward(loss)) {
        auto [it, fresh] = batch.try_emplace(name, grad.shape());
        for (size_t i = 0; i < grad.size(); ++i) it->second[i] += weight * grad[i];
      }
    }
    AdamStep(s.adam, s.params, batch);
    ++s.step;
  }
  metrics.train_loss = total / static_cast<double>(examples.size());

  if (config_.validation_limit > 0 && !validation_.empty()) {
    size_t n = std::min<size_t>(validation_.size(), config_.validation_limit);
    std::vector<Utterance> subset(validation_.begin(), validation_.begin() + n);
    RecognizeOptions greedy;
    greedy.greedy = true;
    metrics.validation_wer = CorpusWer(subset, RecognizeAll(recognizer(), subset, greedy));
  }

  const bool final_stage = s.stage + 1 >= config_.curriculum.stages();
  if (final_stage) {
    PlateauSchedule plateau(config_.learning_rate, config_.lr_factor, config_.lr_floor, config_.lr_patience);
    plateau.Restore(s.adam.learning_rate, s.plateau_best, s.plateau_since_best);
    plateau.Observe(metrics.validation_wer >= 0.0 ? metrics.validation_wer : metrics.train_loss);
    s.adam.learning_rate = plateau.learning_rate();
    s.plateau_best = plateau.best();
    s.plateau_since_best = plateau.since_best();
  } else {
    ++s.stage_epoch;
    if (metrics.train_loss < s.stage_best_loss * (1.0 - config_.stage_min_improvement)) {
      s.stage_best_loss = metrics.train_loss;
      s.stage_since_best = 0;
    } else {
      ++s.stage_since_best;
    }
    if (s.stage_since_best >= config_.stage_patience || s.stage_epoch >= config_.stage_max_epochs) {
      ++s.stage;
      s.stage_epoch = 0;
      s.stage_best_loss = std::numeric_limits<double>::infinity();
      s.stage_since_best = 0;
    }
  }
  ++s.epoch;
  metrics.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return metrics;
}

void Trainer::Run(const std::function<void(const EpochMetrics &, const TrainState &)> &on_epoch) {
  while (!Done()) {
    EpochMetrics m = RunEpoch();
    if (on_epoch) on_epoch(m, state_);
  }
}

Recognizer Trainer::recognizer() const {
  Recognizer r;
  r.architecture = config_.architecture;
  r.config = config_.model;
  r.params = state_.params;
  for (const auto &[name, t] : frontend_) r.params.try_emplace(name, t);
  r.pipeline = pipeline_;
  return r;
}

Recognizer TrainModel(const TrainConfig &config, const FeaturePipeline &pipeline,
                      const std::vector<Utterance> &train, const std::vector<Utterance> &validation,
                      const CorpusSpec &spec, const std::vector<Waveform> &babble,
                      std::vector<EpochMetrics> *log) {
  Trainer trainer(config, pipeline, train, validation, spec, babble);
  trainer.Initialize();
  trainer.Run([&](const EpochMetrics &m, const TrainState &) {
    if (log) log->push_back(m);
  });
  return trainer.recognizer();
}

}  // namespace avsr
