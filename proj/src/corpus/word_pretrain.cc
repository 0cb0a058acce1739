// corpus/word_pretrain.cc

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


#include "avsr/corpus/word_pretrain.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "avsr/base/error.h"
#include "avsr/losses/cross_entropy.h"
#include "avsr/numerics/adam.h"

namespace avsr {

namespace {

NodeId ClassifierLogits(Graph &g, const ParameterSet &params, const WordPretrainConfig &config,
                        const Tensor &clip) {
  NodeId x = g.Constant(clip);
  NodeId feats = VisualFrontend(g, params, config.frontend, x, "fe");
  const int t = clip.dim(0), c = config.frontend.output_dim(), cb = config.backend_channels;
  NodeId h = g.Reshape(feats, {t, 1, 1, c});
  h = g.Relu(g.AddRow(g.Conv(h, g.Parameter(params, "wc/conv1/w"), 1), g.Parameter(params, "wc/conv1/b")));
  h = g.Relu(g.AddRow(g.Conv(h, g.Parameter(params, "wc/conv2/w"), 1), g.Parameter(params, "wc/conv2/b")));
  NodeId pooled = g.Reshape(g.Mean(g.Reshape(h, {t, cb}), 0), {1, cb});
  return g.AddRow(g.MatMul(pooled, g.Parameter(params, "wc/out/w")), g.Parameter(params, "wc/out/b"));
}

int Argmax(const Tensor &row) {
  auto d = row.data();
  return static_cast<int>(std::max_element(d.begin(), d.end()) - d.begin());
}

}  // namespace

void WordPretrainConfig::Validate() const {
  frontend.Validate();
  augment.Validate();
  if (backend_channels < 1 || backend_kernel < 1) throw ConfigError("word pretrain: bad back-end size");
  if (epochs < 1) throw ConfigError("word pretrain: epochs must be >= 1");
  if (!(learning_rate > 0.0)) throw ConfigError("word pretrain: learning rate must be positive");
}

WordPretrainResult PretrainWordClassifier(const std::vector<Utterance> &clips,
                                          const WordPretrainConfig &config) {
  config.Validate();
  WordPretrainResult out;
  for (const Utterance &u : clips) {
    if (u.video.rank() != 4) throw DataError("word pretrain: " + u.id + " is not an image clip");
    if (u.transcript.find(' ') != std::string::npos)
      throw DataError("word pretrain: " + u.id + " is not a single word");
    CheckFrontendGeometry(u.video.dim(1), u.video.dim(2));
    if (std::find(out.classes.begin(), out.classes.end(), u.transcript) == out.classes.end())
      out.classes.push_back(u.transcript);
  }
  std::sort(out.classes.begin(), out.classes.end());
  if (out.classes.size() < 2) throw DataError("word pretrain: need at least two distinct words");

  const int c = config.frontend.output_dim(), cb = config.backend_channels, k = config.backend_kernel;
  const int n = static_cast<int>(out.classes.size());
  out.params = InitFrontend(config.frontend, config.seed, "fe");
  Rng init = MakeRng(config.seed, 7);
  out.params["wc/conv1/w"] = GlorotUniform({k, 1, 1, c, cb}, init);
  out.params["wc/conv1/b"] = Tensor({cb});
  out.params["wc/conv2/w"] = GlorotUniform({k, 1, 1, cb, cb}, init);
  out.params["wc/conv2/b"] = Tensor({cb});
  out.params["wc/out/w"] = GlorotUniform({cb, n}, init);
  out.params["wc/out/b"] = Tensor({n});

  std::vector<int> labels;
  for (const Utterance &u : clips)
    labels.push_back(static_cast<int>(std::lower_bound(out.classes.begin(), out.classes.end(), u.transcript) -
                                      out.classes.begin()));

  AdamState adam;
  adam.learning_rate = config.learning_rate;
  Rng rng = MakeRng(config.seed, 8);
  std::vector<size_t> order(clips.size());
  std::iota(order.begin(), order.end(), 0);
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (size_t i : order) {
      Tensor clip = AugmentClip(clips[i].video, config.augment, rng);
      Graph g;
      NodeId logits = ClassifierLogits(g, out.params, config, clip);
      NodeId loss = SmoothedCrossEntropyNode(g, logits, {labels[i]}, 0.0);
      total += g.value(loss)[0];
      AdamStep(adam, out.params, g.Backward(loss));
    }
    out.epoch_loss.push_back(total / clips.size());
    if (!std::isfinite(out.epoch_loss.back())) throw NumericError("word pretrain: loss diverged");
    int clean = 0;
    for (size_t i = 0; i < clips.size(); ++i)
      if (ClassifyWord(out, config, clips[i].video) == labels[i]) ++clean;
    out.train_accuracy = static_cast<double>(clean) / clips.size();
    if (config.stop_at_perfect && clean == static_cast<int>(clips.size())) break;
  }
  return out;
}

int ClassifyWord(const WordPretrainResult &model, const WordPretrainConfig &config, const Tensor &clip) {
  Graph g;
  return Argmax(g.value(ClassifierLogits(g, model.params, config, clip)));
}

Utterance WithFrontendFeatures(const Utterance &u, const ParameterSet &params,
                               const FrontendConfig &config) {
  if (u.video.rank() != 4) throw DataError("front-end features: " + u.id + " is not an image clip");
  Utterance out = u;
  out.video = ExtractVisualFeatures(params, config, u.video, "fe");
  return out;
}

}  // namespace avsr
