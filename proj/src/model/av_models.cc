// model/av_models.cc

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

#include "avsr/model/av_models.h"

#include <cmath>

#include "avsr/base/error.h"
#include "avsr/losses/cross_entropy.h"
#include "avsr/losses/ctc_loss.h"

namespace avsr {

namespace {

constexpr int kCtcClasses = CharVocab::kSize + 1;

std::string Layer(const std::string &stack, int i) { return stack + "/L" + std::to_string(i); }

const char *StreamName(bool video) { return video ? "video" : "audio"; }

void CheckPresent(const ParameterSet &params, Modalities wanted) {
  Modalities have = ModelModalities(params);
  if (!wanted.any()) throw ConfigError("model input: both modalities absent");
  if ((wanted.video && !have.video) || (wanted.audio && !have.audio))
    throw ConfigError("model input has " + wanted.Name() + " but the model was built for " +
                      have.Name());
}

Tensor LogSoftmaxRows(const Tensor &logits, int rows) {
  const int K = logits.cols();
  Tensor out({rows, K});
  for (int r = 0; r < rows; ++r) {
    double mx = logits.at(r, 0);
    for (int k = 1; k < K; ++k) mx = std::max(mx, logits.at(r, k));
    double z = 0.0;
    for (int k = 0; k < K; ++k) z += std::exp(logits.at(r, k) - mx);
    double lse = mx + std::log(z);
    for (int k = 0; k < K; ++k) out.at(r, k) = logits.at(r, k) - lse;
  }
  return out;
}

}  // namespace

EncoderValues EncoderValues::From(const Graph &graph, const EncoderOutput &enc) {
  EncoderValues v;
  if (enc.video) v.video = graph.value(*enc.video);
  if (enc.audio) v.audio = graph.value(*enc.audio);
  v.video_mask = enc.video_mask;
  v.audio_mask = enc.audio_mask;
  return v;
}

EncoderOutput EncoderValues::Import(Graph &graph) const {
  EncoderOutput enc;
  if (!video.empty()) enc.video = graph.Constant(video);
  if (!audio.empty()) enc.audio = graph.Constant(audio);
  enc.video_mask = video_mask;
  enc.audio_mask = audio_mask;
  return enc;
}

ParameterSet InitModel(Architecture arch, const ModelConfig &config, Modalities modalities,
                       uint64_t seed) {
  config.Validate();
  if (!modalities.any()) throw ConfigError("model needs at least one modality");
  const int d = config.d_model;
  ParameterSet p;
  for (bool video : {true, false}) {
    if (video ? !modalities.video : !modalities.audio) continue;
    std::string enc = std::string("enc_") + StreamName(video);
    p[enc + "/proj/w"] = Tensor({video ? config.video_dim : config.audio_dim, d});
    p[enc + "/proj/b"] = Tensor({d});
    for (int i = 0; i < config.encoder_layers; ++i)
      AddEncoderLayerParameters(&p, Layer(enc, i), config);
  }
  if (arch == Architecture::kSeq2Seq) {
    p["dec/embed"] = Tensor({CharVocab::kSize + 1, d});
    for (int i = 0; i < config.decoder_layers; ++i) {
      std::string l = Layer("dec", i);
      AddAttentionParameters(&p, l + "/self", config);
      AddLayerNormParameters(&p, l + "/ln_self", d);
      for (bool video : {true, false}) {
        if (video ? !modalities.video : !modalities.audio) continue;
        std::string s = StreamName(video);
        AddAttentionParameters(&p, l + "/att_" + s, config);
        AddLayerNormParameters(&p, l + "/ln_" + s, d);
        p[l + "/ff/w1_" + s] = Tensor({d, config.ff_size});
      }
      p[l + "/ff/b1"] = Tensor({config.ff_size});
      p[l + "/ff/w2"] = Tensor({config.ff_size, d});
      p[l + "/ff/b2"] = Tensor({d});
      AddLayerNormParameters(&p, l + "/ln_out", d);
    }
    p["dec/out/w"] = Tensor({d, CharVocab::kSize});
    p["dec/out/b"] = Tensor({CharVocab::kSize});
  } else {
    for (bool video : {true, false})
      if (video ? modalities.video : modalities.audio)
        p[std::string("ctc/join/w_") + StreamName(video)] = Tensor({d, d});
    p["ctc/join/b"] = Tensor({d});
    for (int i = 0; i < config.decoder_layers; ++i)
      AddEncoderLayerParameters(&p, Layer("ctc", i), config);
    p["ctc/out/w"] = Tensor({d, kCtcClasses});
    p["ctc/out/b"] = Tensor({kCtcClasses});
  }
  InitializeParameters(&p, seed);
  return p;
}

Modalities ModelModalities(const ParameterSet &params) {
  return {params.count("enc_video/proj/w") > 0, params.count("enc_audio/proj/w") > 0};
}

EncoderOutput Encode(const ForwardContext &ctx, const AvInput &input) {
  CheckPresent(ctx.params, input.present());
  Graph &g = ctx.graph;
  const ModelConfig &cfg = ctx.config;
  EncoderOutput out;
  for (bool video : {true, false}) {
    const bool on_graph = video && input.video_node.has_value();
    const Tensor &x = on_graph ? g.value(*input.video_node) : video ? input.video : input.audio;
    if (x.empty()) continue;
    const int width = video ? cfg.video_dim : cfg.audio_dim;
    if (x.rank() != 2 || x.dim(1) != width)
      throw DimensionError(std::string("encode: ") + StreamName(video) + " features " +
                           ShapeString(x.shape()) + ", expected [T x " + std::to_string(width) + "]");
    const int T = x.dim(0);
    std::string enc = std::string("enc_") + StreamName(video);
    NodeId in = on_graph ? *input.video_node : g.Constant(x);
    NodeId h = g.AddRow(g.MatMul(in, ctx.P(enc + "/proj/w")), ctx.P(enc + "/proj/b"));
    h = g.Add(h, g.Constant(PositionalEncoding(T, cfg.d_model)));
    h = g.Dropout(h, cfg.dropout);
    Tensor mask = KeyMask(T, video ? input.video_valid : input.audio_valid);
    for (int i = 0; i < cfg.encoder_layers; ++i) h = EncoderLayer(ctx, Layer(enc, i), h, mask);
    (video ? out.video : out.audio) = h;
    (video ? out.video_mask : out.audio_mask) = mask;
  }
  return out;
}

NodeId Seq2SeqLogits(const ForwardContext &ctx, const EncoderOutput &enc,
                     const std::vector<int> &decoder_input) {
  CheckPresent(ctx.params, enc.present());
  if (decoder_input.empty()) throw DimensionError("seq2seq: empty decoder input");
  for (int id : decoder_input)
    if (id < 0 || id > CharVocab::kSos)
      throw DataError("seq2seq: decoder input symbol " + std::to_string(id) + " out of vocabulary");
  Graph &g = ctx.graph;
  const ModelConfig &cfg = ctx.config;
  const double p = cfg.dropout;
  const int L = static_cast<int>(decoder_input.size());

  NodeId x = g.Embedding(ctx.P("dec/embed"), decoder_input);
  x = g.Dropout(g.Add(x, g.Constant(PositionalEncoding(L, cfg.d_model))), p);
  const Tensor causal = CausalMask(L);
  for (int i = 0; i < cfg.decoder_layers; ++i) {
    std::string l = Layer("dec", i);
    NodeId self = MultiHeadAttention(ctx, l + "/self", x, x, causal);
    NodeId y = LayerNorm(ctx, l + "/ln_self", g.Add(x, g.Dropout(self, p)));
    std::vector<NodeId> contexts, projected;
    for (bool video : {true, false}) {
      const std::optional<NodeId> &memory = video ? enc.video : enc.audio;
      if (!memory) continue;
      std::string s = StreamName(video);
      NodeId att = MultiHeadAttention(ctx, l + "/att_" + s, y, *memory,
                                      video ? enc.video_mask : enc.audio_mask);
      NodeId c = LayerNorm(ctx, l + "/ln_" + s, g.Add(y, g.Dropout(att, p)));
      contexts.push_back(c);
      projected.push_back(g.MatMul(c, ctx.P(l + "/ff/w1_" + s)));
    }
    // The first feed-forward layer over [V_c ; A_c] split by input block.
    NodeId pre = projected.size() == 1 ? projected[0] : g.Add(projected[0], projected[1]);
    NodeId hidden = g.Relu(g.AddRow(pre, ctx.P(l + "/ff/b1")));
    NodeId ff = g.AddRow(g.MatMul(hidden, ctx.P(l + "/ff/w2")), ctx.P(l + "/ff/b2"));
    NodeId residual = contexts.size() == 1 ? contexts[0]
                                           : g.Scale(g.Add(contexts[0], contexts[1]), 0.5);
    x = LayerNorm(ctx, l + "/ln_out", g.Add(residual, g.Dropout(ff, p)));
  }
  return g.AddRow(g.MatMul(x, ctx.P("dec/out/w")), ctx.P("dec/out/b"));
}

NodeId CtcLogits(const ForwardContext &ctx, const EncoderOutput &enc) {
  CheckPresent(ctx.params, enc.present());
  Graph &g = ctx.graph;
  const ModelConfig &cfg = ctx.config;
  Tensor mask;
  std::optional<NodeId> joined;
  if (enc.video && enc.audio && g.value(*enc.video).dim(0) != g.value(*enc.audio).dim(0))
    throw DimensionError("ctc: video has " + std::to_string(g.value(*enc.video).dim(0)) +
                         " frames but audio has " + std::to_string(g.value(*enc.audio).dim(0)) +
                         "; pad or truncate to a common length");
  for (bool video : {true, false}) {
    const std::optional<NodeId> &stream = video ? enc.video : enc.audio;
    if (!stream) continue;
    NodeId part = g.MatMul(*stream, ctx.P(std::string("ctc/join/w_") + StreamName(video)));
    joined = joined ? g.Add(*joined, part) : part;
    const Tensor &m = video ? enc.video_mask : enc.audio_mask;
    if (mask.empty()) {
      mask = m;
    } else {
      for (size_t k = 0; k < mask.size(); ++k) mask[k] = std::min(mask[k], m[k]);
    }
  }
  NodeId h = g.AddRow(*joined, ctx.P("ctc/join/b"));
  for (int i = 0; i < cfg.decoder_layers; ++i) h = EncoderLayer(ctx, Layer("ctc", i), h, mask);
  return g.AddRow(g.MatMul(h, ctx.P("ctc/out/w")), ctx.P("ctc/out/b"));
}

NodeId Seq2SeqLoss(const ForwardContext &ctx, const EncoderOutput &enc,
                   const std::vector<int> &transcript) {
  std::vector<int> input{CharVocab::kSos}, targets;
  for (int id : transcript) {
    if (!CharVocab::IsText(id))
      throw DataError("seq2seq: transcript symbol " + std::to_string(id) + " is not a character");
    input.push_back(id);
    targets.push_back(id);
  }
  targets.push_back(CharVocab::kEos);
  NodeId logits = Seq2SeqLogits(ctx, enc, input);
  return SmoothedCrossEntropyNode(ctx.graph, logits, targets, ctx.config.label_smoothing,
                                  CharVocab::kPad);
}

NodeId CtcLossOnFrames(Graph &graph, NodeId logits, const std::vector<int> &transcript, int valid) {
  const Tensor &z = graph.value(logits);
  if (valid <= 0 || valid > z.dim(0)) valid = z.dim(0);
  CtcResult r = CtcLoss(LogSoftmaxRows(z, valid), CtcTarget(transcript, CharVocab::kBlank));
  Tensor grad(z.shape());
  std::copy(r.logit_grad.data().begin(), r.logit_grad.data().end(), grad.data().begin());
  return graph.AttachLoss(logits, r.loss, std::move(grad));
}

NodeId CtcLossForward(const ForwardContext &ctx, const EncoderOutput &enc,
                      const std::vector<int> &transcript) {
  NodeId logits = CtcLogits(ctx, enc);
  int valid = 0;
  const Tensor &mask = enc.video ? enc.video_mask : enc.audio_mask;
  for (double m : mask.data()) valid += m != 0.0;
  return CtcLossOnFrames(ctx.graph, logits, transcript, valid);
}

Tensor CtcPosteriors(const ParameterSet &params, const ModelConfig &config, const AvInput &input) {
  Graph g;
  ForwardContext ctx{g, params, config};
  EncoderOutput enc = Encode(ctx, input);
  const Tensor &z = g.value(CtcLogits(ctx, enc));
  int valid = z.dim(0);
  if (enc.video && input.video_valid > 0) valid = std::min(valid, input.video_valid);
  if (enc.audio && input.audio_valid > 0) valid = std::min(valid, input.audio_valid);
  Tensor post = LogSoftmaxRows(z, valid);
  for (double &v : post.data()) v = std::exp(v);
  return post;
}

EncoderValues EncodeValues(const ParameterSet &params, const ModelConfig &config,
                           const AvInput &input) {
  Graph g;
  ForwardContext ctx{g, params, config};
  return EncoderValues::From(g, Encode(ctx, input));
}

Seq2SeqScorer::Seq2SeqScorer(const ParameterSet &params, const ModelConfig &config,
                             std::vector<EncoderValues> encodings)
    : params_(params), config_(config), encodings_(std::move(encodings)) {
  if (encodings_.empty()) throw ConfigError("seq2seq scorer: no encoder output");
}

Tensor Seq2SeqScorer::NextLogProbs(const std::vector<std::vector<int>> &prefixes) {
  const int V = CharVocab::kSize;
  Tensor out({static_cast<int>(prefixes.size()), V});
  for (size_t b = 0; b < prefixes.size(); ++b) {
    std::vector<int> input{CharVocab::kSos};
    input.insert(input.end(), prefixes[b].begin(), prefixes[b].end());
    Tensor mean({1, V});
    for (const EncoderValues &e : encodings_) {
      Graph g;
      ForwardContext ctx{g, params_, config_};
      const Tensor &z = g.value(Seq2SeqLogits(ctx, e.Import(g), input));
      for (int k = 0; k < V; ++k) mean.at(0, k) += z.at(z.dim(0) - 1, k) / encodings_.size();
    }
    Tensor lp = LogSoftmaxRows(mean, 1);
    std::copy(lp.data().begin(), lp.data().end(), out.data().begin() + b * V);
  }
  return out;
}

}  // namespace avsr
