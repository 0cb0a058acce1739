// avsr/model/av_models.h

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

#ifndef AVSR_MODEL_AV_MODELS_H_
#define AVSR_MODEL_AV_MODELS_H_

#include <optional>
#include <vector>

#include "avsr/decoding/beam.h"
#include "avsr/model/transformer.h"
#include "avsr/model/vocab.h"

namespace avsr {

// Model input for one utterance. An empty tensor marks an absent stream.
// Rows past *_valid are padding (0 = every row is valid).
struct AvInput {
  Tensor video;  // [T_v x video_dim]
  Tensor audio;  // [T_a x audio_dim]
  int video_valid = 0;
  int audio_valid = 0;
  // Video features already on the encoding graph (e.g. a trainable
  // front-end); takes the place of `video`.
  std::optional<NodeId> video_node;

  Modalities present() const { return {!video.empty() || video_node.has_value(), !audio.empty()}; }
};

// Per-modality encoder outputs on some graph.
struct EncoderOutput {
  std::optional<NodeId> video;  // [T_v x d_model]
  std::optional<NodeId> audio;  // [T_a x d_model]
  Tensor video_mask, audio_mask;  // key masks

  Modalities present() const { return {video.has_value(), audio.has_value()}; }
};

// Encoder outputs as plain values, reusable across graphs.
struct EncoderValues {
  Tensor video, audio;
  Tensor video_mask, audio_mask;

  static EncoderValues From(const Graph &graph, const EncoderOutput &enc);
  EncoderOutput Import(Graph &graph) const;
};

// All parameters of an architecture for the given modalities.
ParameterSet InitModel(Architecture arch, const ModelConfig &config, Modalities modalities,
                       uint64_t seed);
// Modalities a parameter set was built for.
Modalities ModelModalities(const ParameterSet &params);

// Projection to d_model, positional encoding, then encoder_layers
// self-attention layers, independently per modality.
EncoderOutput Encode(const ForwardContext &ctx, const AvInput &input);

// TM-seq2seq decoder over decoder_input (sos followed by characters):
// per layer causal self-attention, one attention block per present
// modality, and a feed-forward block over the concatenated contexts.
// Returns logits [len x CharVocab::kSize].
NodeId Seq2SeqLogits(const ForwardContext &ctx, const EncoderOutput &enc,
                     const std::vector<int> &decoder_input);

// TM-CTC: encodings joined per frame, the joint self-attention stack and a
// linear layer onto CharVocab::kSize + 1 classes (blank last).
// Returns logits [T x 41].
NodeId CtcLogits(const ForwardContext &ctx, const EncoderOutput &enc);

// Teacher-forced label-smoothed cross-entropy for a transcript (text ids).
NodeId Seq2SeqLoss(const ForwardContext &ctx, const EncoderOutput &enc,
                   const std::vector<int> &transcript);
// CTC loss on the first valid frames (0 = all) of the logits.
NodeId CtcLossOnFrames(Graph &graph, NodeId logits, const std::vector<int> &transcript, int valid);
NodeId CtcLossForward(const ForwardContext &ctx, const EncoderOutput &enc,
                      const std::vector<int> &transcript);

// Per-frame CTC posteriors (probabilities) in inference mode, valid frames only.
Tensor CtcPosteriors(const ParameterSet &params, const ModelConfig &config, const AvInput &input);

// Next-character scorer over one or more encodings of the same utterance.
// With several encodings the decoder logits are averaged before the
// log-softmax.
class Seq2SeqScorer : public NextTokenScorer {
 public:
  Seq2SeqScorer(const ParameterSet &params, const ModelConfig &config,
                std::vector<EncoderValues> encodings);
  Tensor NextLogProbs(const std::vector<std::vector<int>> &prefixes) override;

 private:
  const ParameterSet &params_;
  const ModelConfig &config_;
  std::vector<EncoderValues> encodings_;
};

EncoderValues EncodeValues(const ParameterSet &params, const ModelConfig &config,
                           const AvInput &input);

}  // namespace avsr

#endif  // AVSR_MODEL_AV_MODELS_H_
