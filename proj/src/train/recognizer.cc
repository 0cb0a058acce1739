// train/recognizer.cc

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


#include "avsr/train/recognizer.h"

#include "avsr/base/error.h"
#include "avsr/base/parallel.h"
#include "avsr/corpus/augment.h"
#include "avsr/scoring/wer.h"

namespace avsr {

namespace {

std::string TextOf(const std::vector<int> &tokens) {
  std::vector<int> text;
  for (int id : tokens)
    if (CharVocab::IsText(id)) text.push_back(id);
  return CharVocab::Decode(text);
}

}  // namespace

std::vector<Tensor> TtaClips(const Tensor &clip, int transforms, int max_shift, uint64_t seed) {
  if (transforms < 0 || max_shift < 0) throw ConfigError("tta: negative transform count or shift");
  std::vector<Tensor> clips{clip};
  if (transforms == 0) return clips;
  if (clip.rank() != 4) throw ConfigError("tta: visual transforms need image clips");
  for (int i = 0; i < transforms; ++i) {
    Rng rng = MakeRng(seed, i);
    Tensor t = clip;
    if (std::bernoulli_distribution(0.5)(rng)) t = HorizontalFlip(t);
    std::uniform_int_distribution<int> shift(-max_shift, max_shift);
    int dy = shift(rng), dx = shift(rng);
    clips.push_back(SpatialShift(t, dy, dx));
  }
  return clips;
}

Hypothesis Recognize(const Recognizer &model, const Utterance &u, const RecognizeOptions &options) {
  const Modalities m = model.modalities();
  AvInput input = model.pipeline.Input(u, m, model.params);
  std::vector<Tensor> clips;
  if (options.tta_transforms > 0 && m.video)
    clips = TtaClips(u.video, options.tta_transforms, options.tta_max_shift, options.tta_seed);

  if (model.architecture == Architecture::kCtc) {
    if (clips.size() > 1) {
      Tensor sum = input.video;
      for (size_t i = 1; i < clips.size(); ++i) {
        Tensor f = model.pipeline.Video(clips[i], model.params);
        for (size_t k = 0; k < sum.size(); ++k) sum[k] += f[k];
      }
      for (double &v : sum.data()) v /= static_cast<double>(clips.size());
      input.video = sum;
    }
    Tensor post = CtcPosteriors(model.params, model.config, input);
    if (options.greedy) return {TextOf(CtcGreedy(post, CharVocab::kBlank)), 0.0};
    DecodeResult r = CtcPrefixBeam(post, options.lm, options.beam, CtcSymbols::ForVocab());
    return {TextOf(r.tokens), r.score};
  }

  std::vector<EncoderValues> encodings{EncodeValues(model.params, model.config, input)};
  for (size_t i = 1; i < clips.size(); ++i) {
    AvInput t = input;
    t.video = model.pipeline.Video(clips[i], model.params);
    encodings.push_back(EncodeValues(model.params, model.config, t));
  }
  Seq2SeqScorer scorer(model.params, model.config, std::move(encodings));
  DecodeResult r = options.greedy
                       ? Seq2SeqGreedy(scorer, Seq2SeqSymbols::ForVocab(), options.max_length)
                       : Seq2SeqBeam(scorer, options.lm, options.beam, Seq2SeqSymbols::ForVocab(),
                                     options.max_length);
  return {TextOf(r.tokens), r.score};
}

std::vector<Hypothesis> RecognizeAll(const Recognizer &model, const std::vector<Utterance> &utterances,
                                     const RecognizeOptions &options, int workers) {
  std::vector<Hypothesis> out(utterances.size());
  ParallelFor(utterances.size(), workers,
              [&](size_t i) { out[i] = Recognize(model, utterances[i], options); });
  return out;
}

double CorpusWer(const std::vector<Utterance> &utterances, const std::vector<Hypothesis> &hyps) {
  if (utterances.size() != hyps.size()) throw DataError("wer: hypothesis count mismatch");
  EditOps total;
  for (size_t i = 0; i < hyps.size(); ++i)
    total += Align(NormalizeWords(utterances[i].transcript), NormalizeWords(hyps[i].text));
  return Wer(total);
}

}  // namespace avsr
