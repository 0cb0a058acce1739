// avsr/decoding/beam.h

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

#ifndef AVSR_DECODING_BEAM_H_
#define AVSR_DECODING_BEAM_H_

#include <string>
#include <vector>

#include "avsr/model/char_lm.h"
#include "avsr/numerics/tensor.h"

namespace avsr {

enum class DecodeMode { kSeq2Seq, kCtc };

struct BeamConfig {
  DecodeMode mode = DecodeMode::kCtc;
  int width = 100;
  double lm_weight = 0.0;       // alpha
  double length_penalty = 0.1;  // beta

  // Validation-tuned defaults: seq2seq W=6/a=0/b=0.6 plain, W=35/a=0.1/b=0.7
  // with the external LM; CTC W=100/a=0.5/b=0.1 with the LM (a=0 without).
  static BeamConfig Defaults(DecodeMode mode, bool with_lm);
  void Validate() const;
};

struct DecodeResult {
  std::vector<int> tokens;
  double score = 0.0;  // the length-normalized score the search ranked by
};

// Ordering used for every tie: higher score first, then the
// lexicographically smaller token sequence.
bool BetterHypothesis(double score_a, const std::vector<int> &a, double score_b,
                      const std::vector<int> &b);

// ---------------------------------------------------------------- CTC ----

struct CtcSymbols {
  int blank = 40;
  std::vector<int> alphabet;  // emittable symbols, blank excluded

  // Model layout: 38 text symbols, blank at CharVocab::kBlank.
  static CtcSymbols ForVocab();
  // Labels 0..num_labels-1 with blank = num_labels.
  static CtcSymbols Compact(int num_labels);
};

// Prefix beam search over per-frame posteriors [T x K] (probabilities, each
// row summing to 1 within 1e-6). Each prefix keeps the log-probabilities of
// its paths ending in blank and in non-blank; an extension by c is weighted
// by p_LM(c | prefix)^alpha and, when c repeats the last symbol, only draws
// on the blank-ending mass. Prefixes are pruned to the W best by
// log p / |s|^beta; the empty prefix is never pruned.
DecodeResult CtcPrefixBeam(const Tensor &posteriors, const LanguageModel *lm,
                           const BeamConfig &config, const CtcSymbols &symbols);

// Maximum-marginal transcript by enumerating all K^T frame paths. Guarded to
// T <= 8 and at most 4 labels. score is the total probability (not log).
DecodeResult ExactCtcDecode(const Tensor &posteriors, int blank = -1);

std::vector<int> CtcGreedy(const Tensor &posteriors, int blank);

// ------------------------------------------------------------ seq2seq ----

// ((5 + |y|) / 6)^beta
double LengthPenalty(int length, double beta);

class NextTokenScorer {
 public:
  virtual ~NextTokenScorer() = default;
  // Log-probabilities [prefixes x V] of the symbol following each prefix.
  virtual Tensor NextLogProbs(const std::vector<std::vector<int>> &prefixes) = 0;
};

struct Seq2SeqSymbols {
  int eos = 38;
  std::vector<int> candidates;  // symbols a hypothesis may extend with, eos included

  static Seq2SeqSymbols ForVocab();
};

// Left-to-right beam search scoring hypotheses by
//   (log p(y|x) + alpha log p_LM(y)) / LP(y).
// Candidates are ranked by their unnormalized score; the top W that end in
// eos move to the finished pool, the rest form the next beam. Search stops
// when the beam is empty, max_length is reached, or no live hypothesis can
// still beat the best finished one.
DecodeResult Seq2SeqBeam(NextTokenScorer &scorer, const LanguageModel *lm,
                         const BeamConfig &config, const Seq2SeqSymbols &symbols,
                         int max_length = 100);

// Argmax feedback decoding up to eos or max_length.
DecodeResult Seq2SeqGreedy(NextTokenScorer &scorer, const Seq2SeqSymbols &symbols,
                           int max_length = 100);

}  // namespace avsr

#endif  // AVSR_DECODING_BEAM_H_
