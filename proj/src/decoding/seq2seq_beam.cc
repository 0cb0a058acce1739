// decoding/seq2seq_beam.cc

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

#include <algorithm>
#include <cmath>
#include <limits>

#include "avsr/base/error.h"
#include "avsr/decoding/beam.h"
#include "avsr/model/vocab.h"

namespace avsr {

namespace {

struct Hypothesis {
  std::vector<int> tokens;  // eos excluded
  double log_model = 0.0;
  double log_lm = 0.0;
  LanguageModel::State lm_state;
  double raw = 0.0;  // log_model + alpha * log_lm
};

struct Candidate {
  size_t parent;
  int symbol;
  double log_model, log_lm, raw;
  LanguageModel::State lm_state;
  std::vector<int> key;  // parent tokens + symbol, for tie-breaking
};

void CheckScores(const Tensor &scores, size_t rows, const Seq2SeqSymbols &symbols) {
  if (scores.rank() != 2 || scores.dim(0) != static_cast<int>(rows))
    throw DimensionError("seq2seq beam: scorer returned " + ShapeString(scores.shape()) +
                         " for " + std::to_string(rows) + " prefixes");
  for (int c : symbols.candidates)
    if (c < 0 || c >= scores.dim(1))
      throw DimensionError("seq2seq beam: candidate " + std::to_string(c) + " outside scorer output");
}

}  // namespace

double LengthPenalty(int length, double beta) {
  return std::pow((5.0 + length) / 6.0, beta);
}

Seq2SeqSymbols Seq2SeqSymbols::ForVocab() {
  Seq2SeqSymbols s;
  s.eos = CharVocab::kEos;
  for (int id = 0; id < CharVocab::kNumText; ++id) s.candidates.push_back(id);
  s.candidates.push_back(CharVocab::kEos);
  return s;
}

DecodeResult Seq2SeqBeam(NextTokenScorer &scorer, const LanguageModel *lm,
                         const BeamConfig &config, const Seq2SeqSymbols &symbols,
                         int max_length) {
  config.Validate();
  if (config.mode != DecodeMode::kSeq2Seq) throw ConfigError("seq2seq beam: beam config is not seq2seq");
  if (max_length < 1) throw ConfigError("seq2seq beam: max length must be >= 1");
  const bool fuse = lm != nullptr && config.lm_weight > 0.0;
  const double beta = config.length_penalty;

  std::vector<Hypothesis> beam(1);
  if (fuse) beam[0].lm_state = lm->Start();
  DecodeResult best;
  bool have_finished = false;
  auto offer = [&](const Hypothesis &h) {
    double score = h.raw / LengthPenalty(static_cast<int>(h.tokens.size()), beta);
    if (!have_finished || BetterHypothesis(score, h.tokens, best.score, best.tokens)) {
      best = {h.tokens, score};
      have_finished = true;
    }
  };

  for (int step = 0; step < max_length && !beam.empty(); ++step) {
    std::vector<std::vector<int>> prefixes;
    for (const Hypothesis &h : beam) prefixes.push_back(h.tokens);
    Tensor scores = scorer.NextLogProbs(prefixes);
    CheckScores(scores, beam.size(), symbols);

    std::vector<Candidate> candidates;
    candidates.reserve(beam.size() * symbols.candidates.size());
    for (size_t b = 0; b < beam.size(); ++b) {
      const Hypothesis &h = beam[b];
      for (int c : symbols.candidates) {
        Candidate cand{b, c, h.log_model + scores.at(b, c), h.log_lm, 0.0, {}, h.tokens};
        if (fuse) cand.log_lm += lm->Score(h.lm_state, c, &cand.lm_state);
        cand.raw = cand.log_model + config.lm_weight * cand.log_lm;
        cand.key.push_back(c);
        candidates.push_back(std::move(cand));
      }
    }
    size_t keep = std::min<size_t>(config.width, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + keep, candidates.end(),
                      [](const Candidate &a, const Candidate &b) {
                        return BetterHypothesis(a.raw, a.key, b.raw, b.key);
                      });

    std::vector<Hypothesis> next;
    for (size_t i = 0; i < keep; ++i) {
      Candidate &cand = candidates[i];
      Hypothesis h{beam[cand.parent].tokens, cand.log_model, cand.log_lm,
                   std::move(cand.lm_state), cand.raw};
      if (cand.symbol == symbols.eos) {
        offer(h);
      } else {
        h.tokens.push_back(cand.symbol);
        next.push_back(std::move(h));
      }
    }
    beam = std::move(next);

    if (have_finished && !beam.empty()) {
      // Scores only decrease, so a live hypothesis is bounded by its current
      // raw score under the most favourable length penalty still reachable.
      double bound = -std::numeric_limits<double>::infinity();
      for (const Hypothesis &h : beam) {
        int len = beta >= 0.0 ? max_length : static_cast<int>(h.tokens.size()) + 1;
        bound = std::max(bound, h.raw / LengthPenalty(len, beta));
      }
      if (best.score >= bound) break;
    }
  }
  if (!have_finished)
    for (const Hypothesis &h : beam) offer(h);
  return best;
}

DecodeResult Seq2SeqGreedy(NextTokenScorer &scorer, const Seq2SeqSymbols &symbols,
                           int max_length) {
  DecodeResult out;
  for (int step = 0; step < max_length; ++step) {
    Tensor scores = scorer.NextLogProbs({out.tokens});
    CheckScores(scores, 1, symbols);
    int arg = -1;
    for (int c : symbols.candidates)
      if (arg < 0 || scores.at(0, c) > scores.at(0, arg) ||
          (scores.at(0, c) == scores.at(0, arg) && c < arg))
        arg = c;
    out.score += scores.at(0, arg);
    if (arg == symbols.eos) break;
    out.tokens.push_back(arg);
  }
  return out;
}

}  // namespace avsr
