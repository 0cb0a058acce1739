// decoding/ctc_beam.cc

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
#include <map>
#include <unordered_map>

#include "avsr/base/error.h"
#include "avsr/decoding/beam.h"
#include "avsr/losses/ctc_loss.h"
#include "avsr/model/vocab.h"

namespace avsr {

namespace {

constexpr double kLogZero = -std::numeric_limits<double>::infinity();

struct Prefix {
  std::vector<int> tokens;
  double blank = kLogZero;      // log p_b(s, t)
  double non_blank = kLogZero;  // log p_nb(s, t)
  LanguageModel::State lm_state;

  double Total() const { return LogSumExp(blank, non_blank); }
};

double Normalized(const Prefix &p, double beta) {
  double total = p.Total();
  if (p.tokens.empty() || beta == 0.0) return total;
  return total / std::pow(static_cast<double>(p.tokens.size()), beta);
}

std::string KeyOf(const std::vector<int> &tokens) {
  std::string key(tokens.size(), '\0');
  for (size_t i = 0; i < tokens.size(); ++i) key[i] = static_cast<char>(tokens[i] + 1);
  return key;
}

void CheckNormalized(const Tensor &posteriors) {
  if (posteriors.rank() != 2) throw DimensionError("ctc decode: posteriors must be [T x K]");
  for (int t = 0; t < posteriors.dim(0); ++t) {
    double sum = 0.0;
    for (int k = 0; k < posteriors.dim(1); ++k) {
      double p = posteriors.at(t, k);
      if (p < 0.0) throw DataError("ctc decode: negative probability in frame " + std::to_string(t));
      sum += p;
    }
    if (std::fabs(sum - 1.0) > 1e-6)
      throw DataError("ctc decode: frame " + std::to_string(t) + " sums to " +
                      std::to_string(sum) + ", not 1");
  }
}

}  // namespace

bool BetterHypothesis(double score_a, const std::vector<int> &a, double score_b,
                      const std::vector<int> &b) {
  if (score_a != score_b) return score_a > score_b;
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

BeamConfig BeamConfig::Defaults(DecodeMode mode, bool with_lm) {
  BeamConfig c;
  c.mode = mode;
  if (mode == DecodeMode::kSeq2Seq) {
    c.width = with_lm ? 35 : 6;
    c.lm_weight = with_lm ? 0.1 : 0.0;
    c.length_penalty = with_lm ? 0.7 : 0.6;
  } else {
    c.width = 100;
    c.lm_weight = with_lm ? 0.5 : 0.0;
    c.length_penalty = 0.1;
  }
  return c;
}

void BeamConfig::Validate() const {
  if (width < 1) throw ConfigError("beam: width must be >= 1");
  if (!(lm_weight >= 0.0)) throw ConfigError("beam: lm weight must be >= 0");
  if (!std::isfinite(length_penalty)) throw ConfigError("beam: length penalty must be finite");
}

CtcSymbols CtcSymbols::ForVocab() {
  CtcSymbols s;
  s.blank = CharVocab::kBlank;
  for (int id = 0; id < CharVocab::kNumText; ++id) s.alphabet.push_back(id);
  return s;
}

CtcSymbols CtcSymbols::Compact(int num_labels) {
  CtcSymbols s;
  s.blank = num_labels;
  for (int id = 0; id < num_labels; ++id) s.alphabet.push_back(id);
  return s;
}

DecodeResult CtcPrefixBeam(const Tensor &posteriors, const LanguageModel *lm,
                           const BeamConfig &config, const CtcSymbols &symbols) {
  config.Validate();
  if (config.mode != DecodeMode::kCtc) throw ConfigError("ctc decode: beam config is not CTC");
  CheckNormalized(posteriors);
  const int T = posteriors.dim(0), K = posteriors.dim(1);
  if (symbols.blank < 0 || symbols.blank >= K) throw DimensionError("ctc decode: blank outside K");
  for (int c : symbols.alphabet)
    if (c < 0 || c >= K || c == symbols.blank)
      throw DimensionError("ctc decode: alphabet symbol " + std::to_string(c) + " invalid");
  const bool fuse = lm != nullptr && config.lm_weight > 0.0;

  std::vector<Prefix> beam(1);
  beam[0].blank = 0.0;  // p_b(empty, 0) = 1
  if (fuse) beam[0].lm_state = lm->Start();

  std::vector<double> lp(K);
  for (int t = 0; t < T; ++t) {
    for (int k = 0; k < K; ++k) {
      double p = posteriors.at(t, k);
      lp[k] = p > 0.0 ? std::log(p) : kLogZero;
    }
    std::vector<Prefix> next;
    std::unordered_map<std::string, size_t> index;
    next.reserve(beam.size() * (symbols.alphabet.size() + 1));
    auto entry = [&](const std::vector<int> &tokens, bool *created) -> Prefix & {
      auto [it, inserted] = index.try_emplace(KeyOf(tokens), next.size());
      if (inserted) {
        next.emplace_back();
        next.back().tokens = tokens;
      }
      if (created) *created = inserted;
      return next[it->second];
    };

    for (const Prefix &s : beam) {
      const double total = s.Total();
      {
        bool created;
        Prefix &same = entry(s.tokens, &created);
        if (created) same.lm_state = s.lm_state;
        same.blank = LogSumExp(same.blank, lp[symbols.blank] + total);
        if (!s.tokens.empty())
          same.non_blank = LogSumExp(same.non_blank, lp[s.tokens.back()] + s.non_blank);
      }
      std::vector<int> extended = s.tokens;
      extended.push_back(0);
      for (int c : symbols.alphabet) {
        if (lp[c] == kLogZero) continue;
        const bool repeat = !s.tokens.empty() && s.tokens.back() == c;
        const double source = repeat ? s.blank : total;
        if (source == kLogZero) continue;
        extended.back() = c;
        LanguageModel::State lm_next;
        double lm_term = 0.0;
        if (fuse) lm_term = config.lm_weight * lm->Score(s.lm_state, c, &lm_next);
        bool created;
        Prefix &ext = entry(extended, &created);
        if (created && fuse) ext.lm_state = std::move(lm_next);
        ext.non_blank = LogSumExp(ext.non_blank, lp[c] + source + lm_term);
      }
    }

    // Keep the W best by normalized score; the empty prefix always survives.
    std::vector<std::pair<double, size_t>> ranked;
    ranked.reserve(next.size());
    for (size_t i = 0; i < next.size(); ++i)
      ranked.emplace_back(Normalized(next[i], config.length_penalty), i);
    auto better = [&](const std::pair<double, size_t> &a, const std::pair<double, size_t> &b) {
      return BetterHypothesis(a.first, next[a.second].tokens, b.first, next[b.second].tokens);
    };
    size_t keep = std::min<size_t>(config.width, ranked.size());
    std::partial_sort(ranked.begin(), ranked.begin() + keep, ranked.end(), better);
    beam.clear();
    bool has_empty = false;
    for (size_t i = 0; i < keep; ++i) {
      has_empty |= next[ranked[i].second].tokens.empty();
      beam.push_back(std::move(next[ranked[i].second]));
    }
    if (!has_empty) {
      auto it = index.find(std::string());
      if (it != index.end()) beam.push_back(std::move(next[it->second]));
    }
  }

  const Prefix *best = nullptr;
  double best_score = kLogZero;
  for (const Prefix &p : beam) {
    double score = Normalized(p, config.length_penalty);
    if (!best || BetterHypothesis(score, p.tokens, best_score, best->tokens)) {
      best = &p;
      best_score = score;
    }
  }
  return {best->tokens, best_score};
}

DecodeResult ExactCtcDecode(const Tensor &posteriors, int blank) {
  if (posteriors.rank() != 2) throw DimensionError("exact ctc: posteriors must be [T x K]");
  const int T = posteriors.dim(0), K = posteriors.dim(1);
  if (blank < 0) blank = K - 1;
  if (T > 8 || K - 1 > 4)
    throw ConfigError("exact ctc: instance above the cost guard (T <= 8, labels <= 4), got T=" +
                      std::to_string(T) + " K=" + std::to_string(K));
  std::map<std::vector<int>, double> mass;
  std::vector<int> path(T, 0);
  while (true) {
    double p = 1.0;
    for (int t = 0; t < T; ++t) p *= posteriors.at(t, path[t]);
    std::vector<int> collapsed;
    int prev = -1;
    for (int k : path) {
      if (k != prev && k != blank) collapsed.push_back(k);
      prev = k;
    }
    mass[collapsed] += p;
    int t = T - 1;
    while (t >= 0 && ++path[t] == K) path[t--] = 0;
    if (t < 0) break;
  }
  DecodeResult best;
  best.score = -1.0;
  for (const auto &[tokens, p] : mass)
    if (BetterHypothesis(p, tokens, best.score, best.tokens)) best = {tokens, p};
  return best;
}

std::vector<int> CtcGreedy(const Tensor &posteriors, int blank) {
  std::vector<int> out;
  int prev = -1;
  for (int t = 0; t < posteriors.rows(); ++t) {
    int arg = 0;
    for (int k = 1; k < posteriors.cols(); ++k)
      if (posteriors.at(t, k) > posteriors.at(t, arg)) arg = k;
    if (arg != prev && arg != blank) out.push_back(arg);
    prev = arg;
  }
  return out;
}

}  // namespace avsr
