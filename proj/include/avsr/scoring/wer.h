// avsr/scoring/wer.h

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

#ifndef AVSR_SCORING_WER_H_
#define AVSR_SCORING_WER_H_

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace avsr {

using Words = std::vector<std::string>;

// Lowercases, drops punctuation other than apostrophes, splits on spaces.
Words NormalizeWords(const std::string &text);

// Operation counts of a minimum-cost word alignment. Orientation is from
// the reference to the hypothesis: a deletion is a reference word with no
// hypothesis counterpart, an insertion a hypothesis word with no reference
// counterpart, substitutions are keyed (reference word, hypothesis word).
struct EditOps {
  std::map<std::string, long> matches;
  std::map<std::pair<std::string, std::string>, long> substitutions;
  std::map<std::string, long> deletions;
  std::map<std::string, long> insertions;
  long S = 0, D = 0, I = 0, N = 0;
  long hypothesis_words = 0;

  long Errors() const { return S + D + I; }
  // Commutative merge for corpus aggregation.
  EditOps &operator+=(const EditOps &other);
};

// Unit-cost Levenshtein alignment. Among equal-cost backtraces prefers
// match > substitution > deletion > insertion. Throws on an empty reference.
EditOps Align(const Words &reference, const Words &hypothesis);

// Plain edit distance, no backtrace; defined for empty sequences too.
long EditDistance(const Words &a, const Words &b);

// 100 * (S + D + I) / N; may exceed 100.
double Wer(const EditOps &ops);
double Wer(const std::string &reference, const std::string &hypothesis);

struct WordMeasures {
  long tp = 0, fp = 0, fn = 0;
  // Empty when the denominator is zero.
  std::optional<double> precision, recall, f1;
};

// Per-word precision/recall/F1 from aggregated operations:
//   TP(w) = matches of w
//   FN(w) = substitutions with reference word w + deletions of w
//   FP(w) = substitutions with hypothesis word w + insertions of w
std::map<std::string, WordMeasures> PerWordMeasures(const EditOps &ops);

struct LengthBucket {
  int words = 0;
  int samples = 0;
  double wer = 0.0;
};

// WER grouped by reference length; lengths with fewer than min_samples
// utterances are left out.
std::vector<LengthBucket> WerByLength(const std::vector<std::pair<Words, Words>> &pairs,
                                      int min_samples = 5);

}  // namespace avsr

#endif  // AVSR_SCORING_WER_H_
