// avsr/model/char_lm.h

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

#ifndef AVSR_MODEL_CHAR_LM_H_
#define AVSR_MODEL_CHAR_LM_H_

#include <iosfwd>
#include <string>
#include <unordered_map>
#include <vector>

namespace avsr {

// External character language model used for shallow fusion. Symbols are
// CharVocab ids; the end symbol is CharVocab::kEos. The state is the
// symbol history, most recent last, beginning with the sentence start.
class LanguageModel {
 public:
  using State = std::vector<int>;
  virtual ~LanguageModel() = default;
  virtual State Start() const = 0;
  // log p(symbol | state); fills *next with the extended state if non-null.
  // Throws DataError for symbols outside the model's alphabet.
  virtual double Score(const State &state, int symbol, State *next = nullptr) const = 0;
  virtual const std::vector<int> &alphabet() const = 0;
};

// Count-based character n-gram with additive smoothing:
//   p(c | h) = (n(h c) + delta) / (n(h) + delta * |A|)
// where h is the longest suffix of the history (up to order - 1 symbols)
// that was seen during training. Every distribution is exactly normalized
// over the alphabet A.
class NgramCharLm : public LanguageModel {
 public:
  static constexpr int kSentenceStart = -1;

  // Default alphabet: all text symbols plus eos.
  explicit NgramCharLm(int order = 5, double delta = 0.01, std::vector<int> alphabet = {});

  // Each sentence is encoded, prefixed by the start marker and closed by eos.
  void Train(const std::vector<std::string> &sentences);
  void TrainIds(const std::vector<std::vector<int>> &sentences);

  State Start() const override { return {kSentenceStart}; }
  double Score(const State &state, int symbol, State *next = nullptr) const override;
  const std::vector<int> &alphabet() const override { return alphabet_; }

  int order() const { return order_; }
  double delta() const { return delta_; }
  // Total log-probability of a sentence including its end symbol.
  double SentenceLogProb(const std::string &text) const;

  void Write(std::ostream &os) const;
  static NgramCharLm Read(std::istream &is);
  void Save(const std::string &path) const;
  static NgramCharLm Load(const std::string &path);

 private:
  struct Counts {
    long total = 0;
    std::unordered_map<int, long> next;
  };
  static std::string Key(const int *begin, const int *end);
  bool InAlphabet(int symbol) const;

  int order_;
  double delta_;
  std::vector<int> alphabet_;
  std::vector<bool> member_;
  std::unordered_map<std::string, Counts> counts_;
};

}  // namespace avsr

#endif  // AVSR_MODEL_CHAR_LM_H_
