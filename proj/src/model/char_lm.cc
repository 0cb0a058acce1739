// model/char_lm.cc

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

#include "avsr/model/char_lm.h"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "avsr/base/error.h"
#include "avsr/model/vocab.h"

namespace avsr {

NgramCharLm::NgramCharLm(int order, double delta, std::vector<int> alphabet)
    : order_(order), delta_(delta), alphabet_(std::move(alphabet)) {
  if (order < 1) throw ConfigError("ngram lm: order must be >= 1");
  if (!(delta > 0.0)) throw ConfigError("ngram lm: additive smoothing constant must be > 0");
  if (alphabet_.empty()) {
    for (int id = 0; id < CharVocab::kNumText; ++id) alphabet_.push_back(id);
    alphabet_.push_back(CharVocab::kEos);
  }
  std::sort(alphabet_.begin(), alphabet_.end());
  alphabet_.erase(std::unique(alphabet_.begin(), alphabet_.end()), alphabet_.end());
  member_.assign(CharVocab::kSize + 1, false);
  for (int id : alphabet_) {
    if (id < 0 || id >= CharVocab::kSize || id == CharVocab::kPad)
      throw ConfigError("ngram lm: alphabet symbol " + std::to_string(id) + " not allowed");
    member_[id] = true;
  }
}

bool NgramCharLm::InAlphabet(int symbol) const {
  return symbol >= 0 && symbol < static_cast<int>(member_.size()) && member_[symbol];
}

std::string NgramCharLm::Key(const int *begin, const int *end) {
  std::string key;
  key.reserve(end - begin);
  for (const int *p = begin; p != end; ++p) key.push_back(static_cast<char>(*p + 2));
  return key;
}

void NgramCharLm::Train(const std::vector<std::string> &sentences) {
  std::vector<std::vector<int>> ids;
  ids.reserve(sentences.size());
  for (const std::string &s : sentences) ids.push_back(CharVocab::Encode(CharVocab::Normalize(s)));
  TrainIds(ids);
}

void NgramCharLm::TrainIds(const std::vector<std::vector<int>> &sentences) {
  for (const auto &sentence : sentences) {
    std::vector<int> seq{kSentenceStart};
    for (int id : sentence) {
      if (!InAlphabet(id))
        throw DataError("ngram lm: training symbol " + CharVocab::SymbolName(id) +
                        " outside the alphabet");
      seq.push_back(id);
    }
    seq.push_back(CharVocab::kEos);
    if (!InAlphabet(CharVocab::kEos)) seq.pop_back();
    for (size_t i = 1; i < seq.size(); ++i) {
      for (int h = 0; h < order_ && h <= static_cast<int>(i); ++h) {
        Counts &c = counts_[Key(seq.data() + i - h, seq.data() + i)];
        ++c.total;
        ++c.next[seq[i]];
      }
    }
  }
}

double NgramCharLm::Score(const State &state, int symbol, State *next) const {
  if (!InAlphabet(symbol))
    throw DataError("ngram lm: symbol " + std::to_string(symbol) + " is not in the LM alphabet");
  const int n = static_cast<int>(state.size());
  const int max_h = std::min(order_ - 1, n);
  const Counts *found = nullptr;
  for (int h = max_h; h >= 0 && !found; --h) {
    auto it = counts_.find(Key(state.data() + n - h, state.data() + n));
    if (it != counts_.end() && it->second.total > 0) found = &it->second;
  }
  double num = delta_, den = delta_ * static_cast<double>(alphabet_.size());
  if (found) {
    auto it = found->next.find(symbol);
    if (it != found->next.end()) num += static_cast<double>(it->second);
    den += static_cast<double>(found->total);
  }
  if (next) {
    const int keep = std::min(order_ - 1, n + 1);
    next->clear();
    if (keep > 0) {
      next->assign(state.end() - (keep - 1), state.end());
      next->push_back(symbol);
    }
  }
  return std::log(num / den);
}

double NgramCharLm::SentenceLogProb(const std::string &text) const {
  State s = Start(), next;
  double total = 0.0;
  for (int id : CharVocab::Encode(CharVocab::Normalize(text))) {
    total += Score(s, id, &next);
    s = next;
  }
  return total + Score(s, CharVocab::kEos);
}

// Text format:
//   avsr-charlm 1
//   order <n> delta <d>
//   alphabet <k> id...
//   <history ids or '-'> <symbol> <count>     (one line per n-gram)
void NgramCharLm::Write(std::ostream &os) const {
  os << "avsr-charlm 1\norder " << order_ << " delta ";
  os.precision(17);
  os << delta_ << "\nalphabet " << alphabet_.size();
  for (int id : alphabet_) os << ' ' << id;
  os << '\n';
  std::vector<std::string> keys;
  for (const auto &[k, c] : counts_) keys.push_back(k);
  std::sort(keys.begin(), keys.end());
  for (const std::string &k : keys) {
    const Counts &c = counts_.at(k);
    std::vector<std::pair<int, long>> nexts(c.next.begin(), c.next.end());
    std::sort(nexts.begin(), nexts.end());
    for (const auto &[sym, count] : nexts) {
      if (k.empty()) os << '-';
      for (size_t i = 0; i < k.size(); ++i)
        os << (i ? "," : "") << static_cast<int>(static_cast<unsigned char>(k[i])) - 2;
      os << ' ' << sym << ' ' << count << '\n';
    }
  }
}

NgramCharLm NgramCharLm::Read(std::istream &is) {
  std::string magic, word;
  int version = 0, order = 0;
  double delta = 0.0;
  size_t n = 0;
  if (!(is >> magic >> version) || magic != "avsr-charlm" || version != 1)
    throw DataError("ngram lm: not an avsr-charlm v1 file");
  if (!(is >> word >> order) || word != "order" || !(is >> word >> delta) || word != "delta")
    throw DataError("ngram lm: malformed header");
  if (!(is >> word >> n) || word != "alphabet") throw DataError("ngram lm: missing alphabet");
  std::vector<int> alphabet(n);
  for (int &id : alphabet)
    if (!(is >> id)) throw DataError("ngram lm: truncated alphabet");
  NgramCharLm lm(order, delta, alphabet);
  std::string history;
  int sym;
  long count;
  while (is >> history >> sym >> count) {
    std::vector<int> ids;
    if (history != "-") {
      std::istringstream hs(history);
      for (std::string tok; std::getline(hs, tok, ',');) ids.push_back(std::stoi(tok));
    }
    Counts &c = lm.counts_[Key(ids.data(), ids.data() + ids.size())];
    c.total += count;
    c.next[sym] += count;
  }
  if (!is.eof()) throw DataError("ngram lm: malformed n-gram line");
  return lm;
}

void NgramCharLm::Save(const std::string &path) const {
  std::ofstream os(path);
  if (!os) throw DataError("ngram lm: cannot write " + path);
  Write(os);
}

NgramCharLm NgramCharLm::Load(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw DataError("ngram lm: cannot open " + path);
  return Read(is);
}

}  // namespace avsr
