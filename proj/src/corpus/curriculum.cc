// corpus/curriculum.cc

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


#include "avsr/corpus/curriculum.h"

#include <algorithm>
#include <sstream>

#include "avsr/base/error.h"

namespace avsr {

CurriculumSchedule::CurriculumSchedule(std::vector<int> caps) : caps_(std::move(caps)) {
  if (caps_.empty()) throw ConfigError("curriculum: no stages");
  for (size_t i = 0; i < caps_.size(); ++i) {
    if (caps_[i] < 0) throw ConfigError("curriculum: caps must be >= 0");
    if (i > 0 && caps_[i] < caps_[i - 1]) throw ConfigError("curriculum: caps must be non-decreasing");
  }
}

CurriculumSchedule CurriculumSchedule::Doubling(int first, int full) {
  if (first < 1 || full < first) throw ConfigError("curriculum: need 1 <= first <= full");
  std::vector<int> caps{0};
  for (int c = first; c < full; c *= 2) caps.push_back(c);
  caps.push_back(full);
  return CurriculumSchedule(caps);
}

CurriculumSchedule CurriculumSchedule::Parse(const std::string &text) {
  std::vector<int> caps;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      size_t used;
      caps.push_back(std::stoi(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception &) {
      throw ConfigError("curriculum: bad cap '" + item + "'");
    }
  }
  return CurriculumSchedule(caps);
}

std::string CurriculumSchedule::ToString() const {
  std::string s;
  for (int c : caps_) s += (s.empty() ? "" : ",") + std::to_string(c);
  return s;
}

std::vector<std::pair<int, int>> ExcerptSpans(const std::string &text, int cap) {
  std::vector<std::pair<int, int>> words;
  const int n = static_cast<int>(text.size());
  for (int i = 0; i < n;) {
    while (i < n && text[i] == ' ') ++i;
    int j = i;
    while (j < n && text[j] != ' ') ++j;
    if (j > i) words.emplace_back(i, j);
    i = j;
  }
  if (cap == 0) return words;
  std::vector<std::pair<int, int>> spans;
  for (const auto &w : words) {
    if (!spans.empty() && w.second - spans.back().first <= cap)
      spans.back().second = w.second;
    else
      spans.push_back(w);
  }
  return spans;
}

std::vector<Utterance> StageExamples(const std::vector<Utterance> &utterances,
                                     const CorpusSpec &spec, int cap) {
  std::vector<Utterance> out;
  for (const Utterance &u : utterances) {
    auto spans = ExcerptSpans(u.transcript, cap);
    if (spans.size() == 1 && spans[0].first == 0 &&
        spans[0].second == static_cast<int>(u.transcript.size())) {
      out.push_back(u);
      continue;
    }
    for (const auto &[b, e] : spans) out.push_back(Excerpt(u, spec, b, e));
  }
  return out;
}

int StagePadFrames(const std::vector<Utterance> &examples, const CorpusSpec &spec, int cap) {
  int longest = 0;
  for (const Utterance &u : examples) longest = std::max(longest, static_cast<int>(u.transcript.size()));
  if (cap > 0 && longest > cap) {
    bool single = true;
    for (const Utterance &u : examples)
      if (static_cast<int>(u.transcript.size()) > cap && u.transcript.find(' ') != std::string::npos)
        single = false;
    if (!single) throw DataError("curriculum: excerpt longer than stage cap");
  }
  return longest * spec.frames_per_char;
}

}  // namespace avsr
