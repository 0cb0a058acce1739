// avsr/corpus/curriculum.h

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


#ifndef AVSR_CORPUS_CURRICULUM_H_
#define AVSR_CORPUS_CURRICULUM_H_

#include <string>
#include <utility>
#include <vector>

#include "avsr/corpus/synth.h"

namespace avsr {

// Training stages by maximum excerpt length in characters. A cap of 0 is
// the single-word stage; the final stage should reach full sentences.
class CurriculumSchedule {
 public:
  explicit CurriculumSchedule(std::vector<int> caps = {0, 8, 16, 32, 100});
  // 0, first, 2 first, 4 first, ... up to full.
  static CurriculumSchedule Doubling(int first = 8, int full = CorpusSpec::kMaxTranscript);
  static CurriculumSchedule FullLength() { return CurriculumSchedule({CorpusSpec::kMaxTranscript}); }
  // Comma-separated caps, e.g. "0,8,16,100".
  static CurriculumSchedule Parse(const std::string &text);
  std::string ToString() const;

  int stages() const { return static_cast<int>(caps_.size()); }
  int cap(int stage) const { return caps_.at(stage); }
  bool single_words(int stage) const { return caps_.at(stage) == 0; }
  const std::vector<int> &caps() const { return caps_; }

 private:
  std::vector<int> caps_;
};

// Character spans [begin, end) partitioning the words of text into
// consecutive runs of at most cap characters (cap 0: one word per span).
// A word longer than cap forms a span on its own.
std::vector<std::pair<int, int>> ExcerptSpans(const std::string &text, int cap);

// All excerpts of a set of utterances at one cap.
std::vector<Utterance> StageExamples(const std::vector<Utterance> &utterances,
                                     const CorpusSpec &spec, int cap);

// Frames every example of a stage is zero-padded to: the stage cap, clipped
// to the longest excerpt actually present.
int StagePadFrames(const std::vector<Utterance> &examples, const CorpusSpec &spec, int cap);

}  // namespace avsr

#endif  // AVSR_CORPUS_CURRICULUM_H_
