// avsr/corpus/manifest.h

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


#ifndef AVSR_CORPUS_MANIFEST_H_
#define AVSR_CORPUS_MANIFEST_H_

#include <string>
#include <vector>

#include "avsr/base/key_value.h"
#include "avsr/corpus/synth.h"

namespace avsr {

// Corpus directory layout:
//   corpus.cfg      generator spec and seed, key = value
//   manifest.tsv    one utterance per line:
//                   id  split  seed  audio-blob  video-blob  transcript
//   blobs/          content-addressed files named by a 64-bit FNV-1a
//                   digest of their bytes (.wav audio, .tensor video)
struct CorpusIndex {
  CorpusSpec spec;
  uint64_t seed = 0;
  std::vector<Utterance> utterances;
};

KeyValueBinder BindCorpusSpec(CorpusSpec *spec);

// Hex digest used for blob names.
std::string ContentDigest(const std::string &bytes);

void WriteCorpus(const std::string &dir, const CorpusIndex &corpus);
// Throws DataError on a missing blob, digest mismatch or malformed line.
CorpusIndex ReadCorpus(const std::string &dir);

// Utterances with the given split tag, in manifest order.
std::vector<Utterance> SelectSplit(const std::vector<Utterance> &all, const std::string &split);

}  // namespace avsr

#endif  // AVSR_CORPUS_MANIFEST_H_
