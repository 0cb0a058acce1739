// avsr/corpus/synth.h

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


#ifndef AVSR_CORPUS_SYNTH_H_
#define AVSR_CORPUS_SYNTH_H_

#include <limits>
#include <string>
#include <vector>

#include "avsr/features/audio.h"
#include "avsr/numerics/tensor.h"

namespace avsr {

enum class VisualMode { kFeatures, kImages };

const char *VisualModeName(VisualMode mode);
VisualMode ParseVisualMode(const std::string &name);

// Parameters of the synthetic audio-visual corpus. Every character lasts
// frames_per_char video frames at 25 fps; its audio is a pure tone at
// 200 + 50 * id Hz (id = CharVocab index) with a random per-occurrence
// amplitude. Characters are grouped into visemes of viseme_group_size
// consecutive alphabet letters whose visual prototypes differ only by
// visual_distinct times a per-character offset. Spaces render as silence
// plus the neutral visual prototype.
struct CorpusSpec {
  std::string alphabet = "abcdefghij";
  int lexicon_size = 40;
  int min_word_length = 2;
  int max_word_length = 5;
  int min_words = 1;
  int max_words = 4;
  int num_utterances = 200;
  int heldout_utterances = 50;

  double min_amplitude = 0.2;
  double max_amplitude = 1.0;

  VisualMode visual = VisualMode::kFeatures;
  int visual_dim = 16;   // feature mode
  int image_size = 32;   // image mode, square grayscale
  int viseme_group_size = 2;
  double visual_distinct = 0.25;
  double visual_jitter = 0.5;

  int sample_rate = 16000;
  int frame_rate = 25;
  int frames_per_char = 3;

  static constexpr int kMaxTranscript = 100;

  int samples_per_frame() const { return sample_rate / frame_rate; }
  int samples_per_char() const { return frames_per_char * samples_per_frame(); }
  // Throws ConfigError.
  void Validate() const;
};

double ToneFrequency(char c);  // Hz; 0 for space

struct Utterance {
  std::string id;
  std::string transcript;
  Waveform audio;
  Tensor video;  // [T x visual_dim] or [T x S x S x 1]
  uint64_t seed = 0;
  std::string split;  // "train", "heldout", ...

  int frames() const { return video.empty() ? 0 : video.dim(0); }
};

// Seeded per-character visual prototypes (and the neutral one for space).
class VisualTable {
 public:
  VisualTable(const CorpusSpec &spec, uint64_t seed);
  // One frame for character c with jitter drawn from rng.
  Tensor Frame(char c, Rng &rng) const;
  Tensor Prototype(char c) const;
  int viseme(char c) const;

 private:
  const CorpusSpec spec_;
  std::vector<Tensor> prototypes_;  // indexed by alphabet position, space last
  std::vector<std::pair<double, double>> axes_;  // image mode mouth ellipse
};

// Word list drawn from the alphabet.
std::vector<std::string> MakeLexicon(const CorpusSpec &spec, uint64_t seed);
std::vector<std::string> MakeSentences(const CorpusSpec &spec, const std::vector<std::string> &lexicon,
                                       int count, uint64_t seed);

// Renders one transcript. Throws DataError for transcripts over 100
// characters or with characters outside the alphabet.
Utterance RenderUtterance(const CorpusSpec &spec, const VisualTable &table,
                          const std::string &transcript, uint64_t seed);

// num_utterances training sentences followed by heldout_utterances
// held-out ones, all drawn from one lexicon. A pure function of (spec, seed).
std::vector<Utterance> GenerateCorpus(const CorpusSpec &spec, uint64_t seed);
// Renders given transcripts instead of sampled ones.
std::vector<Utterance> GenerateCorpus(const CorpusSpec &spec, uint64_t seed,
                                      const std::vector<std::string> &transcripts,
                                      const std::string &split = "train");

// Characters [begin, end) of an utterance: transcript, audio and video.
Utterance Excerpt(const Utterance &u, const CorpusSpec &spec, int begin, int end);

// ------------------------------------------------------------ noise ----

constexpr double kCleanSnr = std::numeric_limits<double>::infinity();

// Babble sources: rendered sentences drawn from the corpus generator.
std::vector<Waveform> MakeBabblePool(const CorpusSpec &spec, uint64_t seed, int size = 20,
                                     int words = 8);

// Adds babble (the unit-power-normalized sum of 20 pool waveforms, each
// looped from a random offset) scaled to the requested SNR. An infinite SNR
// returns the input unchanged. Throws DataError for a silent signal and
// ConfigError for a pool smaller than 20.
Waveform MixBabble(const Waveform &clean, double snr_db, const std::vector<Waveform> &pool, Rng &rng);

double Power(const std::vector<double> &samples);

// Video shifted by `shift` frames relative to the audio (positive delays the
// video); vacated frames repeat the edge frame. |shift| must be < T.
Utterance Desync(const Utterance &u, int shift);

}  // namespace avsr

#endif  // AVSR_CORPUS_SYNTH_H_
