// corpus/synth.cc

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


#include "avsr/corpus/synth.h"

#include <algorithm>
#include <cmath>
#include <set>

#include "avsr/base/error.h"
#include "avsr/base/random.h"
#include "avsr/model/vocab.h"

namespace avsr {

namespace {

size_t RowSize(const Tensor &t) { return t.size() / t.dim(0); }

void CopyRow(const Tensor &from, int src, Tensor &to, int dst) {
  size_t n = RowSize(from);
  std::copy_n(from.data().begin() + src * n, n, to.data().begin() + dst * n);
}

}  // namespace

const char *VisualModeName(VisualMode mode) {
  return mode == VisualMode::kFeatures ? "features" : "images";
}

VisualMode ParseVisualMode(const std::string &name) {
  if (name == "features") return VisualMode::kFeatures;
  if (name == "images") return VisualMode::kImages;
  throw ConfigError("unknown visual mode '" + name + "' (expected features or images)");
}

void CorpusSpec::Validate() const {
  auto require = [](bool ok, const std::string &what) {
    if (!ok) throw ConfigError("corpus spec: " + what);
  };
  require(!alphabet.empty(), "alphabet is empty");
  std::set<char> seen;
  for (char c : alphabet) {
    require(c != ' ' && CharVocab::IsText(CharVocab::Id(c)), "bad alphabet character");
    require(seen.insert(c).second, std::string("duplicate alphabet character '") + c + "'");
    require(ToneFrequency(c) < sample_rate / 2.0, "tone above Nyquist");
  }
  require(lexicon_size >= 1, "lexicon_size must be >= 1");
  require(min_word_length >= 1 && max_word_length >= min_word_length, "bad word length range");
  require(min_words >= 1 && max_words >= min_words, "bad word count range");
  require(max_words * (max_word_length + 1) - 1 <= kMaxTranscript,
          "longest possible sentence exceeds 100 characters");
  require(num_utterances >= 0 && heldout_utterances >= 0, "utterance counts must be >= 0");
  require(min_amplitude > 0.0 && max_amplitude >= min_amplitude && max_amplitude <= 1.0,
          "amplitudes must satisfy 0 < min <= max <= 1");
  require(visual_dim >= 1 && image_size >= 32, "visual_dim >= 1 and image_size >= 32");
  require(viseme_group_size >= 1, "viseme_group_size must be >= 1");
  require(visual_distinct >= 0.0 && visual_jitter >= 0.0, "visual scales must be >= 0");
  require(sample_rate > 0 && frame_rate > 0 && sample_rate % frame_rate == 0,
          "sample rate must be a multiple of the frame rate");
  require(frames_per_char >= 1, "frames_per_char must be >= 1");
}

double ToneFrequency(char c) {
  if (c == ' ') return 0.0;
  return 200.0 + 50.0 * CharVocab::Id(c);
}

// ------------------------------------------------------------ visuals ----

VisualTable::VisualTable(const CorpusSpec &spec, uint64_t seed) : spec_(spec) {
  spec.Validate();
  Rng rng = MakeRng(seed, 3);
  const int n = static_cast<int>(spec.alphabet.size());
  const int groups = (n + spec.viseme_group_size - 1) / spec.viseme_group_size;
  if (spec.visual == VisualMode::kFeatures) {
    std::vector<Tensor> group_protos;
    for (int g = 0; g < groups; ++g) group_protos.push_back(RandomNormal({spec.visual_dim}, 1.0, rng));
    for (int i = 0; i < n; ++i) {
      Tensor p = group_protos[i / spec.viseme_group_size];
      Tensor d = RandomNormal({spec.visual_dim}, 1.0, rng);
      for (int j = 0; j < spec.visual_dim; ++j) p[j] += spec.visual_distinct * d[j];
      prototypes_.push_back(std::move(p));
    }
    prototypes_.push_back(Tensor({spec.visual_dim}));
  } else {
    std::uniform_real_distribution<double> wide(3.0, 11.0), tall(1.5, 8.0), sign(-1.0, 1.0);
    std::vector<std::pair<double, double>> group_axes;
    for (int g = 0; g < groups; ++g) group_axes.emplace_back(wide(rng), tall(rng));
    for (int i = 0; i < n; ++i) {
      auto [a, b] = group_axes[i / spec.viseme_group_size];
      axes_.emplace_back(a + 4.0 * spec.visual_distinct * sign(rng),
                         b + 4.0 * spec.visual_distinct * sign(rng));
    }
    axes_.emplace_back(4.0, 0.75);
  }
}

int VisualTable::viseme(char c) const {
  if (c == ' ') return -1;
  size_t i = spec_.alphabet.find(c);
  if (i == std::string::npos) throw DataError(std::string("character '") + c + "' not in alphabet");
  return static_cast<int>(i) / spec_.viseme_group_size;
}

namespace {

size_t TableIndex(const CorpusSpec &spec, char c) {
  if (c == ' ') return spec.alphabet.size();
  size_t i = spec.alphabet.find(c);
  if (i == std::string::npos) throw DataError(std::string("character '") + c + "' not in alphabet");
  return i;
}

Tensor RenderMouth(int size, double a, double b, double noise, Rng &rng) {
  Tensor img({size, size, 1});
  std::normal_distribution<double> n(0.0, 1.0);
  const double centre = (size - 1) / 2.0;
  for (int y = 0; y < size; ++y)
    for (int x = 0; x < size; ++x) {
      double dx = (x - centre) / std::max(a, 0.5), dy = (y - centre) / std::max(b, 0.5);
      double r = std::sqrt(dx * dx + dy * dy);
      double v = 0.1 + 0.8 / (1.0 + std::exp(-4.0 * (1.0 - r)));
      img[static_cast<size_t>(y) * size + x] = std::clamp(v + noise * n(rng), 0.0, 1.0);
    }
  return img;
}

}  // namespace

Tensor VisualTable::Prototype(char c) const {
  size_t i = TableIndex(spec_, c);
  if (spec_.visual == VisualMode::kFeatures) return prototypes_[i];
  Rng none = MakeRng(0);
  return RenderMouth(spec_.image_size, axes_[i].first, axes_[i].second, 0.0, none);
}

Tensor VisualTable::Frame(char c, Rng &rng) const {
  size_t i = TableIndex(spec_, c);
  std::normal_distribution<double> n(0.0, 1.0);
  if (spec_.visual == VisualMode::kFeatures) {
    Tensor f = prototypes_[i];
    for (double &v : f.data()) v += spec_.visual_jitter * n(rng);
    return f;
  }
  double a = axes_[i].first + spec_.visual_jitter * n(rng);
  double b = axes_[i].second + spec_.visual_jitter * n(rng);
  return RenderMouth(spec_.image_size, a, b, 0.1 * spec_.visual_jitter, rng);
}

// ---------------------------------------------------------- sentences ----

std::vector<std::string> MakeLexicon(const CorpusSpec &spec, uint64_t seed) {
  spec.Validate();
  Rng rng = MakeRng(seed, 1);
  std::uniform_int_distribution<int> len(spec.min_word_length, spec.max_word_length);
  std::uniform_int_distribution<size_t> letter(0, spec.alphabet.size() - 1);
  std::set<std::string> seen;
  std::vector<std::string> words;
  for (int attempt = 0; static_cast<int>(words.size()) < spec.lexicon_size && attempt < 100000;
       ++attempt) {
    std::string w;
    for (int k = len(rng); k > 0; --k) w.push_back(spec.alphabet[letter(rng)]);
    if (seen.insert(w).second) words.push_back(w);
  }
  return words;
}

std::vector<std::string> MakeSentences(const CorpusSpec &spec, const std::vector<std::string> &lexicon,
                                       int count, uint64_t seed) {
  if (lexicon.empty()) throw ConfigError("corpus: empty lexicon");
  Rng rng = MakeRng(seed, 2);
  std::uniform_int_distribution<int> nwords(spec.min_words, spec.max_words);
  std::uniform_int_distribution<size_t> pick(0, lexicon.size() - 1);
  std::vector<std::string> out;
  for (int i = 0; i < count; ++i) {
    std::string s;
    for (int k = nwords(rng); k > 0; --k) s += (s.empty() ? "" : " ") + lexicon[pick(rng)];
    out.push_back(s);
  }
  return out;
}

// ---------------------------------------------------------- rendering ----

Utterance RenderUtterance(const CorpusSpec &spec, const VisualTable &table,
                          const std::string &transcript, uint64_t seed) {
  if (transcript.empty()) throw DataError("corpus: empty transcript");
  if (static_cast<int>(transcript.size()) > CorpusSpec::kMaxTranscript)
    throw DataError("corpus: transcript of " + std::to_string(transcript.size()) +
                    " characters exceeds the 100-character cap");
  Rng rng = MakeRng(seed);
  std::uniform_real_distribution<double> amp(spec.min_amplitude, spec.max_amplitude);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  const int spc = spec.samples_per_char();
  const int fpc = spec.frames_per_char;
  const int n = static_cast<int>(transcript.size());

  Utterance u;
  u.transcript = transcript;
  u.seed = seed;
  u.audio.sample_rate = spec.sample_rate;
  u.audio.samples.assign(static_cast<size_t>(n) * spc, 0.0);
  Tensor first = table.Frame(transcript[0], rng);
  Shape shape = first.shape();
  shape.insert(shape.begin(), n * fpc);
  u.video = Tensor(shape);
  const size_t row = first.size();
  for (int i = 0; i < n; ++i) {
    char c = transcript[i];
    for (int f = 0; f < fpc; ++f) {
      Tensor frame = (i == 0 && f == 0) ? first : table.Frame(c, rng);
      std::copy(frame.data().begin(), frame.data().end(),
                u.video.data().begin() + (static_cast<size_t>(i) * fpc + f) * row);
    }
    if (c == ' ') continue;
    const double a = amp(rng), phi = phase(rng), w = 2.0 * M_PI * ToneFrequency(c) / spec.sample_rate;
    double *out = u.audio.samples.data() + static_cast<size_t>(i) * spc;
    for (int s = 0; s < spc; ++s) out[s] = a * std::sin(w * s + phi);
  }
  return u;
}

std::vector<Utterance> GenerateCorpus(const CorpusSpec &spec, uint64_t seed,
                                      const std::vector<std::string> &transcripts,
                                      const std::string &split) {
  VisualTable table(spec, seed);
  std::vector<Utterance> out;
  for (size_t i = 0; i < transcripts.size(); ++i) {
    Utterance u = RenderUtterance(spec, table, transcripts[i], MixSeed(seed, 1000 + i));
    char id[32];
    std::snprintf(id, sizeof id, "%s-%04zu", split.c_str(), i);
    u.id = id;
    u.split = split;
    out.push_back(std::move(u));
  }
  return out;
}

std::vector<Utterance> GenerateCorpus(const CorpusSpec &spec, uint64_t seed) {
  spec.Validate();
  std::vector<std::string> lexicon = MakeLexicon(spec, seed);
  std::vector<std::string> sentences =
      MakeSentences(spec, lexicon, spec.num_utterances + spec.heldout_utterances, seed);
  VisualTable table(spec, seed);
  std::vector<Utterance> out;
  for (int i = 0; i < static_cast<int>(sentences.size()); ++i) {
    bool train = i < spec.num_utterances;
    Utterance u = RenderUtterance(spec, table, sentences[i], MixSeed(seed, 1000 + i));
    char id[32];
    std::snprintf(id, sizeof id, "%s-%04d", train ? "train" : "heldout",
                  train ? i : i - spec.num_utterances);
    u.id = id;
    u.split = train ? "train" : "heldout";
    out.push_back(std::move(u));
  }
  return out;
}

Utterance Excerpt(const Utterance &u, const CorpusSpec &spec, int begin, int end) {
  const int n = static_cast<int>(u.transcript.size());
  if (begin < 0 || end > n || begin >= end)
    throw DataError("excerpt: characters [" + std::to_string(begin) + ", " + std::to_string(end) +
                    ") outside a " + std::to_string(n) + "-character utterance");
  const int spc = spec.samples_per_char(), fpc = spec.frames_per_char;
  Utterance e;
  e.id = u.id + ":" + std::to_string(begin) + "-" + std::to_string(end);
  e.transcript = u.transcript.substr(begin, end - begin);
  e.seed = u.seed;
  e.split = u.split;
  e.audio.sample_rate = u.audio.sample_rate;
  e.audio.samples.assign(u.audio.samples.begin() + static_cast<size_t>(begin) * spc,
                         u.audio.samples.begin() + static_cast<size_t>(end) * spc);
  Shape shape = u.video.shape();
  shape[0] = (end - begin) * fpc;
  e.video = Tensor(shape);
  for (int t = 0; t < shape[0]; ++t) CopyRow(u.video, begin * fpc + t, e.video, t);
  return e;
}

// -------------------------------------------------------------- noise ----

double Power(const std::vector<double> &samples) {
  if (samples.empty()) return 0.0;
  double s = 0.0;
  for (double v : samples) s += v * v;
  return s / samples.size();
}

std::vector<Waveform> MakeBabblePool(const CorpusSpec &spec, uint64_t seed, int size, int words) {
  CorpusSpec s = spec;
  s.min_words = s.max_words = words;
  s.max_word_length = std::min(s.max_word_length, CorpusSpec::kMaxTranscript / words - 1);
  s.min_word_length = std::min(s.min_word_length, s.max_word_length);
  VisualTable table(s, seed);
  std::vector<std::string> sentences = MakeSentences(s, MakeLexicon(s, seed), size, MixSeed(seed, 7));
  std::vector<Waveform> pool;
  for (int i = 0; i < size; ++i)
    pool.push_back(RenderUtterance(s, table, sentences[i], MixSeed(seed, 5000 + i)).audio);
  return pool;
}

Waveform MixBabble(const Waveform &clean, double snr_db, const std::vector<Waveform> &pool, Rng &rng) {
  if (std::isinf(snr_db) && snr_db > 0) return clean;
  constexpr int kSources = 20;
  if (pool.size() < kSources)
    throw ConfigError("babble: pool has " + std::to_string(pool.size()) + " waveforms, need 20");
  const double signal = Power(clean.samples);
  if (!(signal > 0.0)) throw DataError("babble: signal is silent, SNR undefined");
  std::vector<size_t> order(pool.size());
  for (size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  const size_t len = clean.samples.size();
  std::vector<double> babble(len, 0.0);
  for (int k = 0; k < kSources; ++k) {
    const std::vector<double> &src = pool[order[k]].samples;
    if (src.empty()) throw DataError("babble: empty pool waveform");
    size_t offset = std::uniform_int_distribution<size_t>(0, src.size() - 1)(rng);
    for (size_t n = 0; n < len; ++n) babble[n] += src[(offset + n) % src.size()];
  }
  const double noise = Power(babble);
  if (!(noise > 0.0)) throw DataError("babble: pool segment is silent");
  const double gain = std::sqrt(signal / std::pow(10.0, snr_db / 10.0) / noise);
  Waveform out = clean;
  for (size_t n = 0; n < len; ++n) out.samples[n] += gain * babble[n];
  return out;
}

Utterance Desync(const Utterance &u, int shift) {
  const int T = u.frames();
  if (std::abs(shift) >= T)
    throw DataError("desync: shift of " + std::to_string(shift) + " frames needs more than " +
                    std::to_string(T) + " frames");
  Utterance out = u;
  for (int t = 0; t < T; ++t) CopyRow(u.video, std::clamp(t - shift, 0, T - 1), out.video, t);
  return out;
}

}  // namespace avsr
