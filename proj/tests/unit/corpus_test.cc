// tests/unit/corpus_test.cc

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
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "doctest.h"

#include "avsr/base/error.h"
#include "avsr/base/key_value.h"
#include "avsr/corpus/augment.h"
#include "avsr/corpus/curriculum.h"
#include "avsr/corpus/manifest.h"
#include "avsr/corpus/synth.h"
#include "avsr/corpus/word_pretrain.h"
#include "avsr/features/audio.h"
#include "avsr/numerics/tensor_io.h"

using namespace avsr;

namespace {

int PeakBin(const Tensor &spec, int row) {
  int best = 0;
  for (int k = 1; k < spec.cols(); ++k)
    if (spec.at(row, k) > spec.at(row, best)) best = k;
  return best;
}

std::multiset<std::string> Words(const std::string &text) {
  std::multiset<std::string> out;
  std::istringstream ss(text);
  for (std::string w; ss >> w;) out.insert(w);
  return out;
}

std::filesystem::path TempDir(const std::string &name) {
  auto dir = std::filesystem::temp_directory_path() / ("avsr_corpus_test_" + name);
  std::filesystem::remove_all(dir);
  return dir;
}

}  // namespace

TEST_CASE("single character renders three frames and a 200 Hz tone") {
  CorpusSpec spec;
  VisualTable table(spec, 4);
  Utterance u = RenderUtterance(spec, table, "a", 9);
  CHECK(u.frames() == 3);
  CHECK(u.video.shape() == Shape{3, spec.visual_dim});
  CHECK(u.audio.samples.size() == 1920u);
  CHECK(ToneFrequency('a') == 200.0);
  Tensor s = StftMagnitudes(u.audio);
  CHECK(PeakBin(s, s.rows() / 2) == 8);  // 200 Hz / 25 Hz per bin
}

TEST_CASE("every character owns a distinct spectral peak") {
  CorpusSpec spec;
  spec.alphabet = "abcdefghijklmnopqrstuvwxyz0123456789'";
  VisualTable table(spec, 4);
  std::set<int> bins;
  for (char c : spec.alphabet) {
    Utterance u = RenderUtterance(spec, table, std::string(1, c), 3);
    Tensor s = StftMagnitudes(u.audio);
    bins.insert(PeakBin(s, s.rows() / 2));
  }
  CHECK(bins.size() == spec.alphabet.size());
}

TEST_CASE("space is silent with the neutral mouth") {
  CorpusSpec spec;
  VisualTable table(spec, 4);
  Utterance u = RenderUtterance(spec, table, "a b", 2);
  CHECK(u.frames() == 9);
  for (int n = 1920; n < 3840; ++n) REQUIRE(u.audio.samples[n] == 0.0);
}

TEST_CASE("generation is a pure function of spec and seed") {
  CorpusSpec spec;
  spec.num_utterances = 5;
  spec.heldout_utterances = 2;
  auto a = GenerateCorpus(spec, 17), b = GenerateCorpus(spec, 17), c = GenerateCorpus(spec, 18);
  REQUIRE(a.size() == 7u);
  for (size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].transcript == b[i].transcript);
    CHECK(a[i].audio.samples == b[i].audio.samples);
    CHECK(a[i].video == b[i].video);
  }
  CHECK(a[0].id == "train-0000");
  CHECK(a[5].id == "heldout-0000");
  CHECK(a[5].split == "heldout");
  bool differs = false;
  for (size_t i = 0; i < a.size(); ++i) differs |= a[i].audio.samples != c[i].audio.samples;
  CHECK(differs);
}

TEST_CASE("viseme groups share prototypes up to the distinct offset") {
  CorpusSpec spec;
  VisualTable table(spec, 5);
  CHECK(table.viseme('a') == table.viseme('b'));
  CHECK(table.viseme('a') != table.viseme('c'));
  auto dist = [&](char x, char y) {
    Tensor p = table.Prototype(x), q = table.Prototype(y);
    double d = 0;
    for (size_t i = 0; i < p.size(); ++i) d += (p[i] - q[i]) * (p[i] - q[i]);
    return std::sqrt(d);
  };
  CHECK(dist('a', 'b') < dist('a', 'c'));
  CHECK(dist('c', 'd') < dist('c', 'e'));
}

TEST_CASE("image mode renders square grayscale frames") {
  CorpusSpec spec;
  spec.visual = VisualMode::kImages;
  VisualTable table(spec, 6);
  Utterance u = RenderUtterance(spec, table, "ab", 1);
  CHECK(u.video.shape() == Shape{6, 32, 32, 1});
  for (double v : u.video.data()) REQUIRE((v >= 0.0 && v <= 1.0));
}

TEST_CASE("over-long and out-of-alphabet transcripts are rejected") {
  CorpusSpec spec;
  VisualTable table(spec, 1);
  CHECK_THROWS_AS(RenderUtterance(spec, table, std::string(101, 'a'), 1), DataError);
  CHECK_NOTHROW(RenderUtterance(spec, table, std::string(100, 'a'), 1));
  CHECK_THROWS_AS(RenderUtterance(spec, table, "xyz", 1), DataError);
}

TEST_CASE("babble mixing hits the requested SNR") {
  CorpusSpec spec;
  auto pool = MakeBabblePool(spec, 3);
  REQUIRE(pool.size() == 20u);
  VisualTable table(spec, 3);
  Utterance u = RenderUtterance(spec, table, "abc de fgh", 3);
  for (double snr : {0.0, 5.0, -5.0, 20.0}) {
    Rng rng = MakeRng(11, static_cast<uint64_t>(snr + 100));
    Waveform noisy = MixBabble(u.audio, snr, pool, rng);
    std::vector<double> noise(noisy.samples.size());
    for (size_t n = 0; n < noise.size(); ++n) noise[n] = noisy.samples[n] - u.audio.samples[n];
    double measured = 10.0 * std::log10(Power(u.audio.samples) / Power(noise));
    CHECK(std::abs(measured - snr) < 0.01);
    if (snr == 0.0) CHECK(std::abs(Power(noise) / Power(u.audio.samples) - 1.0) < 1e-6);
  }
  Rng rng(1);
  CHECK(MixBabble(u.audio, kCleanSnr, pool, rng).samples == u.audio.samples);
  std::vector<Waveform> small(pool.begin(), pool.begin() + 19);
  CHECK_THROWS_AS(MixBabble(u.audio, 0.0, small, rng), ConfigError);
  Waveform silent = u.audio;
  std::fill(silent.samples.begin(), silent.samples.end(), 0.0);
  CHECK_THROWS_AS(MixBabble(silent, 0.0, pool, rng), DataError);
}

TEST_CASE("desync shifts video only and inverts on the interior") {
  CorpusSpec spec;
  VisualTable table(spec, 2);
  Utterance u = RenderUtterance(spec, table, "abcd efg", 8);
  const int T = u.frames();
  for (int s : {1, 3, -2}) {
    Utterance d = Desync(u, s);
    CHECK(d.audio.samples == u.audio.samples);
    CHECK(d.transcript == u.transcript);
    Utterance back = Desync(d, -s);
    for (int t = std::abs(s); t < T - std::abs(s); ++t)
      for (int k = 0; k < spec.visual_dim; ++k) REQUIRE(back.video.at(t, k) == u.video.at(t, k));
    if (s > 0)
      for (int k = 0; k < spec.visual_dim; ++k) CHECK(d.video.at(s, k) == u.video.at(0, k));
  }
  CHECK(Desync(u, 0).video == u.video);
  CHECK_THROWS_AS(Desync(u, T), DataError);
}

TEST_CASE("excerpts cut at character boundaries") {
  CorpusSpec spec;
  VisualTable table(spec, 2);
  Utterance u = RenderUtterance(spec, table, "ab cde", 8);
  Utterance e = Excerpt(u, spec, 3, 6);
  CHECK(e.transcript == "cde");
  CHECK(e.frames() == 9);
  CHECK(e.audio.samples.size() == 3u * 1920u);
  CHECK(e.audio.samples[0] == u.audio.samples[3 * 1920]);
  CHECK(e.video.at(0, 0) == u.video.at(9, 0));
}

TEST_CASE("curriculum schedules double up to full length") {
  CurriculumSchedule s = CurriculumSchedule::Doubling(8, 100);
  CHECK(s.caps() == std::vector<int>{0, 8, 16, 32, 64, 100});
  CHECK(s.single_words(0));
  CHECK(CurriculumSchedule::Parse("0,8,100").caps() == std::vector<int>{0, 8, 100});
  CHECK(CurriculumSchedule::Parse(s.ToString()).caps() == s.caps());
  CHECK_THROWS_AS(CurriculumSchedule::Parse("8,4"), ConfigError);
  CHECK_THROWS_AS(CurriculumSchedule::Parse("8,x"), ConfigError);
}

TEST_CASE("excerpt spans partition the words of every sentence") {
  CorpusSpec spec;
  spec.num_utterances = 40;
  spec.heldout_utterances = 0;
  auto corpus = GenerateCorpus(spec, 21);
  for (int cap : {0, 4, 8, 16, 100}) {
    auto examples = StageExamples(corpus, spec, cap);
    std::multiset<std::string> got, want;
    for (const auto &u : corpus) {
      auto w = Words(u.transcript);
      want.insert(w.begin(), w.end());
    }
    for (const auto &e : examples) {
      auto w = Words(e.transcript);
      got.insert(w.begin(), w.end());
      if (cap == 0) CHECK(w.size() == 1u);
      if (cap > 0 && w.size() > 1) CHECK(static_cast<int>(e.transcript.size()) <= cap);
      CHECK(e.frames() == static_cast<int>(e.transcript.size()) * spec.frames_per_char);
    }
    CHECK(got == want);
    int pad = StagePadFrames(examples, spec, cap);
    for (const auto &e : examples) CHECK(e.frames() <= pad);
  }
  auto spans = ExcerptSpans("ab cd efgh", 5);
  CHECK(spans == std::vector<std::pair<int, int>>{{0, 5}, {6, 10}});
}

TEST_CASE("augmentation transforms") {
  Tensor clip({3, 4, 4, 1});
  for (size_t i = 0; i < clip.size(); ++i) clip[i] = static_cast<double>(i);
  Tensor f = HorizontalFlip(clip);
  CHECK(f[0] == clip[3]);
  CHECK(HorizontalFlip(f) == clip);
  Tensor s = SpatialShift(clip, 0, 1);
  CHECK(s[1] == clip[0]);
  CHECK(s[0] == clip[0]);
  Tensor t = TemporalShift(clip, 1);
  CHECK(t.RowSlice(16, 16) == clip.RowSlice(0, 16));
  CHECK(TemporalShift(clip, 0) == clip);
  Tensor d = DropFrames(clip, {true, false, true});
  CHECK(d.dim(0) == 2);
  CHECK_THROWS_AS(DropFrames(clip, {false, false, false}), DataError);

  Rng rng(3);
  CHECK(AugmentClip(clip, AugmentConfig::None(), rng) == clip);
  AugmentConfig drop_all = AugmentConfig::None();
  drop_all.frame_drop_prob = 1.0;
  for (int i = 0; i < 20; ++i) CHECK(AugmentClip(clip, drop_all, rng).dim(0) == 1);
  AugmentConfig full;
  for (int i = 0; i < 20; ++i) {
    Tensor a = AugmentClip(clip, full, rng);
    CHECK(a.dim(0) >= 1);
    CHECK(a.dim(1) == 4);
  }
}

TEST_CASE("key value files reject unknown and malformed keys") {
  std::istringstream in("# comment\nalphabet = abc\nlexicon_size = 7  # trailing\n\nvisual = images\n");
  KeyValues kv = ParseKeyValues(in, "t");
  CorpusSpec spec;
  BindCorpusSpec(&spec).Apply(kv);
  CHECK(spec.alphabet == "abc");
  CHECK(spec.lexicon_size == 7);
  CHECK(spec.visual == VisualMode::kImages);
  CHECK_THROWS_AS(BindCorpusSpec(&spec).Apply({{"bogus", "1"}}), ConfigError);
  CHECK_THROWS_AS(BindCorpusSpec(&spec).Apply({{"lexicon_size", "7x"}}), ConfigError);
  std::istringstream dup("a = 1\na = 2\n");
  CHECK_THROWS_AS(ParseKeyValues(dup, "t"), ConfigError);
  CHECK(ParseDouble(FormatDouble(0.1), "x") == 0.1);
  CHECK(std::isinf(ParseDouble("inf", "x")));
}

TEST_CASE("tensor blobs round trip bit-exactly") {
  Rng rng(5);
  Tensor t = RandomNormal({2, 3, 4}, 1.0, rng);
  std::stringstream ss;
  WriteTensor(ss, t);
  CHECK(ReadTensor(ss) == t);
  std::stringstream bad("\x01\x00");
  CHECK_THROWS_AS(ReadTensor(bad), DataError);
  ParameterSet m{{"b", t}, {"a", Tensor::Scalar(2.0)}};
  std::stringstream ms;
  WriteTensorMap(ms, m);
  CHECK(ReadTensorMap(ms) == m);
}

TEST_CASE("manifest round trip with content-addressed blobs") {
  CorpusSpec spec;
  spec.num_utterances = 3;
  spec.heldout_utterances = 2;
  CorpusIndex corpus{spec, 31, GenerateCorpus(spec, 31)};
  auto dir = TempDir("manifest");
  WriteCorpus(dir.string(), corpus);
  CorpusIndex back = ReadCorpus(dir.string());
  CHECK(back.seed == 31u);
  CHECK(back.spec.lexicon_size == spec.lexicon_size);
  REQUIRE(back.utterances.size() == 5u);
  for (size_t i = 0; i < 5; ++i) {
    const auto &a = corpus.utterances[i], &b = back.utterances[i];
    CHECK(a.id == b.id);
    CHECK(a.transcript == b.transcript);
    CHECK(a.split == b.split);
    CHECK(a.seed == b.seed);
    CHECK(a.video == b.video);
    REQUIRE(a.audio.samples.size() == b.audio.samples.size());
    double worst = 0;
    for (size_t n = 0; n < a.audio.samples.size(); ++n)
      worst = std::max(worst, std::abs(a.audio.samples[n] - b.audio.samples[n]));
    CHECK(worst <= 1.0 / 32767);
  }
  CHECK(SelectSplit(back.utterances, "heldout").size() == 2u);
  CHECK(ContentDigest("") == "cbf29ce484222325");

  for (const auto &entry : std::filesystem::directory_iterator(dir / "blobs")) {
    std::ofstream(entry.path(), std::ios::app) << "x";
    break;
  }
  CHECK_THROWS_AS(ReadCorpus(dir.string()), DataError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("word classifier pretraining separates two words") {
  CorpusSpec spec;
  spec.visual = VisualMode::kImages;
  spec.visual_jitter = 0.3;
  std::vector<std::string> words;
  for (int i = 0; i < 6; ++i) {
    words.push_back("ace");
    words.push_back("hjg");
  }
  auto clips = GenerateCorpus(spec, 41, words);
  WordPretrainConfig config;
  config.epochs = 15;
  config.learning_rate = 3e-3;
  config.augment = AugmentConfig::None();
  config.stop_at_perfect = false;
  WordPretrainResult r = PretrainWordClassifier(clips, config);
  CHECK(r.classes == std::vector<std::string>{"ace", "hjg"});
  CHECK(r.train_accuracy == 1.0);
  Utterance f = WithFrontendFeatures(clips[0], r.params, config.frontend);
  CHECK(f.video.shape() == Shape{9, config.frontend.output_dim()});

  std::vector<Utterance> one(clips.begin(), clips.begin() + 1);
  CHECK_THROWS_AS(PretrainWordClassifier(one, config), DataError);
}
