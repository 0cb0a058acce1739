// tests/unit/decoding_test.cc

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

#include <cmath>
#include <map>
#include <sstream>

#include "doctest.h"

#include "avsr/base/error.h"
#include "avsr/decoding/beam.h"
#include "avsr/decoding/posteriors_io.h"
#include "avsr/model/av_models.h"
#include "oracles/ctc_paths.h"
#include "support/toy_models.h"

using namespace avsr;

namespace {

BeamConfig Ctc(int width, double alpha = 0.0, double beta = 0.0) {
  return {DecodeMode::kCtc, width, alpha, beta};
}

BeamConfig S2s(int width, double alpha = 0.0, double beta = 0.0) {
  return {DecodeMode::kSeq2Seq, width, alpha, beta};
}

// Deterministic pseudo-random next-symbol distribution per prefix.
class HashScorer : public NextTokenScorer {
 public:
  HashScorer(int vocab, uint64_t seed, double peak = 1.0) : vocab_(vocab), seed_(seed), peak_(peak) {}

  Tensor NextLogProbs(const std::vector<std::vector<int>> &prefixes) override {
    Tensor out({static_cast<int>(prefixes.size()), vocab_});
    for (size_t b = 0; b < prefixes.size(); ++b) {
      uint64_t key = seed_;
      for (int t : prefixes[b]) key = MixSeed(key, static_cast<uint64_t>(t) + 1);
      Rng rng = MakeRng(key, prefixes[b].size());
      std::normal_distribution<double> n(0.0, peak_);
      std::vector<double> z(vocab_);
      double mx = -1e300, s = 0.0;
      for (double &v : z) mx = std::max(mx, v = n(rng));
      for (double v : z) s += std::exp(v - mx);
      for (int k = 0; k < vocab_; ++k) out.at(b, k) = z[k] - mx - std::log(s);
    }
    ++calls;
    return out;
  }
  int calls = 0;

 private:
  int vocab_;
  uint64_t seed_;
  double peak_;
};

Seq2SeqSymbols Small(int labels) {
  Seq2SeqSymbols s;
  s.eos = labels;
  for (int k = 0; k <= labels; ++k) s.candidates.push_back(k);
  return s;
}

// Best finished hypothesis by exhaustive enumeration up to max_length.
DecodeResult ExhaustiveSeq2Seq(HashScorer &scorer, const Seq2SeqSymbols &sym, int max_length,
                               double beta) {
  DecodeResult best;
  best.score = -1e300;
  std::vector<std::pair<std::vector<int>, double>> frontier{{{}, 0.0}};
  for (int step = 0; step < max_length; ++step) {
    std::vector<std::pair<std::vector<int>, double>> next;
    for (auto &[tokens, lp] : frontier) {
      Tensor s = scorer.NextLogProbs({tokens});
      for (int c : sym.candidates) {
        double total = lp + s.at(0, c);
        if (c == sym.eos) {
          double score = total / LengthPenalty(static_cast<int>(tokens.size()), beta);
          if (BetterHypothesis(score, tokens, best.score, best.tokens)) best = {tokens, score};
        } else {
          auto t = tokens;
          t.push_back(c);
          next.emplace_back(std::move(t), total);
        }
      }
    }
    frontier = std::move(next);
  }
  return best;
}

}  // namespace

// ----------------------------------------------------- length penalty ----

TEST_CASE("length penalty: base identity and closed form") {
  for (double beta : {0.0, 0.1, 0.6, 0.7, 1.0, 2.5, -0.3}) CHECK(LengthPenalty(1, beta) == 1.0);
  CHECK(std::fabs(LengthPenalty(7, 0.6) - std::pow(2.0, 0.6)) < 1e-12);
  CHECK(LengthPenalty(7, 0.6) == doctest::Approx(1.5157).epsilon(1e-4));
  CHECK(LengthPenalty(30, 0.0) == 1.0);
}

TEST_CASE("beam config: defaults and validation") {
  BeamConfig a = BeamConfig::Defaults(DecodeMode::kSeq2Seq, false);
  CHECK(a.width == 6);
  CHECK(a.lm_weight == 0.0);
  CHECK(a.length_penalty == 0.6);
  BeamConfig b = BeamConfig::Defaults(DecodeMode::kSeq2Seq, true);
  CHECK(b.width == 35);
  CHECK(b.lm_weight == 0.1);
  CHECK(b.length_penalty == 0.7);
  BeamConfig c = BeamConfig::Defaults(DecodeMode::kCtc, true);
  CHECK(c.width == 100);
  CHECK(c.lm_weight == 0.5);
  CHECK(c.length_penalty == 0.1);
  CHECK_THROWS_AS(Ctc(0).Validate(), ConfigError);
  CHECK_THROWS_AS(Ctc(5, -1.0).Validate(), ConfigError);
}

// ------------------------------------------------------- CTC decoding ----

TEST_CASE("ctc beam: single peaked frame") {
  Tensor p = Tensor::Matrix(1, 3, {0.9, 0.05, 0.05});  // a, b, blank
  CHECK(CtcPrefixBeam(p, nullptr, Ctc(10), CtcSymbols::Compact(2)).tokens == std::vector<int>{0});
}

TEST_CASE("ctc beam: a repeat without blank collapses") {
  Tensor p = Tensor::Matrix(2, 2, {0.6, 0.4, 0.6, 0.4});
  DecodeResult r = CtcPrefixBeam(p, nullptr, Ctc(10), CtcSymbols::Compact(1));
  CHECK(r.tokens == std::vector<int>{0});
  CHECK(std::exp(r.score) == doctest::Approx(0.84).epsilon(1e-14));
  CHECK(ExactCtcDecode(p).score == doctest::Approx(0.84).epsilon(1e-14));
}

TEST_CASE("ctc beam: unnormalized frames are rejected") {
  Tensor p = Tensor::Matrix(2, 2, {0.6, 0.4, 0.6, 0.40001});
  CHECK_THROWS_AS(CtcPrefixBeam(p, nullptr, Ctc(10), CtcSymbols::Compact(1)), DataError);
  Tensor q = Tensor::Matrix(1, 2, {0.6, 0.4 + 5e-7});
  CHECK_NOTHROW(CtcPrefixBeam(q, nullptr, Ctc(10), CtcSymbols::Compact(1)));
}

TEST_CASE("exact decode: deterministic posteriors give the collapsed argmax path") {
  // a a - b b a with blank index 2
  std::vector<int> path{0, 0, 2, 1, 1, 0};
  Tensor p({6, 3});
  for (int t = 0; t < 6; ++t) p.at(t, path[t]) = 1.0;
  DecodeResult r = ExactCtcDecode(p);
  CHECK(r.tokens == std::vector<int>{0, 1, 0});
  CHECK(r.score == 1.0);
}

TEST_CASE("exact decode: uniform posteriors, one label, two frames") {
  Tensor p = Tensor::Matrix(2, 2, {0.5, 0.5, 0.5, 0.5});
  DecodeResult r = ExactCtcDecode(p);
  // Paths: -- -> "", -a a- aa -> "a".
  CHECK(r.tokens == std::vector<int>{0});
  CHECK(r.score == doctest::Approx(0.75).epsilon(1e-15));
}

TEST_CASE("exact decode: cost guard") {
  CHECK_THROWS_AS(ExactCtcDecode(Tensor({9, 3}, 1.0 / 3)), ConfigError);
  CHECK_THROWS_AS(ExactCtcDecode(Tensor({2, 6}, 1.0 / 6)), ConfigError);
}

TEST_CASE("ctc beam: saturating width matches exact decode on 1000 instances") {
  Rng rng = MakeRng(2024);
  int agree = 0, agree_w100 = 0;
  const int n = 1000;
  for (int i = 0; i < n; ++i) {
    int V = 1 + i % 3, T = 1 + (i / 3) % 6;
    Tensor p = oracle::RandomPosteriors(T, V + 1, rng);
    std::vector<int> exact = ExactCtcDecode(p).tokens;
    agree += CtcPrefixBeam(p, nullptr, Ctc(100000), CtcSymbols::Compact(V)).tokens == exact;
    agree_w100 += CtcPrefixBeam(p, nullptr, Ctc(100), CtcSymbols::Compact(V)).tokens == exact;
  }
  CHECK(agree == n);
  CHECK(agree_w100 >= 990);
}

TEST_CASE("ctc beam: W=200 on |V|=3, T=6 agrees on at least 99%") {
  Rng rng = MakeRng(77);
  int agree = 0;
  for (int i = 0; i < 1000; ++i) {
    Tensor p = oracle::RandomPosteriors(6, 4, rng);
    agree += CtcPrefixBeam(p, nullptr, Ctc(200), CtcSymbols::Compact(3)).tokens ==
             ExactCtcDecode(p).tokens;
  }
  CHECK(agree >= 990);
}

TEST_CASE("ctc beam: full width agrees on every |V|=2, T<=5 seeded instance") {
  for (uint64_t seed = 0; seed < 40; ++seed)
    for (int T = 1; T <= 5; ++T) {
      Rng rng = MakeRng(seed, T);
      Tensor p = oracle::RandomPosteriors(T, 3, rng);
      DecodeResult beam = CtcPrefixBeam(p, nullptr, Ctc(1000), CtcSymbols::Compact(2));
      DecodeResult exact = ExactCtcDecode(p);
      CHECK(beam.tokens == exact.tokens);
      CHECK(std::exp(beam.score) == doctest::Approx(exact.score).epsilon(1e-12));
    }
}

TEST_CASE("ctc beam: deterministic and ties broken lexicographically") {
  Tensor p = Tensor::Matrix(1, 3, {0.4, 0.4, 0.2});
  for (int i = 0; i < 3; ++i)
    CHECK(CtcPrefixBeam(p, nullptr, Ctc(5), CtcSymbols::Compact(2)).tokens == std::vector<int>{0});
  CHECK(ExactCtcDecode(p).tokens == std::vector<int>{0});
}

TEST_CASE("ctc beam: saturating width dominates every narrower beam") {
  // A pruned beam only counts a subset of each prefix's paths, so its score
  // is a lower bound on the exact marginal found at full width.
  Rng rng = MakeRng(31);
  int violations = 0, total = 0;
  for (int i = 0; i < 300; ++i) {
    Tensor p = oracle::RandomPosteriors(7, 4, rng);
    double full = CtcPrefixBeam(p, nullptr, Ctc(100000), CtcSymbols::Compact(3)).score;
    double prev = -1e300;
    for (int w : {1, 2, 4, 8, 16, 32}) {
      double s = CtcPrefixBeam(p, nullptr, Ctc(w), CtcSymbols::Compact(3)).score;
      CHECK(s <= full + 1e-12);
      violations += s < prev - 1e-12;
      ++total;
      prev = s;
    }
  }
  // Doubling W is not guaranteed to raise the score: a wider beam can keep a
  // prefix that displaces an ancestor of the narrow beam's answer.
  MESSAGE("width-doubling score decreases: " << violations << " / " << total);
  CHECK(violations < total / 20);
}

TEST_CASE("ctc beam: LM fusion shifts an ambiguous decision") {
  // Two frames, a and b equally likely in both.
  Tensor p = Tensor::Matrix(2, 3, {0.45, 0.45, 0.1, 0.45, 0.45, 0.1});
  CtcSymbols sym;
  sym.blank = CharVocab::kBlank;
  sym.alphabet = {0, 1};
  Tensor wide({2, CharVocab::kSize + 1});
  for (int t = 0; t < 2; ++t) {
    wide.at(t, 0) = p.at(t, 0);
    wide.at(t, 1) = p.at(t, 1);
    wide.at(t, CharVocab::kBlank) = p.at(t, 2);
  }
  NgramCharLm lm(2, 0.01, {0, 1, CharVocab::kEos});
  lm.TrainIds({{1, 1}, {1}, {1, 0, 1}});
  DecodeResult plain = CtcPrefixBeam(wide, nullptr, Ctc(10), sym);
  DecodeResult fused = CtcPrefixBeam(wide, &lm, Ctc(10, 0.5), sym);
  CHECK(plain.tokens.front() == 0);  // tie -> lexicographic
  CHECK(fused.tokens.front() == 1);
  // alpha = 0 ignores the LM entirely.
  CHECK(CtcPrefixBeam(wide, &lm, Ctc(10, 0.0), sym).tokens == plain.tokens);
}

TEST_CASE("ctc beam: symbols outside the posterior width are rejected") {
  Tensor p = Tensor::Matrix(1, 2, {0.5, 0.5});
  CHECK_THROWS_AS(CtcPrefixBeam(p, nullptr, Ctc(3), CtcSymbols::Compact(3)), DimensionError);
  CHECK_THROWS_AS(CtcPrefixBeam(p, nullptr, S2s(3), CtcSymbols::Compact(1)), ConfigError);
}

// --------------------------------------------------- seq2seq decoding ----

TEST_CASE("seq2seq beam: width one equals greedy") {
  for (uint64_t seed = 0; seed < 50; ++seed) {
    HashScorer a(5, seed), b(5, seed);
    DecodeResult beam = Seq2SeqBeam(a, nullptr, S2s(1, 0.0, 0.6), Small(4), 30);
    DecodeResult greedy = Seq2SeqGreedy(b, Small(4), 30);
    CHECK(beam.tokens == greedy.tokens);
  }
}

TEST_CASE("seq2seq beam: saturating width finds the exhaustive optimum") {
  for (double beta : {0.0, 0.6, 1.0})
    for (uint64_t seed = 0; seed < 20; ++seed) {
      HashScorer a(3, seed, 1.5), b(3, seed, 1.5);
      DecodeResult beam = Seq2SeqBeam(a, nullptr, S2s(10000, 0.0, beta), Small(2), 6);
      DecodeResult best = ExhaustiveSeq2Seq(b, Small(2), 6, beta);
      CHECK(beam.tokens == best.tokens);
      CHECK(beam.score == doctest::Approx(best.score).epsilon(1e-12));
    }
}

TEST_CASE("seq2seq beam: neutral hyperparameters give the plain model score") {
  HashScorer a(4, 3);
  DecodeResult r = Seq2SeqBeam(a, nullptr, S2s(4), Small(3), 20);
  // beta = 0 makes LP = 1, so the score is the summed log-probability.
  HashScorer b(4, 3);
  double total = 0.0;
  std::vector<int> prefix;
  for (int t : r.tokens) {
    total += b.NextLogProbs({prefix}).at(0, t);
    prefix.push_back(t);
  }
  total += b.NextLogProbs({prefix}).at(0, 3);
  CHECK(r.score == doctest::Approx(total).epsilon(1e-13));
}

TEST_CASE("seq2seq beam: early stop and length cap") {
  HashScorer a(6, 9);
  Seq2SeqBeam(a, nullptr, S2s(6, 0.0, 0.6), Small(5), 100);
  CHECK(a.calls <= 100);
  // A scorer that never prefers eos still stops at the cap.
  class NoEos : public NextTokenScorer {
   public:
    Tensor NextLogProbs(const std::vector<std::vector<int>> &prefixes) override {
      Tensor out({static_cast<int>(prefixes.size()), 2});
      for (size_t b = 0; b < prefixes.size(); ++b) {
        out.at(b, 0) = std::log(0.99);
        out.at(b, 1) = std::log(0.01);
      }
      return out;
    }
  } no_eos;
  DecodeResult r = Seq2SeqBeam(no_eos, nullptr, S2s(2), Small(1), 100);
  CHECK(r.tokens.size() <= 100);
}

TEST_CASE("seq2seq beam: LM fusion uses the end symbol") {
  // Model is indifferent; the LM strongly prefers ending after one 'b'.
  class Flat : public NextTokenScorer {
   public:
    Tensor NextLogProbs(const std::vector<std::vector<int>> &prefixes) override {
      return Tensor({static_cast<int>(prefixes.size()), CharVocab::kSize}, -std::log(3.0));
    }
  } flat;
  Seq2SeqSymbols sym;
  sym.eos = CharVocab::kEos;
  sym.candidates = {0, 1, CharVocab::kEos};
  NgramCharLm lm(3, 0.01, {0, 1, CharVocab::kEos});
  lm.TrainIds({{1}, {1}, {1}});
  DecodeResult r = Seq2SeqBeam(flat, &lm, S2s(5, 1.0), sym, 10);
  CHECK(r.tokens == std::vector<int>{1});
}

TEST_CASE("seq2seq beam: model scorer, width one equals greedy") {
  ModelConfig c = testing::GradCheckConfig();
  ParameterSet p = InitModel(Architecture::kSeq2Seq, c, Modalities::Video(), 3);
  Rng rng = MakeRng(4);
  AvInput in = testing::RandomInput(c, Modalities::Video(), 5, rng);
  Seq2SeqScorer a(p, c, {EncodeValues(p, c, in)}), b(p, c, {EncodeValues(p, c, in)});
  Seq2SeqSymbols sym = Seq2SeqSymbols::ForVocab();
  CHECK(Seq2SeqBeam(a, nullptr, S2s(1, 0.0, 0.6), sym, 12).tokens ==
        Seq2SeqGreedy(b, sym, 12).tokens);
}

// ---------------------------------------------------- posterior files ----

TEST_CASE("posteriors: round trip and truncation") {
  Rng rng = MakeRng(5);
  std::vector<Tensor> records{oracle::RandomPosteriors(3, 4, rng), oracle::RandomPosteriors(1, 2, rng)};
  std::stringstream ss;
  for (const Tensor &t : records) WritePosteriors(ss, t);
  std::string bytes = ss.str();
  CHECK(bytes.size() == 2 * 8 + (12 + 2) * 8);
  CHECK(static_cast<unsigned char>(bytes[0]) == 3);  // little-endian frame count
  std::stringstream in(bytes);
  CHECK(ReadPosteriors(in) == records);
  std::stringstream cut(bytes.substr(0, bytes.size() - 3));
  CHECK_THROWS_AS(ReadPosteriors(cut), DataError);
}
