// tests/unit/model_test.cc

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
#include <sstream>

#include "doctest.h"

#include "avsr/base/error.h"
#include "avsr/model/av_models.h"
#include "avsr/model/char_lm.h"
#include "avsr/model/vocab.h"
#include "avsr/numerics/adam.h"
#include "avsr/numerics/grad_check.h"
#include "support/toy_models.h"

using namespace avsr;
using testing::GradCheckConfig;
using testing::RandomInput;

namespace {

double RowSumError(const Tensor &probs) {
  double worst = 0.0;
  for (int r = 0; r < probs.rows(); ++r) {
    double s = 0.0;
    for (int c = 0; c < probs.cols(); ++c) s += probs.at(r, c);
    worst = std::max(worst, std::fabs(s - 1.0));
  }
  return worst;
}

Tensor SoftmaxRows(const Tensor &z) {
  Tensor p(z.shape());
  for (int r = 0; r < z.rows(); ++r) {
    double mx = z.at(r, 0), s = 0.0;
    for (int c = 1; c < z.cols(); ++c) mx = std::max(mx, z.at(r, c));
    for (int c = 0; c < z.cols(); ++c) s += (p.at(r, c) = std::exp(z.at(r, c) - mx));
    for (int c = 0; c < z.cols(); ++c) p.at(r, c) /= s;
  }
  return p;
}

}  // namespace

// ------------------------------------------------------------- vocab ----

TEST_CASE("vocab: layout and round trip") {
  CHECK(CharVocab::kSize == 40);
  CHECK(CharVocab::Id('a') == 0);
  CHECK(CharVocab::Id('z') == 25);
  CHECK(CharVocab::Id('0') == 26);
  CHECK(CharVocab::Id(' ') == CharVocab::kSpace);
  CHECK(CharVocab::Id('\'') == CharVocab::kApostrophe);
  std::string s = "it's 42 degrees";
  CHECK(CharVocab::Decode(CharVocab::Encode(s)) == s);
  CHECK(CharVocab::Normalize("  The   Cat ") == "the cat");
  CHECK_THROWS_AS(CharVocab::Id('!'), DataError);
}

// ---------------------------------------------------------------- LM ----

TEST_CASE("lm: bigram on a symmetric corpus is uniform") {
  NgramCharLm lm(2, 0.01, {0, 1});
  lm.TrainIds({{0, 0, 1, 1, 0}, {1, 1, 0, 0, 1}});
  for (const LanguageModel::State &s :
       {lm.Start(), LanguageModel::State{0}, LanguageModel::State{1}})
    for (int c : {0, 1}) CHECK(lm.Score(s, c) == doctest::Approx(-std::log(2.0)).epsilon(1e-14));
}

TEST_CASE("lm: alternating corpus, closed-form count ratio") {
  const double d = 0.01;
  NgramCharLm lm(2, d, {0, 1});
  lm.TrainIds({{0, 1, 0, 1, 0, 1, 0, 1}});  // a->b four times, b->a three times
  CHECK(std::exp(lm.Score({0}, 1)) == doctest::Approx((4 + d) / (4 + 2 * d)).epsilon(1e-14));
  CHECK(std::exp(lm.Score({0}, 0)) == doctest::Approx(d / (4 + 2 * d)).epsilon(1e-14));
  CHECK(std::exp(lm.Score({1}, 0)) == doctest::Approx((3 + d) / (3 + 2 * d)).epsilon(1e-14));
  CHECK(std::exp(lm.Score({0}, 1)) > 0.99);
}

TEST_CASE("lm: every state is normalized over the alphabet") {
  NgramCharLm lm(5);
  lm.Train({"the cat sat", "a cat ate the hat", "that's 12 hats"});
  Rng rng = MakeRng(3);
  std::uniform_int_distribution<size_t> pick(0, lm.alphabet().size() - 1);
  for (int trial = 0; trial < 200; ++trial) {
    LanguageModel::State s = lm.Start(), next;
    int steps = trial % 9;
    for (int i = 0; i < steps; ++i) {
      int c = lm.alphabet()[pick(rng)];
      if (c == CharVocab::kEos) c = CharVocab::kSpace;
      lm.Score(s, c, &next);
      s = next;
    }
    double total = 0.0;
    for (int c : lm.alphabet()) total += std::exp(lm.Score(s, c));
    CHECK(std::fabs(total - 1.0) < 1e-9);
  }
}

TEST_CASE("lm: unknown symbols are rejected") {
  NgramCharLm lm(3, 0.01, {0, 1, CharVocab::kEos});
  CHECK_THROWS_AS(lm.Score(lm.Start(), 2), DataError);
  CHECK_THROWS_AS(lm.Score(lm.Start(), CharVocab::kBlank), DataError);
  CHECK_THROWS_AS(lm.TrainIds({{0, 5}}), DataError);
}

TEST_CASE("lm: text format round trip") {
  NgramCharLm lm(4, 0.05);
  lm.Train({"one two three", "two three four"});
  std::stringstream ss;
  lm.Write(ss);
  NgramCharLm back = NgramCharLm::Read(ss);
  CHECK(back.order() == 4);
  CHECK(back.SentenceLogProb("two three") == lm.SentenceLogProb("two three"));
  CHECK(back.SentenceLogProb("four one") == lm.SentenceLogProb("four one"));
}

// ------------------------------------------------ positional encoding ----

TEST_CASE("positional encoding: position zero and direct table") {
  Tensor pe = PositionalEncoding(17, 8);
  for (int j = 0; j < 8; ++j) CHECK(pe.at(0, j) == (j % 2 == 0 ? 0.0 : 1.0));
  for (int pos = 0; pos <= 16; ++pos)
    for (int i = 0; i < 4; ++i) {
      double freq = std::exp(-std::log(10000.0) * (2.0 * i) / 8.0);
      CHECK(pe.at(pos, 2 * i) == doctest::Approx(std::sin(pos * freq)).epsilon(1e-12));
      CHECK(pe.at(pos, 2 * i + 1) == doctest::Approx(std::cos(pos * freq)).epsilon(1e-12));
    }
  // Column 0 has period 2 pi.
  CHECK(std::sin(2 * M_PI) == doctest::Approx(0.0));
}

// ---------------------------------------------------------- attention ----

namespace {

ParameterSet IdentityAttention(int d) {
  ParameterSet p;
  for (const char *w : {"att/wq", "att/wk", "att/wv"}) p[w] = Tensor::Identity(d);
  return p;
}

}  // namespace

TEST_CASE("attention: a single key gets weight exactly one") {
  ModelConfig c;
  c.d_model = 4;
  c.heads = 2;
  ParameterSet p = IdentityAttention(4);
  Graph g;
  std::vector<NodeId> probes;
  ForwardContext ctx{g, p, c, &probes};
  Tensor q = Tensor::Matrix(3, 4, {1, 2, 3, 4, 5, 6, 7, 8, -1, 0, 2, 1});
  Tensor kv = Tensor::Matrix(1, 4, {0.5, -0.25, 2, 3});
  NodeId out = MultiHeadAttention(ctx, "att", g.Constant(q), g.Constant(kv), {});
  for (NodeId w : probes)
    for (double v : g.value(w).data()) CHECK(v == 1.0);
  for (int r = 0; r < 3; ++r)
    for (int j = 0; j < 4; ++j) CHECK(g.value(out).at(r, j) == kv.at(0, j));
}

TEST_CASE("attention: identity projections on one-hot rows") {
  ModelConfig c;
  c.d_model = 2;
  c.heads = 1;
  ParameterSet p = IdentityAttention(2);
  Graph g;
  std::vector<NodeId> probes;
  ForwardContext ctx{g, p, c, &probes};
  NodeId x = g.Constant(Tensor::Identity(2));
  MultiHeadAttention(ctx, "att", x, x, {});
  // softmax([1, 0] / sqrt 2) on the diagonal.
  double match = 1.0 / (1.0 + std::exp(-1.0 / std::sqrt(2.0)));
  const Tensor &w = g.value(probes.at(0));
  CHECK(w.at(0, 0) == doctest::Approx(match).epsilon(1e-14));
  CHECK(w.at(1, 1) == doctest::Approx(match).epsilon(1e-14));
  CHECK(w.at(0, 1) == doctest::Approx(1 - match).epsilon(1e-14));
  CHECK(match > 0.5);
}

TEST_CASE("attention: rows are normalized and masked keys get zero") {
  ModelConfig c = GradCheckConfig();
  ParameterSet p;
  AddAttentionParameters(&p, "att", c);
  InitializeParameters(&p, 5);
  Rng rng = MakeRng(5);
  for (int trial = 0; trial < 20; ++trial) {
    Graph g;
    std::vector<NodeId> probes;
    ForwardContext ctx{g, p, c, &probes};
    int keys = 1 + trial % 6;
    int valid = 1 + trial % keys;
    NodeId q = g.Constant(RandomNormal({4, 8}, 3.0, rng));
    NodeId k = g.Constant(RandomNormal({keys, 8}, 3.0, rng));
    MultiHeadAttention(ctx, "att", q, k, KeyMask(keys, valid));
    REQUIRE(probes.size() == 2);
    for (NodeId w : probes) {
      CHECK(RowSumError(g.value(w)) < 1e-12);
      for (int r = 0; r < 4; ++r)
        for (int j = valid; j < keys; ++j) CHECK(g.value(w).at(r, j) == 0.0);
    }
  }
}

TEST_CASE("attention: mask of the wrong shape is rejected") {
  ModelConfig c = GradCheckConfig();
  ParameterSet p;
  AddAttentionParameters(&p, "att", c);
  Graph g;
  ForwardContext ctx{g, p, c};
  NodeId x = g.Constant(Tensor({3, 8}));
  CHECK_THROWS_AS(MultiHeadAttention(ctx, "att", x, x, KeyMask(5, 5)), DimensionError);
}

// ------------------------------------------------------------ encoders ----

TEST_CASE("encode: video only leaves audio absent") {
  ModelConfig c = GradCheckConfig();
  ParameterSet p = InitModel(Architecture::kCtc, c, Modalities::Both(), 1);
  Rng rng = MakeRng(6);
  Graph g;
  ForwardContext ctx{g, p, c};
  EncoderOutput enc = Encode(ctx, RandomInput(c, Modalities::Video(), 4, rng));
  CHECK(enc.video.has_value());
  CHECK_FALSE(enc.audio.has_value());
  CHECK(g.value(*enc.video).shape() == Shape{4, 8});
  CHECK_THROWS_AS(Encode(ctx, AvInput{}), ConfigError);
}

TEST_CASE("encode: positional encodings break permutation symmetry") {
  ModelConfig c = GradCheckConfig();
  ParameterSet p = InitModel(Architecture::kCtc, c, Modalities::Video(), 2);
  Rng rng = MakeRng(7);
  AvInput in = RandomInput(c, Modalities::Video(), 3, rng);
  AvInput swapped = in;
  for (int j = 0; j < c.video_dim; ++j) std::swap(swapped.video.at(0, j), swapped.video.at(2, j));
  Tensor a = EncodeValues(p, c, in).video, b = EncodeValues(p, c, swapped).video;
  double diff = 0.0;
  for (int j = 0; j < c.d_model; ++j) diff += std::fabs(a.at(0, j) - b.at(2, j));
  CHECK(diff > 1e-3);
}

TEST_CASE("encode: padded rows do not change valid outputs") {
  ModelConfig c = GradCheckConfig();
  ParameterSet p = InitModel(Architecture::kCtc, c, Modalities::Video(), 3);
  Rng rng = MakeRng(8);
  AvInput in = RandomInput(c, Modalities::Video(), 4, rng);
  AvInput padded = in;
  padded.video = Tensor({7, c.video_dim});
  std::copy(in.video.data().begin(), in.video.data().end(), padded.video.data().begin());
  padded.video_valid = 4;
  Tensor a = EncodeValues(p, c, in).video, b = EncodeValues(p, c, padded).video;
  for (int r = 0; r < 4; ++r)
    for (int j = 0; j < c.d_model; ++j) CHECK(a.at(r, j) == doctest::Approx(b.at(r, j)).epsilon(1e-12));
}

// ------------------------------------------------------------ seq2seq ----

TEST_CASE("seq2seq: untrained model is near uniform") {
  ModelConfig c;  // desk default
  c.video_dim = 16;
  ParameterSet p = InitModel(Architecture::kSeq2Seq, c, Modalities::Video(), 4);
  Rng rng = MakeRng(9);
  Graph g;
  ForwardContext ctx{g, p, c};
  EncoderOutput enc = Encode(ctx, RandomInput(c, Modalities::Video(), 10, rng));
  std::vector<int> input{CharVocab::kSos, 7, 4, 11, 11, 14};
  Tensor probs = SoftmaxRows(g.value(Seq2SeqLogits(ctx, enc, input)));
  double nll = 0.0;
  for (int r = 0; r < probs.rows(); ++r)
    for (int k = 0; k < probs.cols(); ++k) nll -= std::log(probs.at(r, k)) / probs.cols();
  double perplexity = std::exp(nll / probs.rows());
  MESSAGE("untrained perplexity " << perplexity);
  CHECK(perplexity > 0.5 * CharVocab::kSize);
  CHECK(perplexity < 2.0 * CharVocab::kSize);
  CHECK(RowSumError(probs) < 1e-12);
}

TEST_CASE("seq2seq: causal mask hides future targets") {
  ModelConfig c = GradCheckConfig();
  ParameterSet p = InitModel(Architecture::kSeq2Seq, c, Modalities::Both(), 5);
  Rng rng = MakeRng(10);
  AvInput in = RandomInput(c, Modalities::Both(), 5, rng);
  std::vector<int> input{CharVocab::kSos, 1, 2, 3, 4, 5};
  auto logits = [&](const std::vector<int> &ids) {
    Graph g;
    ForwardContext ctx{g, p, c};
    return g.value(Seq2SeqLogits(ctx, Encode(ctx, in), ids));
  };
  Tensor base = logits(input);
  for (int j = 1; j < 6; ++j) {
    std::vector<int> changed = input;
    changed[j] = 20;
    Tensor t = logits(changed);
    for (int r = 0; r < j; ++r)
      for (int k = 0; k < t.cols(); ++k) CHECK(t.at(r, k) == base.at(r, k));
    double diff = 0.0;
    for (int k = 0; k < t.cols(); ++k) diff += std::fabs(t.at(j, k) - base.at(j, k));
    CHECK(diff > 0.0);
  }
}

TEST_CASE("seq2seq: single-modality path is bit-identical to a dedicated model") {
  ModelConfig c = GradCheckConfig();
  ParameterSet av = InitModel(Architecture::kSeq2Seq, c, Modalities::Both(), 6);
  Rng rng = MakeRng(11);
  std::vector<int> input{CharVocab::kSos, 0, 1, 2};
  for (Modalities m : {Modalities::Video(), Modalities::Audio()}) {
    ParameterSet dedicated = testing::Restrict(av, InitModel(Architecture::kSeq2Seq, c, m, 0));
    AvInput in = RandomInput(c, m, 4, rng);
    Graph g1, g2;
    ForwardContext c1{g1, av, c}, c2{g2, dedicated, c};
    CHECK(g1.value(Seq2SeqLogits(c1, Encode(c1, in), input)) ==
          g2.value(Seq2SeqLogits(c2, Encode(c2, in), input)));
  }
}

TEST_CASE("seq2seq: out-of-vocabulary decoder input is rejected") {
  ModelConfig c = GradCheckConfig();
  ParameterSet p = InitModel(Architecture::kSeq2Seq, c, Modalities::Video(), 6);
  Rng rng = MakeRng(12);
  Graph g;
  ForwardContext ctx{g, p, c};
  EncoderOutput enc = Encode(ctx, RandomInput(c, Modalities::Video(), 3, rng));
  CHECK_THROWS_AS(Seq2SeqLogits(ctx, enc, {CharVocab::kSos, 41}), DataError);
  CHECK_THROWS_AS(Seq2SeqLoss(ctx, enc, {CharVocab::kEos}), DataError);
}

// ---------------------------------------------------------------- CTC ----

TEST_CASE("ctc model: rows normalized, one row per frame") {
  ModelConfig c = GradCheckConfig();
  ParameterSet p = InitModel(Architecture::kCtc, c, Modalities::Both(), 7);
  Rng rng = MakeRng(13);
  for (int T : {1, 2, 9}) {
    Tensor post = CtcPosteriors(p, c, RandomInput(c, Modalities::Both(), T, rng));
    CHECK(post.shape() == Shape{T, CharVocab::kSize + 1});
    CHECK(RowSumError(post) < 1e-12);
  }
}

TEST_CASE("ctc model: mismatched stream lengths are rejected") {
  ModelConfig c = GradCheckConfig();
  ParameterSet p = InitModel(Architecture::kCtc, c, Modalities::Both(), 7);
  Rng rng = MakeRng(14);
  AvInput in;
  in.video = testing::RandomFeatures(4, c.video_dim, rng);
  in.audio = testing::RandomFeatures(5, c.audio_dim, rng);
  CHECK_THROWS_AS(CtcPosteriors(p, c, in), DimensionError);
}

TEST_CASE("ctc model: single-modality path is bit-identical to a dedicated model") {
  ModelConfig c = GradCheckConfig();
  ParameterSet av = InitModel(Architecture::kCtc, c, Modalities::Both(), 8);
  Rng rng = MakeRng(15);
  for (Modalities m : {Modalities::Video(), Modalities::Audio()}) {
    ParameterSet dedicated = testing::Restrict(av, InitModel(Architecture::kCtc, c, m, 0));
    AvInput in = RandomInput(c, m, 5, rng);
    CHECK(CtcPosteriors(av, c, in) == CtcPosteriors(dedicated, c, in));
  }
}

// --------------------------------------------------------- grad checks ----

// Larger steps cross ReLU kinks; smaller ones hit roundoff on entries whose
// gradient is near 1e-8.
constexpr double kGradStep = 1e-4;

TEST_CASE("grad check: toy TM-seq2seq, every parameter") {
  ModelConfig c = GradCheckConfig();
  ParameterSet p = InitModel(Architecture::kSeq2Seq, c, Modalities::Both(), 11);
  Rng rng = MakeRng(18);
  AvInput in = RandomInput(c, Modalities::Both(), 6, rng);
  LossBuilder build = [&](Graph &g, const ParameterSet &params) {
    ForwardContext ctx{g, params, c};
    return Seq2SeqLoss(ctx, Encode(ctx, in), {2, 0, 2});
  };
  auto errors = GradCheckAll(build, p, kGradStep, {true, 21});
  CHECK(errors.size() == p.size());
  for (const auto &[name, err] : errors) {
    INFO(name);
    CHECK(err <= 1e-4);
  }
}

TEST_CASE("grad check: toy TM-CTC, every parameter") {
  ModelConfig c = GradCheckConfig();
  ParameterSet p = InitModel(Architecture::kCtc, c, Modalities::Both(), 11);
  Rng rng = MakeRng(18);
  AvInput in = RandomInput(c, Modalities::Both(), 6, rng);
  LossBuilder build = [&](Graph &g, const ParameterSet &params) {
    ForwardContext ctx{g, params, c};
    return CtcLossForward(ctx, Encode(ctx, in), {3, 3, 1});
  };
  auto errors = GradCheckAll(build, p, kGradStep, {true, 21});
  CHECK(errors.size() == p.size());
  for (const auto &[name, err] : errors) {
    INFO(name);
    CHECK(err <= 1e-4);
  }
}

// ------------------------------------------------------ overfit sanity ----

namespace {

ModelConfig OverfitConfig() {
  ModelConfig c;
  c.d_model = 32;
  c.heads = 4;
  c.ff_size = 64;
  c.encoder_layers = 2;
  c.decoder_layers = 2;
  c.dropout = 0.0;
  c.label_smoothing = 0.0;
  c.video_dim = 12;
  c.audio_dim = 12;
  return c;
}

}  // namespace

TEST_CASE("overfit: seq2seq drives one utterance's likelihood to one") {
  ModelConfig c = OverfitConfig();
  ParameterSet p = InitModel(Architecture::kSeq2Seq, c, Modalities::Video(), 11);
  Rng rng = MakeRng(18);
  AvInput in = RandomInput(c, Modalities::Video(), 15, rng);
  std::vector<int> target = CharVocab::Encode("hello");
  AdamState adam;
  adam.learning_rate = 3e-3;
  double loss = 0.0;
  int step = 0;
  for (; step < 500; ++step) {
    Graph g;
    ForwardContext ctx{g, p, c};
    NodeId l = Seq2SeqLoss(ctx, Encode(ctx, in), target);
    loss = g.value(l)[0];
    if (loss < 0.01) break;
    AdamStep(adam, p, g.Backward(l));
  }
  MESSAGE("seq2seq overfit: loss " << loss << " after " << step << " steps");
  CHECK(loss < 0.01);
}

TEST_CASE("overfit: TM-CTC loss below 0.01 on one utterance") {
  ModelConfig c = OverfitConfig();
  ParameterSet p = InitModel(Architecture::kCtc, c, Modalities::Audio(), 12);
  Rng rng = MakeRng(19);
  AvInput in = RandomInput(c, Modalities::Audio(), 15, rng);
  std::vector<int> target = CharVocab::Encode("hello");
  AdamState adam;
  adam.learning_rate = 3e-3;
  double loss = 0.0;
  int step = 0;
  for (; step < 500; ++step) {
    Graph g;
    ForwardContext ctx{g, p, c};
    NodeId l = CtcLossForward(ctx, Encode(ctx, in), target);
    loss = g.value(l)[0];
    if (loss < 0.01) break;
    AdamStep(adam, p, g.Backward(l));
  }
  MESSAGE("ctc overfit: loss " << loss << " after " << step << " steps");
  CHECK(loss < 0.01);
}
