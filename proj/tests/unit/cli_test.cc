// tests/unit/cli_test.cc

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
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "doctest.h"

#include "avsr/base/error.h"
#include "avsr/cli/checkpoint.h"
#include "avsr/cli/commands.h"
#include "avsr/cli/run_config.h"

using namespace avsr;
namespace fs = std::filesystem;

namespace {

fs::path ScratchDir(const std::string &name) {
  fs::path dir = fs::temp_directory_path() / ("avsr_cli_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::vector<TranscriptRecord> Records(const std::vector<std::pair<std::string, std::string>> &rows) {
  std::vector<TranscriptRecord> out;
  for (const auto &[id, text] : rows) out.push_back({id, text, std::nullopt});
  return out;
}

std::string Slurp(const fs::path &path) {
  std::ifstream is(path, std::ios::binary);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

Checkpoint SmallCheckpoint() {
  CorpusSpec spec;
  spec.num_utterances = 8;
  spec.heldout_utterances = 2;
  spec.max_words = 1;
  std::vector<Utterance> train, heldout;
  for (Utterance &u : GenerateCorpus(spec, 1)) (u.split == "train" ? train : heldout).push_back(u);
  TrainConfig tc;
  tc.architecture = Architecture::kSeq2Seq;
  tc.model = ModelConfig::Toy();
  tc.model.encoder_layers = tc.model.decoder_layers = 1;
  tc.max_epochs = 2;
  tc.batch_size = 3;
  tc.noise_prob = 0;
  tc.validation_limit = 0;
  FeaturePipeline pipeline = FeaturePipeline::ForCorpus(spec);
  tc.model.video_dim = pipeline.video_dim(spec);
  tc.model.audio_dim = pipeline.audio_dim();
  Trainer trainer(tc, pipeline, train, heldout, spec);
  trainer.Initialize();
  trainer.Run();
  return Checkpoint::From(trainer);
}

}  // namespace

TEST_CASE("checkpoint: round trip is bit-identical") {
  Checkpoint ckpt = SmallCheckpoint();
  std::stringstream first;
  WriteCheckpoint(first, ckpt);
  Checkpoint back = ReadCheckpoint(first);
  std::stringstream second;
  WriteCheckpoint(second, back);
  CHECK(first.str() == second.str());
  CHECK(back.architecture == ckpt.architecture);
  CHECK(back.state.params == ckpt.state.params);
  CHECK(back.state.adam.first_moment == ckpt.state.adam.first_moment);
  CHECK(back.state.adam.second_moment == ckpt.state.adam.second_moment);
  CHECK(back.state.adam.step == ckpt.state.adam.step);
  CHECK(back.state.epoch == 2);
  CHECK(back.state.step == ckpt.state.step);
  CHECK(back.model.d_model == ckpt.model.d_model);
  CHECK(back.model.encoder_layers == 1);
  CHECK(back.pipeline.audio_group == ckpt.pipeline.audio_group);
}

TEST_CASE("checkpoint: bad magic, other versions and truncation are rejected") {
  Checkpoint ckpt = SmallCheckpoint();
  std::stringstream ss;
  WriteCheckpoint(ss, ckpt);
  const std::string bytes = ss.str();

  std::string wrong_version = bytes;
  wrong_version[8] = static_cast<char>(Checkpoint::kVersion + 1);
  std::istringstream v(wrong_version);
  CHECK_THROWS_AS(ReadCheckpoint(v), DataError);

  std::string wrong_magic = bytes;
  wrong_magic[0] = 'X';
  std::istringstream m(wrong_magic);
  CHECK_THROWS_AS(ReadCheckpoint(m), DataError);

  for (size_t cut : {size_t{4}, size_t{12}, bytes.size() / 2, bytes.size() - 1}) {
    std::istringstream t(bytes.substr(0, cut));
    CHECK_THROWS_AS(ReadCheckpoint(t), DataError);
  }
  CHECK_THROWS_AS(LoadCheckpoint("/nonexistent/model.ckpt"), DataError);
}

TEST_CASE("run config: dump and apply round trip") {
  RunConfig a;
  a.Set("train.architecture", "seq2seq");
  a.Set("train.learning_rate", "0.00025");
  a.Set("decode.snr_db", "-5");
  a.Set("sweep.desync", "-2,0,2");
  a.Set("train.curriculum", "0,4,100");
  RunConfig b;
  b.Apply(a.Dump(), "dump");
  CHECK(b.Dump() == a.Dump());
  CHECK(b.train.architecture == Architecture::kSeq2Seq);
  CHECK(b.train.learning_rate == 0.00025);
  CHECK(b.sweep.desync == std::vector<int>{-2, 0, 2});
  CHECK(std::isinf(RunConfig().decode.snr_db));
}

TEST_CASE("run config: unknown keys and malformed values are rejected") {
  RunConfig c;
  CHECK_THROWS_AS(c.Set("train.learning_rat", "0.1"), ConfigError);
  CHECK_THROWS_AS(c.Set("train.batch_size", "eight"), ConfigError);
  CHECK_THROWS_AS(c.Set("train.modalities", "AVX"), ConfigError);
  CHECK_THROWS_AS(c.Set("sweep.desync", "1,,2"), ConfigError);
  std::istringstream dup("model.heads = 4\nmodel.heads = 8\n");
  CHECK_THROWS_AS(c.Apply(ParseKeyValues(dup, "dup"), "dup"), ConfigError);
  c.Set("model.heads", "5");
  CHECK_THROWS_AS(c.Validate(), ConfigError);
}

TEST_CASE("run config: file with comments loads") {
  fs::path dir = ScratchDir("config");
  std::ofstream(dir / "run.cfg") << "# toy run\ntrain.seed = 3\n\ncorpus.alphabet = abcd  # four letters\n";
  RunConfig c = RunConfig::Load((dir / "run.cfg").string());
  CHECK(c.train.seed == 3);
  CHECK(c.corpus.alphabet == "abcd");
  CHECK_THROWS_AS(RunConfig::Load((dir / "missing.cfg").string()), ConfigError);
}

TEST_CASE("eval: a transcript against itself scores zero") {
  auto refs = Records({{"a", "one two three"}, {"b", "four"}, {"c", "five six"}});
  EvalReport r = Evaluate(refs, refs);
  CHECK(r.wer == 0.0);
  CHECK(r.total.Errors() == 0);
  for (const auto &[w, m] : r.words) CHECK(m.f1.value() == 1.0);
}

TEST_CASE("eval: record order does not matter") {
  auto refs = Records({{"a", "one two three"}, {"b", "four five"}, {"c", "six"}, {"d", "seven eight"}});
  auto hyps = Records({{"a", "one too three"}, {"b", "four"}, {"c", "six six"}, {"d", ""}});
  EvalReport base = Evaluate(refs, hyps);
  std::mt19937 rng(4);
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(refs.begin(), refs.end(), rng);
    std::shuffle(hyps.begin(), hyps.end(), rng);
    EvalReport r = Evaluate(refs, hyps);
    CHECK(r.wer == base.wer);
    REQUIRE(r.utterances.size() == base.utterances.size());
    for (size_t i = 0; i < r.utterances.size(); ++i) CHECK(r.utterances[i].id == base.utterances[i].id);
  }
  CHECK(base.utterances.front().id == "a");
  CHECK(base.wer == doctest::Approx(100.0 * 5 / 8));
}

TEST_CASE("eval: per-word counts satisfy the aggregate identities") {
  auto refs = Records({{"a", "one two three"}, {"b", "four five"}, {"c", "six"}});
  auto hyps = Records({{"a", "one too three three"}, {"b", "five"}, {"c", "seven"}});
  EvalReport r = Evaluate(refs, hyps);
  long tp = 0, fp = 0, fn = 0;
  for (const auto &[w, m] : r.words) {
    tp += m.tp;
    fp += m.fp;
    fn += m.fn;
  }
  CHECK(tp + fp == 6);
  CHECK(tp + fn == 6);
}

TEST_CASE("eval: mismatched id sets are an error") {
  auto refs = Records({{"a", "x"}, {"b", "y"}});
  CHECK_THROWS_AS(Evaluate(refs, Records({{"a", "x"}})), DataError);
  CHECK_THROWS_AS(Evaluate(refs, Records({{"a", "x"}, {"c", "y"}})), DataError);
}

TEST_CASE("eval: decoding-table fixtures") {
  const fs::path dir = fs::path(AVSR_TEST_DATA_DIR) / "decoding_examples";
  std::vector<TranscriptRecord> refs = ReadTranscripts((dir / "ref.tsv").string());
  std::vector<TranscriptRecord> hyps = ReadTranscripts((dir / "hyp.tsv").string());
  std::vector<TranscriptRecord> printed = ReadTranscripts((dir / "printed_wer.tsv").string());
  REQUIRE(refs.size() == 12);
  for (size_t i = 0; i < refs.size(); ++i) {
    EvalReport r = Evaluate({refs[i]}, {hyps[i]});
    const int expected = std::stoi(printed[i].text);
    // The printed value for this row is not an edit distance; 2 edits over 4 words.
    if (refs[i].id == "bombs_a") CHECK(r.wer == 50.0);
    else CHECK_MESSAGE(std::floor(r.wer) == expected, refs[i].id);
  }
}

TEST_CASE("transcripts: scores, comments and duplicates") {
  fs::path dir = ScratchDir("transcripts");
  std::ofstream(dir / "h.tsv") << "# hyps\nb\tfour five\t-1.5\na\t\n";
  std::vector<TranscriptRecord> recs = ReadTranscripts((dir / "h.tsv").string());
  REQUIRE(recs.size() == 2);
  CHECK(recs[0].id == "b");
  CHECK(recs[0].score.value() == -1.5);
  CHECK(recs[1].text.empty());
  CHECK(!recs[1].score.has_value());
  std::ostringstream os;
  WriteTranscripts(os, recs);
  std::ofstream(dir / "round.tsv") << os.str();
  std::vector<TranscriptRecord> back = ReadTranscripts((dir / "round.tsv").string());
  CHECK(back[0].score.value() == -1.5);
  std::ofstream(dir / "dup.tsv") << "a\tx\na\ty\n";
  CHECK_THROWS_AS(ReadTranscripts((dir / "dup.tsv").string()), DataError);
}

TEST_CASE("shifted samples: every utterance at every shift") {
  CorpusSpec spec;
  spec.num_utterances = 3;
  spec.heldout_utterances = 0;
  std::vector<Utterance> utts = GenerateCorpus(spec, 2);
  std::vector<Utterance> shifted = ShiftedSamples(utts, {-2, 0, 2});
  REQUIRE(shifted.size() == 9);
  CHECK(shifted[0].id == utts[0].id + "@-2");
  CHECK(shifted[1].video == utts[0].video);
  CHECK(shifted[2].video.shape() == utts[0].video.shape());
  CHECK(shifted[2].audio.samples == utts[0].audio.samples);
  CHECK(!(shifted[2].video == utts[0].video));
}

TEST_CASE("test noise: seeded, audio only, and absent at infinite SNR") {
  CorpusSpec spec;
  spec.num_utterances = 4;
  spec.heldout_utterances = 0;
  RunConfig config;
  std::vector<Utterance> utts = GenerateCorpus(spec, 2);
  std::vector<Utterance> a = WithTestNoise(utts, spec, config, 0.0);
  std::vector<Utterance> b = WithTestNoise(utts, spec, config, 0.0);
  std::vector<Utterance> clean = WithTestNoise(utts, spec, config, kCleanSnr);
  for (size_t i = 0; i < utts.size(); ++i) {
    CHECK(a[i].audio.samples == b[i].audio.samples);
    CHECK(a[i].audio.samples != utts[i].audio.samples);
    CHECK(a[i].video == utts[i].video);
    CHECK(clean[i].audio.samples == utts[i].audio.samples);
  }
}

TEST_CASE("commands: image corpus runs pretrain, frozen and end-to-end phases") {
  fs::path dir = ScratchDir("stages");
  RunConfig config;
  config.Set("corpus.visual", "images");
  config.Set("corpus.num_utterances", "8");
  config.Set("corpus.heldout_utterances", "2");
  config.Set("corpus.max_words", "1");
  config.Set("corpus.lexicon_size", "4");
  config.Set("pretrain.epochs", "2");
  config.Set("pretrain.clips_per_word", "2");
  config.Set("train.modalities", "V");
  config.Set("train.max_epochs", "1");
  config.Set("train.end_to_end_epochs", "1");
  config.Set("train.validation_limit", "0");
  config.Set("model.encoder_layers", "1");
  config.Validate();
  std::ostringstream log;
  CmdGen(config, (dir / "corpus").string(), log);
  TrainOptions opts;
  opts.corpus_dir = (dir / "corpus").string();
  opts.out = (dir / "model.ckpt").string();
  opts.metrics_log = (dir / "metrics.tsv").string();
  CmdTrain(config, opts, log);
  const std::string text = log.str();
  const size_t pre = text.find("pretrain:"), frozen = text.find("frozen epoch 0"),
               e2e = text.find("end_to_end epoch 1");
  REQUIRE(pre != std::string::npos);
  REQUIRE(frozen != std::string::npos);
  REQUIRE(e2e != std::string::npos);
  CHECK(pre < frozen);
  CHECK(frozen < e2e);

  Checkpoint ckpt = LoadCheckpoint(opts.out);
  CHECK(ckpt.state.epoch == 2);
  CHECK(ckpt.state.params.count("fe/stem/w") == 1);
  CHECK(ckpt.state.adam.first_moment.count("fe/stem/w") == 1);
  CHECK(Slurp(dir / "metrics.tsv").find("end_to_end") != std::string::npos);

  DecodeCommandOptions d;
  d.checkpoint = opts.out;
  d.corpus_dir = opts.corpus_dir;
  d.out = (dir / "hyp.tsv").string();
  CmdDecode(config, d, log);
  CHECK(ReadTranscripts(d.out).size() == 2);
  d.modalities = Modalities::Both();
  CHECK_THROWS_AS(CmdDecode(config, d, log), ConfigError);
}
