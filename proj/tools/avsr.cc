// tools/avsr.cc

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


// Command-line driver. Exit status: 0 success, 2 configuration error,
// 3 data error, 4 numeric failure, 1 anything else.

#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "avsr/base/error.h"
#include "avsr/base/parallel.h"
#include "avsr/cli/commands.h"

namespace {

constexpr int kExitOther = 1;
constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitNumeric = 4;

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  int workers = 0;

  void Attach(CLI::App *app) {
    app->add_option("-c,--config", config_path, "key = value run configuration");
    app->add_option("--set", overrides, "override one key, e.g. --set train.seed=3");
    app->add_option("--workers", workers, "utterance-level worker threads (default: AVSR_WORKERS or config)");
  }

  avsr::RunConfig Load() const {
    avsr::RunConfig config;
    if (!config_path.empty()) config.Apply(avsr::ReadKeyValueFile(config_path), config_path);
    for (const std::string &kv : overrides) {
      size_t eq = kv.find('=');
      if (eq == std::string::npos) throw avsr::ConfigError("--set expects key=value, got '" + kv + "'");
      config.Set(kv.substr(0, eq), kv.substr(eq + 1));
    }
    config.workers = workers > 0 ? workers : avsr::WorkersFromEnv(config.workers);
    config.Validate();
    return config;
  }
};

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"Audio-visual speech recognition toolkit"};
  app.require_subcommand(1);

  Common gen_common, train_common, decode_common, sweep_common, lm_common;

  std::string gen_out;
  CLI::App *gen = app.add_subcommand("gen", "generate a synthetic corpus");
  gen_common.Attach(gen);
  gen->add_option("-o,--out", gen_out, "corpus directory")->required();

  avsr::TrainOptions train_opts;
  std::string train_arch, train_modalities;
  CLI::App *train = app.add_subcommand("train", "train a model on a corpus");
  train_common.Attach(train);
  train->add_option("--corpus", train_opts.corpus_dir, "corpus directory")->required();
  train->add_option("-o,--out", train_opts.out, "checkpoint to write")->required();
  train->add_option("--resume", train_opts.resume, "checkpoint to continue from");
  train->add_option("--log", train_opts.metrics_log, "per-epoch metrics TSV");
  train->add_option("--arch", train_arch, "ctc or seq2seq (overrides train.architecture)");
  train->add_option("--modalities", train_modalities, "V, A or AV (overrides train.modalities)");
  train->add_flag("--always-noise", train_opts.always_noise, "add babble to every training example");

  avsr::DecodeCommandOptions decode_opts;
  std::string decode_arch, decode_modalities;
  int decode_tta = -1, decode_beam = 0;
  bool decode_greedy = false;
  double decode_snr = 0;
  bool decode_snr_set = false;
  CLI::App *decode = app.add_subcommand("decode", "decode a corpus split with a checkpoint");
  decode_common.Attach(decode);
  decode->add_option("--checkpoint", decode_opts.checkpoint, "model checkpoint")->required();
  decode->add_option("--corpus", decode_opts.corpus_dir, "corpus directory")->required();
  decode->add_option("--split", decode_opts.split, "split tag (default heldout)");
  decode->add_option("--lm", decode_opts.lm_path, "external character LM for shallow fusion");
  decode->add_option("-o,--out", decode_opts.out, "hypotheses file")->required();
  decode->add_option("--arch", decode_arch, "expected architecture");
  decode->add_option("--modalities", decode_modalities, "expected modalities");
  decode->add_option("--tta", decode_tta, "test-time visual transforms");
  decode->add_option("--beam", decode_beam, "beam width");
  decode->add_flag("--greedy", decode_greedy, "greedy decoding");
  decode->add_option("--snr", decode_snr, "test-time babble SNR in dB")->each([&](const std::string &) {
    decode_snr_set = true;
  });

  std::string eval_refs, eval_hyps, eval_prefix;
  CLI::App *eval = app.add_subcommand("eval", "score hypotheses against references");
  eval->add_option("--ref", eval_refs, "reference transcripts (id<TAB>text)")->required();
  eval->add_option("--hyp", eval_hyps, "hypotheses (id<TAB>text[<TAB>score])")->required();
  eval->add_option("-o,--out", eval_prefix, "output prefix for the metric tables");

  avsr::SweepOptions sweep_opts;
  std::string sweep_axis;
  int sweep_finetune = -1;
  CLI::App *sweep = app.add_subcommand("sweep", "WER curve over snr, desync or beam_width");
  sweep_common.Attach(sweep);
  sweep->add_option("--checkpoint", sweep_opts.checkpoint, "model checkpoint")->required();
  sweep->add_option("--corpus", sweep_opts.corpus_dir, "corpus directory")->required();
  sweep->add_option("--split", sweep_opts.split, "split tag (default heldout)");
  sweep->add_option("--lm", sweep_opts.lm_path, "external character LM");
  sweep->add_option("--axis", sweep_axis, "snr, desync or beam_width")->required();
  sweep->add_option("--finetune-epochs", sweep_finetune, "desync: fine-tune on shifted samples first");
  sweep->add_option("-o,--out", sweep_opts.out, "curve TSV")->required();

  std::string lm_corpus, lm_out;
  CLI::App *lm = app.add_subcommand("lm-train", "train the external character LM on corpus text");
  lm_common.Attach(lm);
  lm->add_option("--corpus", lm_corpus, "corpus directory")->required();
  lm->add_option("-o,--out", lm_out, "LM file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (gen->parsed()) {
      avsr::CmdGen(gen_common.Load(), gen_out, std::cerr);
    } else if (train->parsed()) {
      if (!train_arch.empty()) train_common.overrides.push_back("train.architecture=" + train_arch);
      if (!train_modalities.empty()) train_common.overrides.push_back("train.modalities=" + train_modalities);
      avsr::CmdTrain(train_common.Load(), train_opts, std::cerr);
    } else if (decode->parsed()) {
      avsr::RunConfig config = decode_common.Load();
      if (!decode_arch.empty()) decode_opts.architecture = avsr::ParseArchitecture(decode_arch);
      if (!decode_modalities.empty()) decode_opts.modalities = avsr::Modalities::Parse(decode_modalities);
      if (decode_tta >= 0) config.decode.tta = decode_tta;
      if (decode_beam > 0) config.decode.beam_width = decode_beam;
      if (decode_greedy) config.decode.greedy = true;
      if (decode_snr_set) config.decode.snr_db = decode_snr;
      config.Validate();
      avsr::CmdDecode(config, decode_opts, std::cerr);
    } else if (eval->parsed()) {
      avsr::CmdEval(eval_refs, eval_hyps, eval_prefix, std::cout);
    } else if (sweep->parsed()) {
      avsr::RunConfig config = sweep_common.Load();
      sweep_opts.axis = avsr::ParseSweepAxis(sweep_axis);
      if (sweep_finetune >= 0) config.sweep.finetune_epochs = sweep_finetune;
      config.Validate();
      avsr::CmdSweep(config, sweep_opts, std::cerr);
    } else if (lm->parsed()) {
      avsr::CmdLmTrain(lm_common.Load(), lm_corpus, lm_out, std::cerr);
    }
  } catch (const avsr::ConfigError &e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const avsr::DataError &e) {
    std::cerr << "data error: " << e.what() << "\n";
    return kExitData;
  } catch (const avsr::NumericError &e) {
    std::cerr << "numeric error: " << e.what() << "\n";
    return kExitNumeric;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitOther;
  }
  return 0;
}
