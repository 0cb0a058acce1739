// cli/commands.cc

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


#include "avsr/cli/commands.h"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include "avsr/base/error.h"
#include "avsr/base/parallel.h"
#include "avsr/numerics/tensor_io.h"

namespace avsr {

namespace {

std::ofstream OpenOut(const std::string &path) {
  std::ofstream os(path);
  if (!os) throw DataError("cannot write " + path);
  return os;
}

std::string Fixed(double v, int digits = 2) {
  std::ostringstream ss;
  ss << std::fixed << std::setprecision(digits) << v;
  return ss.str();
}

std::string Optional(const std::optional<double> &v) { return v ? Fixed(*v, 4) : "-"; }

void LogConfig(std::ostream &log, const RunConfig &config) {
  for (const auto &[k, v] : config.Dump()) log << "# " << k << " = " << v << "\n";
}

CorpusIndex LoadCorpusFor(RunConfig *config, const std::string &dir) {
  CorpusIndex corpus = ReadCorpus(dir);
  config->corpus = corpus.spec;
  config->corpus_seed = corpus.seed;
  config->Validate();
  return corpus;
}

const LanguageModel *MaybeLm(const std::string &path, std::optional<NgramCharLm> *holder) {
  if (path.empty()) return nullptr;
  if (!std::filesystem::exists(path)) throw DataError("external LM requested but " + path + " does not exist");
  holder->emplace(NgramCharLm::Load(path));
  return &**holder;
}

RecognizeOptions DecodeOptionsFor(const RunConfig &config, Architecture arch, const LanguageModel *lm) {
  RecognizeOptions o;
  o.greedy = config.decode.greedy;
  o.beam = config.decode.Beam(arch, lm != nullptr);
  o.lm = lm;
  o.tta_transforms = config.decode.tta;
  o.tta_seed = config.decode.tta_seed;
  return o;
}

std::vector<TranscriptRecord> References(const std::vector<Utterance> &utterances) {
  std::vector<TranscriptRecord> out;
  for (const Utterance &u : utterances) out.push_back({u.id, u.transcript, std::nullopt});
  return out;
}

std::vector<TranscriptRecord> HypothesisRecords(const std::vector<Utterance> &utterances,
                                                const std::vector<Hypothesis> &hyps) {
  std::vector<TranscriptRecord> out;
  for (size_t i = 0; i < hyps.size(); ++i) out.push_back({utterances[i].id, hyps[i].text, hyps[i].score});
  return out;
}

}  // namespace

// ---------------------------------------------------------- transcripts ----

std::vector<TranscriptRecord> ReadTranscripts(const std::string &path) {
  std::ifstream is(path);
  if (!is) throw DataError("cannot open " + path);
  std::vector<TranscriptRecord> out;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const std::string where = path + ":" + std::to_string(lineno);
    size_t tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) throw DataError(where + ": expected id<TAB>text");
    TranscriptRecord r;
    r.id = line.substr(0, tab);
    std::string rest = line.substr(tab + 1);
    if (size_t tab2 = rest.find('\t'); tab2 != std::string::npos) {
      try {
        r.score = ParseDouble(rest.substr(tab2 + 1), "score");
      } catch (const ConfigError &e) {
        throw DataError(where + ": " + e.what());
      }
      rest.resize(tab2);
    }
    r.text = rest;
    if (!seen.insert(r.id).second) throw DataError(where + ": duplicate id " + r.id);
    out.push_back(std::move(r));
  }
  return out;
}

void WriteTranscripts(std::ostream &os, const std::vector<TranscriptRecord> &records) {
  for (const TranscriptRecord &r : records) {
    os << r.id << '\t' << r.text;
    if (r.score) os << '\t' << FormatDouble(*r.score);
    os << '\n';
  }
}

// ----------------------------------------------------------------- eval ----

EvalReport Evaluate(const std::vector<TranscriptRecord> &refs, const std::vector<TranscriptRecord> &hyps,
                    int min_bucket_samples) {
  std::map<std::string, const TranscriptRecord *> by_id;
  for (const TranscriptRecord &h : hyps) by_id[h.id] = &h;
  std::map<std::string, const TranscriptRecord *> ref_by_id;
  for (const TranscriptRecord &r : refs) {
    if (!by_id.count(r.id)) throw DataError("eval: no hypothesis for id " + r.id);
    ref_by_id[r.id] = &r;
  }
  for (const TranscriptRecord &h : hyps)
    if (!ref_by_id.count(h.id)) throw DataError("eval: hypothesis id " + h.id + " has no reference");
  if (refs.empty()) throw DataError("eval: no references");

  EvalReport report;
  std::vector<std::pair<Words, Words>> pairs;
  for (const auto &[id, ref] : ref_by_id) {
    Words r = NormalizeWords(ref->text), h = NormalizeWords(by_id[id]->text);
    if (r.empty()) throw DataError("eval: empty reference for id " + id);
    EditOps ops = Align(r, h);
    report.total += ops;
    report.utterances.push_back({id, ops});
    pairs.emplace_back(std::move(r), std::move(h));
  }
  report.wer = Wer(report.total);
  report.words = PerWordMeasures(report.total);
  report.lengths = WerByLength(pairs, min_bucket_samples);

  long tp = 0, fp = 0, fn = 0;
  for (const auto &[w, m] : report.words) {
    tp += m.tp;
    fp += m.fp;
    fn += m.fn;
  }
  if (tp + fp != report.total.hypothesis_words || tp + fn != report.total.N)
    throw NumericError("eval: per-word counts violate TP+FP = hypothesis words or TP+FN = reference words");
  return report;
}

void WriteEvalSummary(std::ostream &os, const EvalReport &r) {
  long tp = 0, fp = 0, fn = 0;
  for (const auto &[w, m] : r.words) {
    tp += m.tp;
    fp += m.fp;
    fn += m.fn;
  }
  os << "wer\tutterances\tref_words\thyp_words\tsub\tdel\tins\tsum_tp\tsum_fp\tsum_fn\n";
  os << Fixed(r.wer) << '\t' << r.utterances.size() << '\t' << r.total.N << '\t' << r.total.hypothesis_words
     << '\t' << r.total.S << '\t' << r.total.D << '\t' << r.total.I << '\t' << tp << '\t' << fp << '\t' << fn
     << '\n';
}

void WriteWordTable(std::ostream &os, const EvalReport &r) {
  os << "word\ttp\tfp\tfn\tprecision\trecall\tf1\n";
  for (const auto &[w, m] : r.words)
    os << w << '\t' << m.tp << '\t' << m.fp << '\t' << m.fn << '\t' << Optional(m.precision) << '\t'
       << Optional(m.recall) << '\t' << Optional(m.f1) << '\n';
}

void WriteLengthTable(std::ostream &os, const EvalReport &r) {
  os << "words\tsamples\twer\n";
  for (const LengthBucket &b : r.lengths) os << b.words << '\t' << b.samples << '\t' << Fixed(b.wer) << '\n';
}

void WriteUtteranceTable(std::ostream &os, const EvalReport &r) {
  os << "id\tref_words\tsub\tdel\tins\twer\n";
  for (const auto &row : r.utterances)
    os << row.id << '\t' << row.ops.N << '\t' << row.ops.S << '\t' << row.ops.D << '\t' << row.ops.I << '\t'
       << Fixed(Wer(row.ops)) << '\n';
}

// ------------------------------------------------------------- helpers ----

std::vector<Utterance> WithTestNoise(const std::vector<Utterance> &utterances, const CorpusSpec &spec,
                                     const RunConfig &config, double snr_db) {
  if (std::isinf(snr_db) && snr_db > 0) return utterances;
  std::vector<Waveform> pool = MakeBabblePool(spec, MixSeed(config.babble_seed, 1), config.babble_pool);
  std::vector<Utterance> out = utterances;
  for (size_t i = 0; i < out.size(); ++i) {
    Rng rng = MakeRng(config.decode.noise_seed, i);
    out[i].audio = MixBabble(out[i].audio, snr_db, pool, rng);
  }
  return out;
}

std::vector<Utterance> ShiftedSamples(const std::vector<Utterance> &utterances, const std::vector<int> &shifts) {
  std::vector<Utterance> out;
  for (const Utterance &u : utterances)
    for (int k : shifts) {
      int limit = u.frames() - 1;
      Utterance s = Desync(u, std::clamp(k, -limit, limit));
      s.id = u.id + "@" + std::to_string(k);
      out.push_back(std::move(s));
    }
  return out;
}

Checkpoint FinetuneOnShifted(const Checkpoint &ckpt, const RunConfig &config, const CorpusSpec &spec,
                             const std::vector<Utterance> &train, const std::vector<int> &shifts, int epochs) {
  TrainConfig tc = config.train;
  tc.architecture = ckpt.architecture;
  tc.modalities = ckpt.modalities();
  tc.model = ckpt.model;
  tc.curriculum = CurriculumSchedule::FullLength();
  tc.max_epochs = ckpt.state.epoch + epochs;
  tc.max_desync = 0;
  tc.validation_limit = 0;
  tc.end_to_end = false;
  Trainer trainer(tc, ckpt.pipeline, ShiftedSamples(train, shifts), {}, spec,
                  MakeBabblePool(spec, config.babble_seed, config.babble_pool), ckpt.state.params);
  TrainState state = ckpt.state;
  state.stage = 0;
  trainer.Resume(std::move(state));
  trainer.Run();
  return Checkpoint::From(trainer);
}

NgramCharLm TrainCorpusLm(const std::vector<Utterance> &train, const LmSettings &settings) {
  NgramCharLm lm(settings.order, settings.delta);
  std::vector<std::string> text;
  for (const Utterance &u : train) text.push_back(u.transcript);
  lm.Train(text);
  return lm;
}

// ------------------------------------------------------------- commands ----

void CmdGen(const RunConfig &config, const std::string &out_dir, std::ostream &log) {
  config.Validate();
  CorpusIndex corpus{config.corpus, config.corpus_seed, GenerateCorpus(config.corpus, config.corpus_seed)};
  WriteCorpus(out_dir, corpus);
  log << "wrote " << corpus.utterances.size() << " utterances to " << out_dir << " (seed "
      << config.corpus_seed << ")\n";
}

void CmdTrain(const RunConfig &base, const TrainOptions &options, std::ostream &log) {
  RunConfig config = base;
  CorpusIndex corpus = LoadCorpusFor(&config, options.corpus_dir);
  TrainConfig tc = config.train;
  tc.model = config.ResolvedModel();
  if (options.always_noise) tc.noise_prob = 1.0;
  tc.Validate();
  const CorpusSpec &spec = corpus.spec;
  std::vector<Utterance> train = SelectSplit(corpus.utterances, "train");
  std::vector<Utterance> heldout = SelectSplit(corpus.utterances, "heldout");
  if (train.empty()) throw DataError("train: corpus has no train split");
  FeaturePipeline pipeline = config.Pipeline();
  std::vector<Waveform> babble = MakeBabblePool(spec, config.babble_seed, config.babble_pool);

  std::ofstream metrics;
  if (!options.metrics_log.empty()) {
    metrics = OpenOut(options.metrics_log);
    LogConfig(metrics, config);
    metrics << "epoch\tphase\tstage\tcap\texamples\tlr\ttrain_loss\tvalidation_wer\tseconds\n";
  }
  log << "train: " << ArchitectureName(tc.architecture) << " " << tc.modalities.Name() << ", seed " << tc.seed
      << ", " << train.size() << " train / " << heldout.size() << " held-out utterances\n";

  std::optional<Checkpoint> resumed;
  if (!options.resume.empty()) resumed = LoadCheckpoint(options.resume);

  ParameterSet frontend;
  const bool images = spec.visual == VisualMode::kImages && tc.modalities.video;
  if (resumed) {
    CopyFrontendParameters(resumed->state.params, &frontend);
  } else if (images) {
    std::vector<Utterance> words = StageExamples(train, spec, 0), clips;
    std::map<std::string, int> per_word;
    for (const Utterance &w : words)
      if (per_word[w.transcript]++ < config.pretrain_clips_per_word) clips.push_back(w);
    WordPretrainResult pre = PretrainWordClassifier(clips, config.pretrain);
    log << "pretrain: " << pre.classes.size() << " words, " << pre.epoch_loss.size()
        << " epochs, train accuracy " << Fixed(100.0 * pre.train_accuracy) << "%\n";
    CopyFrontendParameters(pre.params, &frontend);
  }

  auto run_phase = [&](TrainConfig phase_config, const char *phase, std::optional<TrainState> start) {
    Trainer trainer(phase_config, pipeline, train, heldout, spec, babble, frontend);
    if (start) trainer.Resume(std::move(*start));
    else trainer.Initialize();
    trainer.Run([&](const EpochMetrics &m, const TrainState &) {
      log << phase << " epoch " << m.epoch << " stage " << m.stage << " cap " << m.cap << " loss "
          << Fixed(m.train_loss, 4) << " val_wer " << Fixed(m.validation_wer) << " lr " << m.learning_rate
          << "\n";
      if (metrics.is_open())
        metrics << m.epoch << '\t' << phase << '\t' << m.stage << '\t' << m.cap << '\t' << m.examples << '\t'
                << FormatDouble(m.learning_rate) << '\t' << FormatDouble(m.train_loss) << '\t'
                << Fixed(m.validation_wer) << '\t' << Fixed(m.seconds, 3) << '\n'
                << std::flush;
      SaveCheckpoint(options.out, Checkpoint::From(trainer));
    });
    Checkpoint ckpt = Checkpoint::From(trainer);
    SaveCheckpoint(options.out, ckpt);
    return ckpt;
  };

  std::optional<TrainState> start;
  if (resumed) start = resumed->state;
  Checkpoint ckpt = run_phase(tc, "frozen", start);
  if (images && config.end_to_end_epochs > 0) {
    TrainConfig e2e = tc;
    e2e.end_to_end = true;
    e2e.max_epochs = tc.max_epochs + config.end_to_end_epochs;
    ckpt = run_phase(e2e, "end_to_end", ckpt.state);
  }
  log << "wrote " << options.out << "\n";
}

void CmdDecode(const RunConfig &base, const DecodeCommandOptions &options, std::ostream &log) {
  RunConfig config = base;
  Checkpoint ckpt = LoadCheckpoint(options.checkpoint);
  if (options.architecture && *options.architecture != ckpt.architecture)
    throw ConfigError("decode: checkpoint is " + std::string(ArchitectureName(ckpt.architecture)));
  if (options.modalities && !(*options.modalities == ckpt.modalities()))
    throw ConfigError("decode: checkpoint modalities are " + ckpt.modalities().Name());
  std::optional<NgramCharLm> lm_holder;
  const LanguageModel *lm = MaybeLm(options.lm_path, &lm_holder);
  CorpusIndex corpus = LoadCorpusFor(&config, options.corpus_dir);
  std::vector<Utterance> set =
      WithTestNoise(SelectSplit(corpus.utterances, options.split), corpus.spec, config, config.decode.snr_db);
  if (set.empty()) throw DataError("decode: split " + options.split + " is empty");
  Recognizer model = ckpt.ToRecognizer();
  std::vector<Hypothesis> hyps =
      RecognizeAll(model, set, DecodeOptionsFor(config, ckpt.architecture, lm), config.workers);
  std::ofstream os = OpenOut(options.out);
  WriteTranscripts(os, HypothesisRecords(set, hyps));
  log << "decoded " << set.size() << " utterances (" << options.split << ") to " << options.out << "\n";
}

void CmdEval(const std::string &refs, const std::string &hyps, const std::string &prefix, std::ostream &out) {
  EvalReport report = Evaluate(ReadTranscripts(refs), ReadTranscripts(hyps));
  if (prefix.empty()) {
    WriteEvalSummary(out, report);
    out << "\n";
    WriteWordTable(out, report);
    out << "\n";
    WriteLengthTable(out, report);
    return;
  }
  std::ofstream s = OpenOut(prefix + ".summary.tsv"), w = OpenOut(prefix + ".words.tsv"),
                l = OpenOut(prefix + ".lengths.tsv"), u = OpenOut(prefix + ".utterances.tsv");
  WriteEvalSummary(s, report);
  WriteWordTable(w, report);
  WriteLengthTable(l, report);
  WriteUtteranceTable(u, report);
  WriteEvalSummary(out, report);
}

SweepAxis ParseSweepAxis(const std::string &name) {
  if (name == "snr") return SweepAxis::kSnr;
  if (name == "desync") return SweepAxis::kDesync;
  if (name == "beam_width") return SweepAxis::kBeamWidth;
  throw ConfigError("unknown sweep axis '" + name + "' (snr, desync, beam_width)");
}

void CmdSweep(const RunConfig &base, const SweepOptions &options, std::ostream &log) {
  RunConfig config = base;
  Checkpoint ckpt = LoadCheckpoint(options.checkpoint);
  std::optional<NgramCharLm> lm_holder;
  const LanguageModel *lm = MaybeLm(options.lm_path, &lm_holder);
  CorpusIndex corpus = LoadCorpusFor(&config, options.corpus_dir);
  std::vector<Utterance> set = SelectSplit(corpus.utterances, options.split);
  if (set.empty()) throw DataError("sweep: split " + options.split + " is empty");

  if (options.axis == SweepAxis::kDesync && config.sweep.finetune_epochs > 0) {
    log << "fine-tuning " << config.sweep.finetune_epochs << " epoch(s) on shifted samples\n";
    ckpt = FinetuneOnShifted(ckpt, config, corpus.spec, SelectSplit(corpus.utterances, "train"),
                             config.sweep.desync, config.sweep.finetune_epochs);
  }
  Recognizer model = ckpt.ToRecognizer();
  RecognizeOptions decode = DecodeOptionsFor(config, ckpt.architecture, lm);
  std::ofstream os = OpenOut(options.out);
  LogConfig(os, config);
  auto score = [&](const std::vector<Utterance> &utts, const RecognizeOptions &o) {
    return CorpusWer(utts, RecognizeAll(model, utts, o, config.workers));
  };
  switch (options.axis) {
    case SweepAxis::kSnr:
      os << "snr_db\twer\n";
      for (double snr : config.sweep.snr)
        os << FormatDouble(snr) << '\t' << Fixed(score(WithTestNoise(set, corpus.spec, config, snr), decode))
           << '\n';
      break;
    case SweepAxis::kDesync: {
      os << "shift_frames\twer\n";
      std::vector<Utterance> noisy = WithTestNoise(set, corpus.spec, config, config.decode.snr_db);
      for (int k : config.sweep.desync)
        os << k << '\t' << Fixed(score(ShiftedSamples(noisy, {k}), decode)) << '\n';
      break;
    }
    case SweepAxis::kBeamWidth: {
      os << "beam_width\twer\n";
      std::vector<Utterance> noisy = WithTestNoise(set, corpus.spec, config, config.decode.snr_db);
      for (int w : config.sweep.beam_width) {
        RecognizeOptions o = decode;
        o.greedy = false;
        o.beam.width = w;
        os << w << '\t' << Fixed(score(noisy, o)) << '\n';
      }
      break;
    }
  }
  log << "wrote " << options.out << "\n";
}

void CmdLmTrain(const RunConfig &base, const std::string &corpus_dir, const std::string &out, std::ostream &log) {
  RunConfig config = base;
  CorpusIndex corpus = LoadCorpusFor(&config, corpus_dir);
  std::vector<Utterance> train = SelectSplit(corpus.utterances, "train");
  if (train.empty()) throw DataError("lm-train: corpus has no train split");
  TrainCorpusLm(train, config.lm).Save(out);
  log << "trained order-" << config.lm.order << " character LM on " << train.size() << " sentences: " << out
      << "\n";
}

}  // namespace avsr
