// avsr/cli/commands.h

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


#ifndef AVSR_CLI_COMMANDS_H_
#define AVSR_CLI_COMMANDS_H_

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "avsr/cli/checkpoint.h"
#include "avsr/cli/run_config.h"
#include "avsr/corpus/manifest.h"
#include "avsr/model/char_lm.h"
#include "avsr/scoring/wer.h"

namespace avsr {

// Transcript files: one "id<TAB>text[<TAB>score]" record per line; '#'
// lines are comments. Ids must be unique.
struct TranscriptRecord {
  std::string id;
  std::string text;
  std::optional<double> score;
};
std::vector<TranscriptRecord> ReadTranscripts(const std::string &path);
void WriteTranscripts(std::ostream &os, const std::vector<TranscriptRecord> &records);

// Scores hypotheses against references matched by id. Throws DataError
// when the id sets differ and NumericError when the aggregate per-word
// counts break TP+FP = hypothesis words or TP+FN = reference words.
struct EvalReport {
  EditOps total;
  double wer = 0.0;
  std::map<std::string, WordMeasures> words;
  std::vector<LengthBucket> lengths;
  struct Row {
    std::string id;
    EditOps ops;
  };
  std::vector<Row> utterances;  // sorted by id
};
EvalReport Evaluate(const std::vector<TranscriptRecord> &refs, const std::vector<TranscriptRecord> &hyps,
                    int min_bucket_samples = 5);
void WriteEvalSummary(std::ostream &os, const EvalReport &report);
void WriteWordTable(std::ostream &os, const EvalReport &report);
void WriteLengthTable(std::ostream &os, const EvalReport &report);
void WriteUtteranceTable(std::ostream &os, const EvalReport &report);

// Test-time babble for a split: a pool distinct from the training pool and
// one noise stream per utterance index.
std::vector<Utterance> WithTestNoise(const std::vector<Utterance> &utterances, const CorpusSpec &spec,
                                     const RunConfig &config, double snr_db);
// Every utterance at every shift (clamped to the clip length).
std::vector<Utterance> ShiftedSamples(const std::vector<Utterance> &utterances, const std::vector<int> &shifts);
// Continues training on full-length shifted samples for `epochs` epochs.
Checkpoint FinetuneOnShifted(const Checkpoint &ckpt, const RunConfig &config, const CorpusSpec &spec,
                             const std::vector<Utterance> &train, const std::vector<int> &shifts, int epochs);

NgramCharLm TrainCorpusLm(const std::vector<Utterance> &train, const LmSettings &settings);

// ------------------------------------------------------------ commands ----

void CmdGen(const RunConfig &config, const std::string &out_dir, std::ostream &log);

struct TrainOptions {
  std::string corpus_dir;
  std::string out;          // checkpoint path, rewritten after every epoch
  std::string resume;       // optional checkpoint to continue from
  std::string metrics_log;  // optional TSV of per-epoch metrics
  bool always_noise = false;
};
void CmdTrain(const RunConfig &config, const TrainOptions &options, std::ostream &log);

struct DecodeCommandOptions {
  std::string checkpoint;
  std::string corpus_dir;
  std::string split = "heldout";
  std::string lm_path;  // empty: no external LM
  std::string out;
  std::optional<Architecture> architecture;  // checked against the checkpoint
  std::optional<Modalities> modalities;
};
void CmdDecode(const RunConfig &config, const DecodeCommandOptions &options, std::ostream &log);

// Writes <prefix>.summary.tsv, .words.tsv, .lengths.tsv and .utterances.tsv,
// or everything to `out` when prefix is empty.
void CmdEval(const std::string &refs, const std::string &hyps, const std::string &prefix, std::ostream &out);

enum class SweepAxis { kSnr, kDesync, kBeamWidth };
SweepAxis ParseSweepAxis(const std::string &name);
struct SweepOptions {
  std::string checkpoint;
  std::string corpus_dir;
  std::string split = "heldout";
  std::string lm_path;
  SweepAxis axis = SweepAxis::kSnr;
  std::string out;
};
void CmdSweep(const RunConfig &config, const SweepOptions &options, std::ostream &log);

void CmdLmTrain(const RunConfig &config, const std::string &corpus_dir, const std::string &out,
                std::ostream &log);

}  // namespace avsr

#endif  // AVSR_CLI_COMMANDS_H_
