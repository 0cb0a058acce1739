// corpus/manifest.cc

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


#include "avsr/corpus/manifest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include "avsr/base/error.h"
#include "avsr/numerics/tensor_io.h"

namespace avsr {

namespace fs = std::filesystem;

namespace {

constexpr char kManifestHeader[] = "# avsr corpus manifest v1";

std::string ReadFileBytes(const fs::path &path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw DataError("cannot open " + path.string());
  return std::string(std::istreambuf_iterator<char>(is), {});
}

// Writes bytes under blobs/<digest><ext> and returns the relative name.
std::string StoreBlob(const fs::path &dir, const std::string &bytes, const std::string &ext) {
  std::string name = "blobs/" + ContentDigest(bytes) + ext;
  fs::path path = dir / name;
  if (!fs::exists(path)) {
    std::ofstream os(path, std::ios::binary);
    os.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!os) throw DataError("cannot write " + path.string());
  }
  return name;
}

std::string LoadBlob(const fs::path &dir, const std::string &name) {
  std::string bytes = ReadFileBytes(dir / name);
  std::string stem = fs::path(name).stem().string();
  if (stem != ContentDigest(bytes)) throw DataError("blob digest mismatch: " + name);
  return bytes;
}

std::vector<std::string> SplitTabs(const std::string &line) {
  std::vector<std::string> out;
  size_t start = 0;
  for (;;) {
    size_t tab = line.find('\t', start);
    out.push_back(line.substr(start, tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

}  // namespace

KeyValueBinder BindCorpusSpec(CorpusSpec *spec) {
  KeyValueBinder b;
  b.Bind("alphabet", &spec->alphabet);
  b.Bind("lexicon_size", &spec->lexicon_size);
  b.Bind("min_word_length", &spec->min_word_length);
  b.Bind("max_word_length", &spec->max_word_length);
  b.Bind("min_words", &spec->min_words);
  b.Bind("max_words", &spec->max_words);
  b.Bind("num_utterances", &spec->num_utterances);
  b.Bind("heldout_utterances", &spec->heldout_utterances);
  b.Bind("min_amplitude", &spec->min_amplitude);
  b.Bind("max_amplitude", &spec->max_amplitude);
  b.Bind(
      "visual", [spec](const std::string &s) { spec->visual = ParseVisualMode(s); },
      [spec] { return std::string(VisualModeName(spec->visual)); });
  b.Bind("visual_dim", &spec->visual_dim);
  b.Bind("image_size", &spec->image_size);
  b.Bind("viseme_group_size", &spec->viseme_group_size);
  b.Bind("visual_distinct", &spec->visual_distinct);
  b.Bind("visual_jitter", &spec->visual_jitter);
  b.Bind("sample_rate", &spec->sample_rate);
  b.Bind("frame_rate", &spec->frame_rate);
  b.Bind("frames_per_char", &spec->frames_per_char);
  return b;
}

std::string ContentDigest(const std::string &bytes) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void WriteCorpus(const std::string &dir, const CorpusIndex &corpus) {
  fs::path root(dir);
  fs::create_directories(root / "blobs");
  {
    CorpusSpec spec = corpus.spec;
    KeyValues kv = BindCorpusSpec(&spec).Dump();
    kv.emplace_back("seed", std::to_string(corpus.seed));
    std::ofstream os(root / "corpus.cfg");
    WriteKeyValues(os, kv);
    if (!os) throw DataError("cannot write " + (root / "corpus.cfg").string());
  }
  std::ofstream manifest(root / "manifest.tsv");
  manifest << kManifestHeader << "\n";
  const fs::path tmp = root / "blobs" / ".staging.wav";
  for (const Utterance &u : corpus.utterances) {
    if (u.id.find_first_of("\t\n") != std::string::npos || u.split.find_first_of("\t\n") != std::string::npos)
      throw DataError("manifest: id and split must not contain tabs or newlines");
    WriteWav(tmp.string(), u.audio);
    std::string audio = StoreBlob(root, ReadFileBytes(tmp), ".wav");
    std::ostringstream video_bytes;
    static constexpr char kMagic[8] = {'A', 'V', 'S', 'R', 'T', 'E', 'N', 'S'};
    video_bytes.write(kMagic, sizeof(kMagic));
    WriteTensor(video_bytes, u.video);
    std::string video = StoreBlob(root, video_bytes.str(), ".tensor");
    manifest << u.id << '\t' << u.split << '\t' << u.seed << '\t' << audio << '\t' << video << '\t'
             << u.transcript << "\n";
  }
  fs::remove(tmp);
  if (!manifest) throw DataError("cannot write manifest in " + dir);
}

CorpusIndex ReadCorpus(const std::string &dir) {
  fs::path root(dir);
  CorpusIndex out;
  KeyValues kv = ReadKeyValueFile((root / "corpus.cfg").string());
  KeyValues spec_kv;
  bool have_seed = false;
  for (const auto &[k, v] : kv) {
    if (k == "seed") {
      out.seed = ParseUint64(v, "seed");
      have_seed = true;
    } else {
      spec_kv.emplace_back(k, v);
    }
  }
  if (!have_seed) throw DataError(dir + "/corpus.cfg: missing seed");
  BindCorpusSpec(&out.spec).Apply(spec_kv, "corpus.cfg");
  out.spec.Validate();

  std::ifstream manifest(root / "manifest.tsv");
  if (!manifest) throw DataError("cannot open " + (root / "manifest.tsv").string());
  std::string line;
  int lineno = 0;
  while (std::getline(manifest, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    auto fields = SplitTabs(line);
    std::string where = "manifest.tsv:" + std::to_string(lineno);
    if (fields.size() != 6) throw DataError(where + ": expected 6 tab-separated fields");
    Utterance u;
    u.id = fields[0];
    u.split = fields[1];
    try {
      u.seed = ParseUint64(fields[2], "seed");
    } catch (const ConfigError &e) {
      throw DataError(where + ": " + e.what());
    }
    u.transcript = fields[5];
    LoadBlob(root, fields[3]);
    u.audio = ReadWav((root / fields[3]).string(), out.spec.sample_rate);
    LoadBlob(root, fields[4]);
    u.video = LoadTensor((root / fields[4]).string());
    out.utterances.push_back(std::move(u));
  }
  return out;
}

std::vector<Utterance> SelectSplit(const std::vector<Utterance> &all, const std::string &split) {
  std::vector<Utterance> out;
  for (const Utterance &u : all)
    if (u.split == split) out.push_back(u);
  return out;
}

}  // namespace avsr
