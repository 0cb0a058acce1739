// scoring/wer.cc

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

#include "avsr/scoring/wer.h"

#include <algorithm>
#include <cctype>
#include <sstream>

#include "avsr/base/error.h"

namespace avsr {

Words NormalizeWords(const std::string &text) {
  std::string clean;
  clean.reserve(text.size());
  for (unsigned char c : text) {
    if (std::isalnum(c) || c == '\'') clean.push_back(static_cast<char>(std::tolower(c)));
    else if (std::isspace(c)) clean.push_back(' ');
  }
  Words out;
  std::istringstream is(clean);
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

EditOps &EditOps::operator+=(const EditOps &o) {
  for (const auto &[k, v] : o.matches) matches[k] += v;
  for (const auto &[k, v] : o.substitutions) substitutions[k] += v;
  for (const auto &[k, v] : o.deletions) deletions[k] += v;
  for (const auto &[k, v] : o.insertions) insertions[k] += v;
  S += o.S;
  D += o.D;
  I += o.I;
  N += o.N;
  hypothesis_words += o.hypothesis_words;
  return *this;
}

namespace {

std::vector<long> CostTable(const Words &ref, const Words &hyp) {
  const size_t n = ref.size(), m = hyp.size();
  std::vector<long> d((n + 1) * (m + 1));
  auto at = [&](size_t i, size_t j) -> long & { return d[i * (m + 1) + j]; };
  for (size_t i = 0; i <= n; ++i) at(i, 0) = static_cast<long>(i);
  for (size_t j = 0; j <= m; ++j) at(0, j) = static_cast<long>(j);
  for (size_t i = 1; i <= n; ++i)
    for (size_t j = 1; j <= m; ++j)
      at(i, j) = std::min({at(i - 1, j - 1) + (ref[i - 1] == hyp[j - 1] ? 0 : 1),
                           at(i - 1, j) + 1, at(i, j - 1) + 1});
  return d;
}

}  // namespace

long EditDistance(const Words &a, const Words &b) { return CostTable(a, b).back(); }

EditOps Align(const Words &reference, const Words &hypothesis) {
  if (reference.empty()) throw DataError("align: empty reference, WER undefined");
  const size_t n = reference.size(), m = hypothesis.size();
  std::vector<long> d = CostTable(reference, hypothesis);
  auto at = [&](size_t i, size_t j) { return d[i * (m + 1) + j]; };

  EditOps ops;
  ops.N = static_cast<long>(n);
  ops.hypothesis_words = static_cast<long>(m);
  size_t i = n, j = m;
  while (i > 0 || j > 0) {
    if (i > 0 && j > 0 && reference[i - 1] == hypothesis[j - 1] &&
        at(i, j) == at(i - 1, j - 1)) {
      ++ops.matches[reference[i - 1]];
      --i, --j;
    } else if (i > 0 && j > 0 && at(i, j) == at(i - 1, j - 1) + 1) {
      ++ops.substitutions[{reference[i - 1], hypothesis[j - 1]}];
      ++ops.S;
      --i, --j;
    } else if (i > 0 && at(i, j) == at(i - 1, j) + 1) {
      ++ops.deletions[reference[i - 1]];
      ++ops.D;
      --i;
    } else {
      ++ops.insertions[hypothesis[j - 1]];
      ++ops.I;
      --j;
    }
  }
  return ops;
}

double Wer(const EditOps &ops) {
  if (ops.N < 1) throw DataError("wer: reference word count is zero");
  return 100.0 * static_cast<double>(ops.Errors()) / static_cast<double>(ops.N);
}

double Wer(const std::string &reference, const std::string &hypothesis) {
  return Wer(Align(NormalizeWords(reference), NormalizeWords(hypothesis)));
}

std::map<std::string, WordMeasures> PerWordMeasures(const EditOps &ops) {
  std::map<std::string, WordMeasures> out;
  for (const auto &[w, n] : ops.matches) out[w].tp += n;
  for (const auto &[pair, n] : ops.substitutions) {
    out[pair.first].fn += n;
    out[pair.second].fp += n;
  }
  for (const auto &[w, n] : ops.deletions) out[w].fn += n;
  for (const auto &[w, n] : ops.insertions) out[w].fp += n;
  for (auto &[w, m] : out) {
    if (m.tp + m.fp > 0) m.precision = static_cast<double>(m.tp) / (m.tp + m.fp);
    if (m.tp + m.fn > 0) m.recall = static_cast<double>(m.tp) / (m.tp + m.fn);
    if (m.precision && m.recall && *m.precision + *m.recall > 0.0)
      m.f1 = 2.0 * *m.precision * *m.recall / (*m.precision + *m.recall);
    else if (m.precision && m.recall)
      m.f1 = 0.0;
  }
  return out;
}

std::vector<LengthBucket> WerByLength(const std::vector<std::pair<Words, Words>> &pairs,
                                      int min_samples) {
  std::map<int, EditOps> by_len;
  std::map<int, int> counts;
  for (const auto &[ref, hyp] : pairs) {
    int len = static_cast<int>(ref.size());
    by_len[len] += Align(ref, hyp);
    ++counts[len];
  }
  std::vector<LengthBucket> out;
  for (const auto &[len, ops] : by_len)
    if (counts[len] >= min_samples) out.push_back({len, counts[len], Wer(ops)});
  return out;
}

}  // namespace avsr
