// tests/oracles/ctc_paths.h

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

// Test-only oracles that enumerate every frame-level path. Exponential in T,
// so only used on tiny instances.

#ifndef AVSR_TESTS_ORACLES_CTC_PATHS_H_
#define AVSR_TESTS_ORACLES_CTC_PATHS_H_

#include <cmath>
#include <vector>

#include "avsr/base/random.h"
#include "avsr/numerics/tensor.h"

namespace avsr::oracle {

inline std::vector<int> Collapse(const std::vector<int> &path, int blank) {
  std::vector<int> out;
  int prev = -1;
  for (int k : path) {
    if (k != prev && k != blank) out.push_back(k);
    prev = k;
  }
  return out;
}

// Calls fn(path, probability) for each of the K^T paths of probs [T x K].
template <typename Fn>
void ForEachPath(const Tensor &probs, Fn fn) {
  const int T = probs.dim(0), K = probs.dim(1);
  std::vector<int> path(T, 0);
  while (true) {
    double p = 1.0;
    for (int t = 0; t < T; ++t) p *= probs.at(t, path[t]);
    fn(path, p);
    int t = T - 1;
    while (t >= 0 && ++path[t] == K) path[t--] = 0;
    if (t < 0) break;
  }
}

// -log sum over paths collapsing to labels.
inline double BruteForceCtcLoss(const Tensor &probs, const std::vector<int> &labels, int blank) {
  double total = 0.0;
  ForEachPath(probs, [&](const std::vector<int> &path, double p) {
    if (Collapse(path, blank) == labels) total += p;
  });
  return -std::log(total);
}

// Random per-frame distributions [T x K], all entries bounded away from 0.
inline Tensor RandomPosteriors(int T, int K, Rng &rng) {
  std::uniform_real_distribution<double> u(0.05, 1.0);
  Tensor p({T, K});
  for (int t = 0; t < T; ++t) {
    double z = 0.0;
    for (int k = 0; k < K; ++k) z += (p.at(t, k) = u(rng));
    for (int k = 0; k < K; ++k) p.at(t, k) /= z;
  }
  return p;
}

inline Tensor Log(const Tensor &t) {
  Tensor out = t;
  for (double &v : out.data()) v = std::log(v);
  return out;
}

// All label sequences of length <= max_len over symbols [0, V).
inline std::vector<std::vector<int>> AllSequences(int V, int max_len) {
  std::vector<std::vector<int>> out{{}};
  for (size_t i = 0; i < out.size(); ++i) {
    if (static_cast<int>(out[i].size()) == max_len) continue;
    for (int v = 0; v < V; ++v) {
      auto next = out[i];
      next.push_back(v);
      out.push_back(next);
    }
  }
  return out;
}

}  // namespace avsr::oracle

#endif  // AVSR_TESTS_ORACLES_CTC_PATHS_H_
