// losses/ctc_loss.cc

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

#include "avsr/losses/ctc_loss.h"

#include <cmath>
#include <limits>

#include "avsr/base/error.h"

namespace avsr {

namespace {
constexpr double kLogZero = -std::numeric_limits<double>::infinity();
}

double LogSumExp(double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

CtcTarget::CtcTarget(std::vector<int> labels, int blank)
    : labels_(std::move(labels)), blank_(blank) {
  if (blank < 0) throw ConfigError("ctc target: blank index must be non-negative");
  expanded_.reserve(2 * labels_.size() + 1);
  expanded_.push_back(blank);
  for (int l : labels_) {
    if (l == blank) throw DataError("ctc target: label sequence contains the blank symbol");
    if (l < 0) throw DataError("ctc target: negative label");
    expanded_.push_back(l);
    expanded_.push_back(blank);
  }
}

int CtcTarget::MinFrames() const {
  int n = static_cast<int>(labels_.size());
  for (size_t i = 1; i < labels_.size(); ++i)
    if (labels_[i] == labels_[i - 1]) ++n;
  return n;
}

CtcResult CtcLoss(const Tensor &log_posteriors, const CtcTarget &target) {
  if (log_posteriors.rank() != 2) throw DimensionError("ctc_loss: posteriors must be [T x K]");
  const int T = log_posteriors.dim(0), K = log_posteriors.dim(1);
  const std::vector<int> &ext = target.expanded();
  const int S = static_cast<int>(ext.size());
  for (int s : ext)
    if (s >= K) throw DimensionError("ctc_loss: symbol " + std::to_string(s) + " outside K=" +
                                     std::to_string(K));
  if (T < target.MinFrames())
    throw NumericError("ctc_loss: infeasible alignment, " + std::to_string(T) +
                       " frames for a target needing " + std::to_string(target.MinFrames()));

  auto lp = [&](int t, int k) { return log_posteriors.at(t, k); };
  // s -> s-2 skip is allowed onto a label that differs from the one two back.
  auto can_skip = [&](int s) { return s >= 2 && ext[s] != target.blank() && ext[s] != ext[s - 2]; };

  std::vector<double> alpha(static_cast<size_t>(T) * S, kLogZero);
  std::vector<double> beta(static_cast<size_t>(T) * S, kLogZero);
  auto A = [&](int t, int s) -> double & { return alpha[static_cast<size_t>(t) * S + s]; };
  auto B = [&](int t, int s) -> double & { return beta[static_cast<size_t>(t) * S + s]; };

  A(0, 0) = lp(0, ext[0]);
  if (S > 1) A(0, 1) = lp(0, ext[1]);
  for (int t = 1; t < T; ++t)
    for (int s = 0; s < S; ++s) {
      double v = A(t - 1, s);
      if (s >= 1) v = LogSumExp(v, A(t - 1, s - 1));
      if (can_skip(s)) v = LogSumExp(v, A(t - 1, s - 2));
      A(t, s) = v == kLogZero ? kLogZero : v + lp(t, ext[s]);
    }

  B(T - 1, S - 1) = lp(T - 1, ext[S - 1]);
  if (S > 1) B(T - 1, S - 2) = lp(T - 1, ext[S - 2]);
  for (int t = T - 2; t >= 0; --t)
    for (int s = S - 1; s >= 0; --s) {
      double v = B(t + 1, s);
      if (s + 1 < S) v = LogSumExp(v, B(t + 1, s + 1));
      if (s + 2 < S && can_skip(s + 2)) v = LogSumExp(v, B(t + 1, s + 2));
      B(t, s) = v == kLogZero ? kLogZero : v + lp(t, ext[s]);
    }

  double log_total = A(T - 1, S - 1);
  if (S > 1) log_total = LogSumExp(log_total, A(T - 1, S - 2));
  if (log_total == kLogZero) throw NumericError("ctc_loss: target has zero probability");

  CtcResult result;
  result.loss = -log_total;
  result.logit_grad = Tensor({T, K});
  std::vector<double> occupancy(K);
  for (int t = 0; t < T; ++t) {
    std::fill(occupancy.begin(), occupancy.end(), kLogZero);
    for (int s = 0; s < S; ++s) {
      // alpha and beta both include the emission at t.
      double v = A(t, s) + B(t, s) - lp(t, ext[s]);
      if (A(t, s) != kLogZero && B(t, s) != kLogZero)
        occupancy[ext[s]] = LogSumExp(occupancy[ext[s]], v);
    }
    for (int k = 0; k < K; ++k) {
      double post = std::exp(lp(t, k));
      double occ = occupancy[k] == kLogZero ? 0.0 : std::exp(occupancy[k] - log_total);
      result.logit_grad.at(t, k) = post - occ;
    }
  }
  return result;
}

NodeId CtcLossNode(Graph &graph, NodeId logits, const CtcTarget &target) {
  NodeId log_post = graph.LogSoftmax(logits);
  CtcResult r = CtcLoss(graph.value(log_post), target);
  return graph.AttachLoss(logits, r.loss, std::move(r.logit_grad));
}

}  // namespace avsr
