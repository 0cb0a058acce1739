// numerics/adam.cc

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

#include "avsr/numerics/adam.h"

#include <algorithm>
#include <cmath>
#include <limits>

#include "avsr/base/error.h"

namespace avsr {

void AdamStep(AdamState &state, ParameterSet &params, const GradientMap &grads) {
  if (!(state.learning_rate > 0.0)) throw ConfigError("adam: learning rate must be positive");
  for (const auto &[name, g] : grads) {
    auto it = params.find(name);
    if (it == params.end()) throw ConfigError("adam: gradient for unknown parameter " + name);
    if (g.shape() != it->second.shape())
      throw DimensionError("adam: gradient of " + name + " has shape " +
                           ShapeString(g.shape()) + ", parameter " +
                           ShapeString(it->second.shape()));
    if (!g.AllFinite()) throw NumericError("adam: poisoned update, non-finite gradient for " + name);
  }
  ++state.step;
  const AdamConfig &c = state.config;
  double correction1 = 1.0 - std::pow(c.beta1, static_cast<double>(state.step));
  double correction2 = 1.0 - std::pow(c.beta2, static_cast<double>(state.step));
  for (auto &[name, p] : params) {
    Tensor &m = state.first_moment.try_emplace(name, p.shape()).first->second;
    Tensor &v = state.second_moment.try_emplace(name, p.shape()).first->second;
    if (m.shape() != p.shape() || v.shape() != p.shape())
      throw DimensionError("adam: moment shape mismatch for " + name);
    auto git = grads.find(name);
    for (size_t i = 0; i < p.size(); ++i) {
      double g = git != grads.end() ? git->second[i] : 0.0;
      m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g;
      v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g * g;
      double mhat = m[i] / correction1;
      double vhat = v[i] / correction2;
      p[i] -= state.learning_rate * mhat / (std::sqrt(vhat) + c.epsilon);
    }
  }
}

PlateauSchedule::PlateauSchedule(double initial_lr, double factor, double floor, int patience,
                                 double min_improvement)
    : lr_(initial_lr),
      factor_(factor),
      floor_(floor),
      patience_(patience),
      min_improvement_(min_improvement),
      best_(std::numeric_limits<double>::infinity()) {
  if (!(initial_lr > 0.0) || !(factor > 0.0 && factor < 1.0) || !(floor > 0.0) || patience < 1)
    throw ConfigError("plateau schedule: invalid parameters");
}

bool PlateauSchedule::Observe(double error) {
  if (error < best_ - min_improvement_ * std::fabs(best_) || !std::isfinite(best_)) {
    best_ = error;
    since_best_ = 0;
    return false;
  }
  if (++since_best_ < patience_) return false;
  since_best_ = 0;
  best_ = error;
  lr_ = std::max(lr_ * factor_, floor_);
  return true;
}

void PlateauSchedule::Restore(double lr, double best, int since_best) {
  lr_ = lr;
  best_ = best;
  since_best_ = since_best;
}

}  // namespace avsr
