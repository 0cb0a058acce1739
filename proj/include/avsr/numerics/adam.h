// avsr/numerics/adam.h

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

#ifndef AVSR_NUMERICS_ADAM_H_
#define AVSR_NUMERICS_ADAM_H_

#include <cstdint>

#include "avsr/numerics/tensor.h"

namespace avsr {

// Moment decay constants are the usual ADAM defaults.
struct AdamConfig {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct AdamState {
  int64_t step = 0;
  double learning_rate = 1e-4;
  ParameterSet first_moment;
  ParameterSet second_moment;
  AdamConfig config;
};

// One bias-corrected ADAM update of params in place. Parameters missing from
// grads are treated as having zero gradient. Throws NumericError before
// touching anything if a gradient is non-finite.
void AdamStep(AdamState &state, ParameterSet &params, const GradientMap &grads);

// Halves the learning rate whenever the monitored error has not improved by
// more than min_improvement (relative) for patience observations, never going
// below the floor.
class PlateauSchedule {
 public:
  PlateauSchedule(double initial_lr = 1e-4, double factor = 0.5, double floor = 1e-6,
                  int patience = 3, double min_improvement = 1e-3);

  // Returns true when this observation triggered a plateau.
  bool Observe(double error);
  double learning_rate() const { return lr_; }
  void set_learning_rate(double lr) { lr_ = lr; }
  bool at_floor() const { return lr_ <= floor_; }
  double best() const { return best_; }
  int since_best() const { return since_best_; }
  void Restore(double lr, double best, int since_best);

 private:
  double lr_, factor_, floor_;
  int patience_;
  double min_improvement_;
  double best_;
  int since_best_ = 0;
};

}  // namespace avsr

#endif  // AVSR_NUMERICS_ADAM_H_
