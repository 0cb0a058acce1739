// avsr/numerics/grad_check.h

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

#ifndef AVSR_NUMERICS_GRAD_CHECK_H_
#define AVSR_NUMERICS_GRAD_CHECK_H_

#include <functional>
#include <map>
#include <string>

#include "avsr/numerics/graph.h"

namespace avsr {

// Builds a scalar loss on a fresh graph from the current parameter values.
using LossBuilder = std::function<NodeId(Graph &, const ParameterSet &)>;

// Max over the entries of one parameter of
//   |analytic - central| / max(|analytic|, |central|, 1e-12),
// where central = (L(p + h) - L(p - h)) / 2h. Each evaluation uses a new
// Graph built with the same options, so dropout masks repeat exactly.
double GradCheck(const LossBuilder &build, ParameterSet &params, const std::string &name,
                 double perturbation, GraphOptions options = {});

// GradCheck for every parameter; empty when the set is empty.
std::map<std::string, double> GradCheckAll(const LossBuilder &build, ParameterSet &params,
                                           double perturbation, GraphOptions options = {});

}  // namespace avsr

#endif  // AVSR_NUMERICS_GRAD_CHECK_H_
