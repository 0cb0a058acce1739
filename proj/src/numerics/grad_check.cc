// numerics/grad_check.cc

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

#include "avsr/numerics/grad_check.h"

#include <algorithm>
#include <cmath>

#include "avsr/base/error.h"

namespace avsr {

namespace {

double Evaluate(const LossBuilder &build, const ParameterSet &params, GraphOptions options) {
  Graph g(options);
  return g.value(build(g, params))[0];
}

GradientMap Analytic(const LossBuilder &build, const ParameterSet &params,
                     GraphOptions options) {
  Graph g(options);
  return g.Backward(build(g, params));
}

double CheckOne(const LossBuilder &build, ParameterSet &params, const std::string &name,
                const Tensor &analytic, double h, GraphOptions options) {
  Tensor &p = params.at(name);
  double worst = 0.0;
  for (size_t i = 0; i < p.size(); ++i) {
    double saved = p[i];
    p[i] = saved + h;
    double up = Evaluate(build, params, options);
    p[i] = saved - h;
    double down = Evaluate(build, params, options);
    p[i] = saved;
    double numeric = (up - down) / (2.0 * h);
    double a = analytic[i];
    double denom = std::max({std::fabs(a), std::fabs(numeric), 1e-12});
    worst = std::max(worst, std::fabs(a - numeric) / denom);
  }
  return worst;
}

}  // namespace

double GradCheck(const LossBuilder &build, ParameterSet &params, const std::string &name,
                 double perturbation, GraphOptions options) {
  if (perturbation <= 0.0) throw ConfigError("grad_check: perturbation must be positive");
  if (!params.count(name)) throw ConfigError("grad_check: unknown parameter '" + name + "'");
  GradientMap grads = Analytic(build, params, options);
  auto it = grads.find(name);
  Tensor analytic = it != grads.end() ? it->second : Tensor(params.at(name).shape());
  return CheckOne(build, params, name, analytic, perturbation, options);
}

std::map<std::string, double> GradCheckAll(const LossBuilder &build, ParameterSet &params,
                                           double perturbation, GraphOptions options) {
  std::map<std::string, double> out;
  if (params.empty()) return out;
  if (perturbation <= 0.0) throw ConfigError("grad_check: perturbation must be positive");
  GradientMap grads = Analytic(build, params, options);
  for (auto &[name, value] : params) {
    auto it = grads.find(name);
    Tensor analytic = it != grads.end() ? it->second : Tensor(value.shape());
    out[name] = CheckOne(build, params, name, analytic, perturbation, options);
  }
  return out;
}

}  // namespace avsr
