//
// Copyright 2026 The dpstrat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//

#include "dpstrat/estimators.h"

#include <fmt/core.h>

namespace dpstrat {

NonPrivateEstimate ProportionEstimate(const Design& design,
                                      const StratumCounts& counts) {
  NonPrivateEstimate est;
  est.stratum_p_hat = SampleProportions(design, counts);
  for (size_t h = 0; h < design.size(); ++h) {
    est.p_hat += design[h].weight() * est.stratum_p_hat[h];
  }
  return est;
}

double StratumVarianceEstimate(const StratumDesign& stratum, double p_hat) {
  const auto big_n = static_cast<double>(stratum.population_size());
  const auto n = static_cast<double>(stratum.sample_size());
  return ((big_n - n) / big_n) * p_hat * (1.0 - p_hat) / (n - 1.0);
}

double StratumDesignVariance(const StratumDesign& stratum, double p_true) {
  const auto big_n = static_cast<double>(stratum.population_size());
  const auto n = static_cast<double>(stratum.sample_size());
  return ((big_n - n) / (big_n - 1.0)) * p_true * (1.0 - p_true) / n;
}

double DesignVariance(const Design& design, std::span<const double> p_true) {
  if (p_true.size() != design.size()) {
    throw ValidationError(fmt::format("{} proportions for {} strata",
                                      p_true.size(), design.size()));
  }
  double v = 0.0;
  for (size_t h = 0; h < design.size(); ++h) {
    const double w = design[h].weight();
    v += w * w * StratumDesignVariance(design[h], p_true[h]);
  }
  return v;
}

NonPrivateEstimate NonPrivateEstimateFor(const Design& design,
                                         const StratumCounts& counts) {
  NonPrivateEstimate est = ProportionEstimate(design, counts);
  est.stratum_var_hat.resize(design.size());
  for (size_t h = 0; h < design.size(); ++h) {
    const double w = design[h].weight();
    est.stratum_var_hat[h] =
        StratumVarianceEstimate(design[h], est.stratum_p_hat[h]);
    est.var_hat += w * w * est.stratum_var_hat[h];
  }
  return est;
}

CiResult NonPrivateCi(const Design& design, const StratumCounts& counts,
                      double alpha) {
  const NonPrivateEstimate est = NonPrivateEstimateFor(design, counts);
  return WaldInterval(est.p_hat, est.var_hat, alpha);
}

CiResult WaldInterval(double estimate, double variance, double alpha) {
  return MakeWaldInterval(estimate, variance, alpha, Algorithm::kNonPrivate);
}

}  // namespace dpstrat
