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

#ifndef DPSTRAT_ESTIMATORS_H_
#define DPSTRAT_ESTIMATORS_H_

#include <span>
#include <vector>

#include "dpstrat/core.h"

namespace dpstrat {

struct NonPrivateEstimate {
  double p_hat = 0.0;
  std::vector<double> stratum_p_hat;
  double var_hat = 0.0;
  std::vector<double> stratum_var_hat;
};

// p_hat_h = c_h / n_h and p_hat = sum_h w_h p_hat_h. Variances are left empty.
NonPrivateEstimate ProportionEstimate(const Design& design,
                                      const StratumCounts& counts);

// Unbiased sample-based estimator of Var(p_hat_h):
//   ((N_h - n_h) / N_h) * p(1 - p) / (n_h - 1).
double StratumVarianceEstimate(const StratumDesign& stratum, double p_hat);

// Exact design variance of p_hat_h given the true stratum proportion:
//   ((N_h - n_h) / (N_h - 1)) * p(1 - p) / n_h.
// Not to be confused with the estimator above; the FPC denominators differ.
double StratumDesignVariance(const StratumDesign& stratum, double p_true);

// sum_h w_h^2 Var(p_hat_h) with the exact design variance.
double DesignVariance(const Design& design, std::span<const double> p_true);

// Proportions plus the stratum and aggregate variance estimates.
NonPrivateEstimate NonPrivateEstimateFor(const Design& design,
                                         const StratumCounts& counts);

// Classical Wald interval around the stratified estimate.
CiResult NonPrivateCi(const Design& design, const StratumCounts& counts,
                      double alpha);

// estimate +/- z sqrt(variance), tagged NonPrivate.
CiResult WaldInterval(double estimate, double variance, double alpha);

}  // namespace dpstrat

#endif  // DPSTRAT_ESTIMATORS_H_
