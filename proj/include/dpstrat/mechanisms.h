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

#ifndef DPSTRAT_MECHANISMS_H_
#define DPSTRAT_MECHANISMS_H_

#include <string>
#include <vector>

#include "dpstrat/core.h"
#include "dpstrat/random.h"

namespace dpstrat {

// Sensitivities of p_hat and of its variance estimator under substitution of
// one record within a stratum. Depend on the public design only.
struct SensitivityReport {
  double delta_p = 0.0;
  double delta_v = 0.0;
  // C_h = w_h^2 ((N_h - n_h) / N_h) / (n_h - 1).
  std::vector<double> stratum_constants;
};

SensitivityReport Sensitivities(const Design& design);

// Noise variance of the Gaussian mechanism: sensitivity^2 / (2 rho).
double GaussianNoiseVariance(double sensitivity, double rho);

struct GaussianRelease {
  double value = 0.0;
  double noise_variance = 0.0;
};

// Releases true_value + N(0, sensitivity^2 / (2 rho)), which is rho-zCDP for a
// query with the given sensitivity.
GaussianRelease GaussianMechanism(RandomStream& stream, double true_value,
                                  double sensitivity, double rho);

// One invocation of the Gaussian mechanism, kept for auditing.
struct NoiseRecord {
  std::string query;  // e.g. "p_hat", "count", "size"
  int stratum = -1;   // -1 for population-level queries
  double sensitivity = 0.0;
  double rho = 0.0;
  double variance = 0.0;
};

}  // namespace dpstrat

#endif  // DPSTRAT_MECHANISMS_H_
