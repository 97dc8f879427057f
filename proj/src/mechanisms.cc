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

#include "dpstrat/mechanisms.h"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

namespace dpstrat {

SensitivityReport Sensitivities(const Design& design) {
  SensitivityReport report;
  report.stratum_constants.reserve(design.size());
  for (const StratumDesign& s : design.strata()) {
    const double w = s.weight();
    const auto big_n = static_cast<double>(s.population_size());
    const auto n = static_cast<double>(s.sample_size());
    const double c = w * w * ((big_n - n) / big_n) * (1.0 / (n - 1.0));
    report.stratum_constants.push_back(c);
    report.delta_p = std::max(report.delta_p, w / n);
    report.delta_v = std::max(report.delta_v, (c / n) * (1.0 - 1.0 / n));
  }
  return report;
}

double GaussianNoiseVariance(double sensitivity, double rho) {
  if (!(sensitivity > 0.0) || !std::isfinite(sensitivity)) {
    throw ValidationError(fmt::format(
        "sensitivity must be positive and finite, got {}", sensitivity));
  }
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw ValidationError(
        fmt::format("rho must be positive and finite, got {}", rho));
  }
  return sensitivity * sensitivity / (2.0 * rho);
}

GaussianRelease GaussianMechanism(RandomStream& stream, double true_value,
                                  double sensitivity, double rho) {
  const double variance = GaussianNoiseVariance(sensitivity, rho);
  return {Gaussian(stream, true_value, variance), variance};
}

}  // namespace dpstrat
