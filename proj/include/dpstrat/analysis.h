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

#ifndef DPSTRAT_ANALYSIS_H_
#define DPSTRAT_ANALYSIS_H_

#include <cstdint>
#include <optional>
#include <span>

#include "dpstrat/core.h"

namespace dpstrat {

// Variance added to the estimator by the privacy noise, beyond sampling
// variance. StrNz-PubSz uses budget.rho(); PopNz-PubSz uses rho1; StrNz-PrivSz
// uses rho1 and rho2 and needs the stratum proportions. NonPrivate gives 0.
double ExtrinsicVariance(const Design& design, Algorithm algorithm,
                         const PrivacyBudget& budget,
                         std::optional<std::span<const double>> proportions =
                             std::nullopt);

// Ratio of extrinsic variances StrNz-PubSz / PopNz-PubSz at an even split,
// sum u_h^2 / (2 max u_h^2), in terms of sampling weights u_h = N_h / n_h.
double BudgetRatioStrVsPop(std::span<const double> sampling_weights);

// Ratio of extrinsic variances StrNz-PrivSz / StrNz-PubSz at an even split,
// 2 sum u_h^2 (1 + p_h^2) / sum u_h^2. Lies in [2, 4].
double BudgetRatioPrivVsPub(std::span<const double> sampling_weights,
                            std::span<const double> proportions);

// sqrt(Var(p~) / Var(p_hat)) for a single stratum of size N with sample n,
// true proportion p in (0, 1), total budget rho split evenly.
double TheoreticalWidthRatio(int64_t population_size, int64_t sample_size,
                             double p, double rho, Algorithm algorithm);

// Infimum of TheoreticalWidthRatio over N and p.
double TwrLowerBound(int64_t sample_size, double rho, Algorithm algorithm);

// Multi-stratum width ratio sqrt(1 + V_ex / Var(p_hat)).
double DesignWidthRatio(const Design& design, std::span<const double> proportions,
                        Algorithm algorithm, const PrivacyBudget& budget);

// Truncated series for E(1/X | S) and E(1/X^2 | S), X ~ N(mu, sigma^2),
// S = {1 <= X <= 2 mu - 1}:
//   mean   = (1/mu)   sum_{j<=k} (2j-1)!! (sigma/mu)^{2j}
//   second = (1/mu^2) sum_{j<=k} (2j+1)!! (sigma/mu)^{2j}
// error_order is (sigma/mu)^{2k+2}, the order of the omitted remainder.
struct ReciprocalMomentSeries {
  double mean = 0.0;
  double second_moment = 0.0;
  double error_order = 0.0;
};
ReciprocalMomentSeries ReciprocalNormalMoments(double mu, double sigma, int k);

// The same conditional moments by adaptive Gauss-Kronrod quadrature of the
// truncated normal density.
struct ReciprocalMoments {
  double mean = 0.0;
  double second_moment = 0.0;
  double probability = 0.0;  // Pr(S)
};
ReciprocalMoments ReciprocalMomentsByQuadrature(double mu, double sigma);

// E[(X - mu)^{2k} | |X - mu| <= a] for X ~ N(mu, sigma^2), by quadrature.
double TruncatedEvenMoment(double mu, double sigma, double a, int k);

// (2j-1)!! for m = 2j-1 >= -1, with (-1)!! = 1.
double DoubleFactorial(int m);

// Second-order expansion of the mean and variance of c~ / n~ (conditioned on
// the noisy size lying in [1, 2n - 1]) for one stratum of StrNz-PrivSz.
struct RatioApproximation {
  double mean = 0.0;
  double variance = 0.0;
  double bias = 0.0;  // mean - p
};
RatioApproximation StrNzPrivSzApproximation(double p, int64_t sample_size,
                                            int64_t population_size,
                                            double rho1, double rho2);

}  // namespace dpstrat

#endif  // DPSTRAT_ANALYSIS_H_
