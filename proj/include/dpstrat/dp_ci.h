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

#ifndef DPSTRAT_DP_CI_H_
#define DPSTRAT_DP_CI_H_

#include <vector>

#include "dpstrat/core.h"
#include "dpstrat/mechanisms.h"
#include "dpstrat/random.h"

namespace dpstrat {

// Post-processing switches. Neither affects the privacy cost.
struct ClipOptions {
  // Clip each noisy proportion onto [0, 1] before its variance is computed
  // (the noisy population estimate for PopNz-PubSz).
  bool clip_proportions = false;
  // Clip the final interval onto [0, 1].
  bool clip_interval = false;
};

// Per-stratum private outputs of the stratum-level algorithms.
struct PrivateStratumRelease {
  double p_tilde = 0.0;
  double v_tilde = 0.0;
  // StrNz-PrivSz only.
  double c_tilde = 0.0;
  double n_tilde = 0.0;
  bool proportion_clipped = false;
  // StrNz-PrivSz: n_tilde was raised to the floor of 2.
  bool noisy_size_floored = false;
  // StrNz-PrivSz: n_tilde > N_h, so the finite-population factor was set to 0.
  bool fpc_floored = false;
  // StrNz-PrivSz: coefficient of variation of the noisy size is >= 0.1, where
  // the normal approximation to the ratio becomes doubtful.
  bool cv_warning = false;
};

struct PrivateCiResult {
  CiResult ci;
  std::vector<PrivateStratumRelease> strata;
  std::vector<NoiseRecord> noise;
};

// Floor applied to noisy sample sizes.
inline constexpr double kNoisySizeFloor = 2.0;
// Rule-of-thumb bound on the coefficient of variation of the noisy size.
inline constexpr double kRatioCvThreshold = 0.1;

// Stratum-level noise with public sample sizes. Each stratum spends the full
// budget.rho() on its proportion (strata are disjoint), so the release is
// budget.rho()-zCDP under within-stratum substitution. The split is ignored.
PrivateCiResult StrNzPubSz(RandomStream& stream, const Design& design,
                           const StratumCounts& counts,
                           const PrivacyBudget& budget, double alpha,
                           const ClipOptions& clip = {});

// Population-level noise with public sample sizes: rho1 on p_hat, rho2 on the
// variance estimate. Both parts must be positive.
PrivateCiResult PopNzPubSz(RandomStream& stream, const Design& design,
                           const StratumCounts& counts,
                           const PrivacyBudget& budget, double alpha,
                           const ClipOptions& clip = {});

// Stratum-level noise with private sample sizes: rho1 on each count, rho2 on
// each sample size. Both parts must be positive.
PrivateCiResult StrNzPrivSz(RandomStream& stream, const Design& design,
                            const StratumCounts& counts,
                            const PrivacyBudget& budget, double alpha,
                            const ClipOptions& clip = {});

// Dispatches on algorithm; kNonPrivate returns the Wald interval with no noise.
PrivateCiResult RunAlgorithm(Algorithm algorithm, RandomStream& stream,
                             const Design& design, const StratumCounts& counts,
                             const PrivacyBudget& budget, double alpha,
                             const ClipOptions& clip = {});

// Interval for p_a - p_b from two results on independent populations. The
// budgets of the inputs are reported per dataset and are not summed.
CiResult DifferenceCi(const CiResult& a, const CiResult& b, double alpha);

// Coefficient of variation of a noisy sample size n + N(0, 1 / (2 rho2)).
double NoisySizeCv(double sample_size, double rho2);

}  // namespace dpstrat

#endif  // DPSTRAT_DP_CI_H_
