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

#include "dpstrat/dp_ci.h"

#include <algorithm>
#include <cmath>

#include <fmt/core.h>

#include "dpstrat/estimators.h"

namespace dpstrat {
namespace {

void RequirePositiveSplit(const PrivacyBudget& budget, Algorithm algorithm) {
  if (!(budget.rho1() > 0.0) || !(budget.rho2() > 0.0)) {
    throw ValidationError(fmt::format(
        "{} needs rho1 > 0 and rho2 > 0, got ({}, {})",
        AlgorithmName(algorithm), budget.rho1(), budget.rho2()));
  }
}

bool ClipToUnit(double& value) {
  const double clipped = std::clamp(value, 0.0, 1.0);
  const bool changed = clipped != value;
  value = clipped;
  return changed;
}

// Shared tail of every algorithm: floor the variance, build the interval,
// apply optional interval clipping.
CiResult FinishInterval(double estimate, double variance, double alpha,
                        Algorithm algorithm, const PrivacyBudget& budget,
                        const ClipOptions& clip, ClipFlags flags) {
  if (variance < 0.0) {
    variance = 0.0;
    flags.variance_floored = true;
  }
  CiResult ci = MakeWaldInterval(estimate, variance, alpha, algorithm);
  ci.budget_spent = budget;
  ci.flags = flags;
  if (clip.clip_interval) ClipIntervalToUnit(ci);
  return ci;
}

}  // namespace

double NoisySizeCv(double sample_size, double rho2) {
  return std::sqrt(1.0 / (2.0 * rho2)) / sample_size;
}

PrivateCiResult StrNzPubSz(RandomStream& stream, const Design& design,
                           const StratumCounts& counts,
                           const PrivacyBudget& budget, double alpha,
                           const ClipOptions& clip) {
  CheckAlpha(alpha);
  const std::vector<double> p_hat = SampleProportions(design, counts);
  const double rho = budget.rho();

  PrivateCiResult out;
  out.strata.resize(design.size());
  out.noise.reserve(design.size());
  ClipFlags flags;
  double p_tilde = 0.0;
  double v_tilde = 0.0;
  for (size_t h = 0; h < design.size(); ++h) {
    const StratumDesign& s = design[h];
    const auto big_n = static_cast<double>(s.population_size());
    const auto n = static_cast<double>(s.sample_size());
    RandomStream sub = stream.Substream(h);
    const double sensitivity = 1.0 / n;
    const GaussianRelease rel = GaussianMechanism(sub, p_hat[h], sensitivity, rho);
    out.noise.push_back({"p_hat", static_cast<int>(h), sensitivity, rho,
                         rel.noise_variance});

    PrivateStratumRelease& r = out.strata[h];
    r.p_tilde = rel.value;
    if (clip.clip_proportions) r.proportion_clipped = ClipToUnit(r.p_tilde);
    flags.proportion_clipped |= r.proportion_clipped;

    // Adding the noise variance back removes the bias of p~(1 - p~).
    const double ev = rel.noise_variance;
    r.v_tilde =
        ((big_n - n) / big_n) * (r.p_tilde * (1.0 - r.p_tilde) + ev) / (n - 1.0) +
        ev;
    const double w = s.weight();
    p_tilde += w * r.p_tilde;
    v_tilde += w * w * r.v_tilde;
  }
  out.ci = FinishInterval(p_tilde, v_tilde, alpha, Algorithm::kStrNzPubSz,
                          budget, clip, flags);
  return out;
}

PrivateCiResult PopNzPubSz(RandomStream& stream, const Design& design,
                           const StratumCounts& counts,
                           const PrivacyBudget& budget, double alpha,
                           const ClipOptions& clip) {
  CheckAlpha(alpha);
  RequirePositiveSplit(budget, Algorithm::kPopNzPubSz);
  const NonPrivateEstimate est = NonPrivateEstimateFor(design, counts);
  const SensitivityReport sens = Sensitivities(design);

  PrivateCiResult out;
  ClipFlags flags;
  RandomStream estimate_stream = stream.Substream(0);
  RandomStream variance_stream = stream.Substream(1);

  const GaussianRelease p_rel =
      GaussianMechanism(estimate_stream, est.p_hat, sens.delta_p, budget.rho1());
  out.noise.push_back(
      {"p_hat", -1, sens.delta_p, budget.rho1(), p_rel.noise_variance});
  double p_tilde = p_rel.value;
  if (clip.clip_proportions) flags.proportion_clipped = ClipToUnit(p_tilde);

  double v_tilde = est.var_hat;
  if (sens.delta_v > 0.0) {
    const GaussianRelease v_rel = GaussianMechanism(
        variance_stream, est.var_hat, sens.delta_v, budget.rho2());
    out.noise.push_back(
        {"var_hat", -1, sens.delta_v, budget.rho2(), v_rel.noise_variance});
    v_tilde = v_rel.value;
  } else {
    // Every stratum is a census: the variance estimate is identically zero,
    // so releasing it costs nothing.
    out.noise.push_back({"var_hat", -1, 0.0, budget.rho2(), 0.0});
  }
  v_tilde += p_rel.noise_variance;

  out.ci = FinishInterval(p_tilde, v_tilde, alpha, Algorithm::kPopNzPubSz,
                          budget, clip, flags);
  return out;
}

PrivateCiResult StrNzPrivSz(RandomStream& stream, const Design& design,
                            const StratumCounts& counts,
                            const PrivacyBudget& budget, double alpha,
                            const ClipOptions& clip) {
  CheckAlpha(alpha);
  RequirePositiveSplit(budget, Algorithm::kStrNzPrivSz);
  ValidateCounts(design, counts);

  PrivateCiResult out;
  out.strata.resize(design.size());
  out.noise.reserve(2 * design.size());
  ClipFlags flags;
  double p_tilde = 0.0;
  double v_tilde = 0.0;
  for (size_t h = 0; h < design.size(); ++h) {
    const StratumDesign& s = design[h];
    const auto big_n = static_cast<double>(s.population_size());
    RandomStream sub = stream.Substream(h);
    // Adding or removing one record moves the count and the size by at most 1.
    const GaussianRelease c_rel = GaussianMechanism(
        sub, static_cast<double>(counts.values[h]), 1.0, budget.rho1());
    const GaussianRelease n_rel = GaussianMechanism(
        sub, static_cast<double>(s.sample_size()), 1.0, budget.rho2());
    out.noise.push_back(
        {"count", static_cast<int>(h), 1.0, budget.rho1(), c_rel.noise_variance});
    out.noise.push_back(
        {"size", static_cast<int>(h), 1.0, budget.rho2(), n_rel.noise_variance});

    PrivateStratumRelease& r = out.strata[h];
    r.c_tilde = c_rel.value;
    r.n_tilde = n_rel.value;
    if (r.n_tilde < kNoisySizeFloor) {
      r.n_tilde = kNoisySizeFloor;
      r.noisy_size_floored = true;
    }
    r.p_tilde = r.c_tilde / r.n_tilde;
    if (clip.clip_proportions) r.proportion_clipped = ClipToUnit(r.p_tilde);

    double fpc = (big_n - r.n_tilde) / (big_n - 1.0);
    if (fpc < 0.0) {
      fpc = 0.0;
      r.fpc_floored = true;
    }
    const double n2 = r.n_tilde * r.n_tilde;
    r.v_tilde = fpc * r.p_tilde * (1.0 - r.p_tilde) / r.n_tilde +
                c_rel.noise_variance / n2 +
                r.p_tilde * r.p_tilde * n_rel.noise_variance / n2;
    // Computed from the released size only, so the diagnostic is free.
    r.cv_warning = NoisySizeCv(r.n_tilde, budget.rho2()) >= kRatioCvThreshold;

    flags.proportion_clipped |= r.proportion_clipped;
    flags.noisy_size_floored |= r.noisy_size_floored;
    const double w = s.weight();
    p_tilde += w * r.p_tilde;
    v_tilde += w * w * r.v_tilde;
  }
  out.ci = FinishInterval(p_tilde, v_tilde, alpha, Algorithm::kStrNzPrivSz,
                          budget, clip, flags);
  return out;
}

PrivateCiResult RunAlgorithm(Algorithm algorithm, RandomStream& stream,
                             const Design& design, const StratumCounts& counts,
                             const PrivacyBudget& budget, double alpha,
                             const ClipOptions& clip) {
  switch (algorithm) {
    case Algorithm::kNonPrivate: {
      PrivateCiResult out;
      out.ci = NonPrivateCi(design, counts, alpha);
      if (clip.clip_interval) ClipIntervalToUnit(out.ci);
      return out;
    }
    case Algorithm::kStrNzPubSz:
      return StrNzPubSz(stream, design, counts, budget, alpha, clip);
    case Algorithm::kPopNzPubSz:
      return PopNzPubSz(stream, design, counts, budget, alpha, clip);
    case Algorithm::kStrNzPrivSz:
      return StrNzPrivSz(stream, design, counts, budget, alpha, clip);
    case Algorithm::kDifference:
      break;
  }
  throw ValidationError("difference intervals are built with DifferenceCi");
}

CiResult DifferenceCi(const CiResult& a, const CiResult& b, double alpha) {
  for (const CiResult* r : {&a, &b}) {
    if (!(r->variance_estimate >= 0.0) || !std::isfinite(r->variance_estimate)) {
      throw ValidationError("difference interval needs finite variance estimates");
    }
  }
  CiResult ci = MakeWaldInterval(a.point_estimate - b.point_estimate,
                                 a.variance_estimate + b.variance_estimate,
                                 alpha, Algorithm::kDifference);
  for (const CiResult* r : {&a, &b}) {
    if (r->budget_spent) ci.per_dataset_budgets.push_back(*r->budget_spent);
  }
  return ci;
}

}  // namespace dpstrat
