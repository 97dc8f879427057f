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

#include "dpstrat/core.h"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/core.h>

#include "dpstrat/normal.h"

namespace dpstrat {

std::string_view AlgorithmName(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::kNonPrivate:
      return "nonprivate";
    case Algorithm::kStrNzPubSz:
      return "str-pub";
    case Algorithm::kPopNzPubSz:
      return "pop-pub";
    case Algorithm::kStrNzPrivSz:
      return "str-priv";
    case Algorithm::kDifference:
      return "difference";
  }
  return "unknown";
}

Algorithm ParseAlgorithm(std::string_view name) {
  for (Algorithm a : {Algorithm::kNonPrivate, Algorithm::kStrNzPubSz,
                      Algorithm::kPopNzPubSz, Algorithm::kStrNzPrivSz,
                      Algorithm::kDifference}) {
    if (AlgorithmName(a) == name) return a;
  }
  throw ValidationError(fmt::format("unknown algorithm '{}'", name));
}

StratumDesign::StratumDesign(int64_t population_size, int64_t sample_size,
                             double weight)
    : population_size_(population_size),
      sample_size_(sample_size),
      weight_(weight) {
  if (sample_size < 2) {
    throw ValidationError(
        fmt::format("sample size must be at least 2, got {}", sample_size));
  }
  if (sample_size > population_size) {
    throw ValidationError(fmt::format(
        "sample size {} exceeds population size {}", sample_size,
        population_size));
  }
  if (!(weight > 0.0 && weight <= 1.0)) {
    throw ValidationError(
        fmt::format("stratum weight must lie in (0, 1], got {}", weight));
  }
}

Design::Design(std::vector<StratumDesign> strata) : strata_(std::move(strata)) {
  if (strata_.empty()) throw ValidationError("design has no strata");
  for (const auto& s : strata_) total_population_ += s.population_size();
}

Design Design::FromSizes(std::span<const int64_t> population_sizes,
                         std::span<const int64_t> sample_sizes) {
  if (population_sizes.size() != sample_sizes.size()) {
    throw ValidationError(fmt::format(
        "{} population sizes but {} sample sizes", population_sizes.size(),
        sample_sizes.size()));
  }
  if (population_sizes.empty()) throw ValidationError("design has no strata");
  int64_t total = 0;
  for (int64_t n : population_sizes) {
    if (n <= 0) {
      throw ValidationError(
          fmt::format("population size must be positive, got {}", n));
    }
    total += n;
  }
  std::vector<StratumDesign> strata;
  strata.reserve(population_sizes.size());
  for (size_t h = 0; h < population_sizes.size(); ++h) {
    strata.emplace_back(population_sizes[h], sample_sizes[h],
                        static_cast<double>(population_sizes[h]) /
                            static_cast<double>(total));
  }
  return Design(std::move(strata));
}

Design Design::WithWeights(std::span<const int64_t> population_sizes,
                           std::span<const int64_t> sample_sizes,
                           std::span<const double> weights) {
  if (population_sizes.size() != sample_sizes.size() ||
      population_sizes.size() != weights.size()) {
    throw ValidationError("design vectors have mismatched lengths");
  }
  const double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (std::abs(sum - 1.0) > kWeightSumTolerance) {
    throw ValidationError(
        fmt::format("stratum weights sum to {:.17g}, expected 1", sum));
  }
  std::vector<StratumDesign> strata;
  strata.reserve(weights.size());
  for (size_t h = 0; h < weights.size(); ++h) {
    strata.emplace_back(population_sizes[h], sample_sizes[h], weights[h]);
  }
  return Design(std::move(strata));
}

void ValidateCounts(const Design& design, const StratumCounts& counts) {
  if (counts.values.size() != design.size()) {
    throw ValidationError(fmt::format("{} counts for a design with {} strata",
                                      counts.values.size(), design.size()));
  }
  for (size_t h = 0; h < design.size(); ++h) {
    const int64_t c = counts.values[h];
    if (c < 0 || c > design[h].sample_size()) {
      throw ValidationError(
          fmt::format("stratum {}: count {} outside [0, {}]", h, c,
                      design[h].sample_size()));
    }
  }
}

std::vector<double> SampleProportions(const Design& design,
                                      const StratumCounts& counts) {
  ValidateCounts(design, counts);
  std::vector<double> p(design.size());
  for (size_t h = 0; h < design.size(); ++h) {
    p[h] = static_cast<double>(counts.values[h]) /
           static_cast<double>(design[h].sample_size());
  }
  return p;
}

PrivacyBudget::PrivacyBudget(double rho, double fraction) {
  if (!(rho > 0.0) || !std::isfinite(rho)) {
    throw ValidationError(
        fmt::format("privacy budget must be positive and finite, got {}", rho));
  }
  if (!(fraction >= 0.0 && fraction <= 1.0)) {
    throw ValidationError(
        fmt::format("budget split fraction must lie in [0, 1], got {}",
                    fraction));
  }
  rho_ = rho;
  // The larger part is rounded; the smaller is obtained by subtraction, which
  // is exact (Sterbenz), so rho1 + rho2 == rho holds exactly.
  if (fraction >= 0.5) {
    rho1_ = rho * fraction;
    rho2_ = rho - rho1_;
  } else {
    rho2_ = rho * (1.0 - fraction);
    rho1_ = rho - rho2_;
  }
}

PrivacyBudget PrivacyBudget::FromParts(double rho1, double rho2) {
  if (!(rho1 >= 0.0) || !(rho2 >= 0.0) || !std::isfinite(rho1) ||
      !std::isfinite(rho2)) {
    throw ValidationError(fmt::format(
        "budget parts must be nonnegative and finite, got ({}, {})", rho1,
        rho2));
  }
  PrivacyBudget b;
  b.rho_ = rho1 + rho2;
  if (!(b.rho_ > 0.0)) {
    throw ValidationError("privacy budget must be positive");
  }
  b.rho1_ = rho1;
  b.rho2_ = rho2;
  return b;
}

PrivacyBudget ComposeBudgets(const PrivacyBudget& a, const PrivacyBudget& b) {
  return PrivacyBudget::FromParts(a.rho(), b.rho());
}

void CheckAlpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw ValidationError(
        fmt::format("alpha must lie in (0, 1), got {}", alpha));
  }
}

CiResult MakeWaldInterval(double estimate, double variance, double alpha,
                          Algorithm algorithm) {
  CheckAlpha(alpha);
  if (!(variance >= 0.0) || !std::isfinite(variance)) {
    throw ValidationError(fmt::format(
        "variance must be nonnegative and finite, got {}", variance));
  }
  if (!std::isfinite(estimate)) {
    throw ValidationError("point estimate is not finite");
  }
  const double half_width = TwoSidedCriticalValue(alpha) * std::sqrt(variance);
  CiResult r;
  r.point_estimate = estimate;
  r.variance_estimate = variance;
  r.lower = estimate - half_width;
  r.upper = estimate + half_width;
  r.alpha = alpha;
  r.algorithm = algorithm;
  return r;
}

void ClipIntervalToUnit(CiResult& result) {
  const double lower = std::clamp(result.lower, 0.0, 1.0);
  const double upper = std::clamp(result.upper, 0.0, 1.0);
  const double point = std::clamp(result.point_estimate, 0.0, 1.0);
  if (lower != result.lower || upper != result.upper ||
      point != result.point_estimate) {
    result.flags.interval_clipped = true;
  }
  result.lower = lower;
  result.upper = upper;
  result.point_estimate = point;
}

}  // namespace dpstrat
