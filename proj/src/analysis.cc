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

#include "dpstrat/analysis.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <fmt/core.h>

#include "dpstrat/estimators.h"

namespace dpstrat {
namespace {

// Beyond 40 standard deviations the normal density underflows.
constexpr double kStandardizedCutoff = 40.0;
constexpr double kQuadratureTolerance = 1e-14;
constexpr unsigned kQuadratureDepth = 20;

double StdNormalPdf(double z) {
  return std::exp(-0.5 * z * z) / std::sqrt(2.0 * std::numbers::pi);
}

template <class F>
double Integrate(F f, double lo, double hi) {
  double error = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
      f, lo, hi, kQuadratureDepth, kQuadratureTolerance, &error);
}

void CheckUnitInterval(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw ValidationError(
        fmt::format("width ratio needs 0 < p < 1, got {}", p));
  }
}

double WeightSquaredOverN2(const StratumDesign& s) {
  const double w = s.weight();
  const auto n = static_cast<double>(s.sample_size());
  return w * w / (n * n);
}

}  // namespace

double ExtrinsicVariance(const Design& design, Algorithm algorithm,
                         const PrivacyBudget& budget,
                         std::optional<std::span<const double>> proportions) {
  switch (algorithm) {
    case Algorithm::kNonPrivate:
      return 0.0;
    case Algorithm::kStrNzPubSz: {
      double sum = 0.0;
      for (const auto& s : design.strata()) sum += WeightSquaredOverN2(s);
      return sum / (2.0 * budget.rho());
    }
    case Algorithm::kPopNzPubSz: {
      if (!(budget.rho1() > 0.0)) throw ValidationError("rho1 must be positive");
      double largest = 0.0;
      for (const auto& s : design.strata()) {
        largest = std::max(largest, WeightSquaredOverN2(s));
      }
      return largest / (2.0 * budget.rho1());
    }
    case Algorithm::kStrNzPrivSz: {
      if (!proportions) {
        throw ValidationError(
            "extrinsic variance of str-priv needs stratum proportions");
      }
      if (proportions->size() != design.size()) {
        throw ValidationError(fmt::format("{} proportions for {} strata",
                                          proportions->size(), design.size()));
      }
      if (!(budget.rho1() > 0.0) || !(budget.rho2() > 0.0)) {
        throw ValidationError("rho1 and rho2 must be positive");
      }
      double counts_part = 0.0;
      double sizes_part = 0.0;
      for (size_t h = 0; h < design.size(); ++h) {
        const double a = WeightSquaredOverN2(design[h]);
        const double p = (*proportions)[h];
        counts_part += a;
        sizes_part += a * p * p;
      }
      return counts_part / (2.0 * budget.rho1()) +
             sizes_part / (2.0 * budget.rho2());
    }
    case Algorithm::kDifference:
      break;
  }
  throw ValidationError("extrinsic variance is undefined for difference");
}

double BudgetRatioStrVsPop(std::span<const double> u) {
  if (u.empty()) throw ValidationError("no sampling weights");
  double sum = 0.0;
  double largest = 0.0;
  for (double x : u) {
    sum += x * x;
    largest = std::max(largest, x * x);
  }
  return sum / (2.0 * largest);
}

double BudgetRatioPrivVsPub(std::span<const double> u,
                            std::span<const double> p) {
  if (u.empty()) throw ValidationError("no sampling weights");
  if (u.size() != p.size()) {
    throw ValidationError(
        fmt::format("{} sampling weights but {} proportions", u.size(), p.size()));
  }
  double num = 0.0;
  double den = 0.0;
  for (size_t h = 0; h < u.size(); ++h) {
    const double u2 = u[h] * u[h];
    num += u2 * (1.0 + p[h] * p[h]);
    den += u2;
  }
  return 2.0 * num / den;
}

double TheoreticalWidthRatio(int64_t population_size, int64_t sample_size,
                             double p, double rho, Algorithm algorithm) {
  CheckUnitInterval(p);
  if (sample_size < 2 || sample_size >= population_size) {
    throw ValidationError(fmt::format(
        "width ratio needs 2 <= n < N, got n={}, N={}", sample_size,
        population_size));
  }
  if (!(rho > 0.0)) throw ValidationError("rho must be positive");
  const auto big_n = static_cast<double>(population_size);
  const auto n = static_cast<double>(sample_size);
  const double fpc = (big_n - 1.0) / (big_n - n);
  const double base = p * (1.0 - p) * n * rho;
  switch (algorithm) {
    case Algorithm::kNonPrivate:
      return 1.0;
    case Algorithm::kStrNzPubSz:
      return std::sqrt(1.0 + fpc / (2.0 * base));
    case Algorithm::kPopNzPubSz:
      return std::sqrt(1.0 + fpc / base);
    case Algorithm::kStrNzPrivSz:
      return std::sqrt(1.0 + fpc * (1.0 + p * p) / base);
    case Algorithm::kDifference:
      break;
  }
  throw ValidationError("width ratio is undefined for difference");
}

double TwrLowerBound(int64_t sample_size, double rho, Algorithm algorithm) {
  if (sample_size < 1 || !(rho > 0.0)) {
    throw ValidationError("lower bound needs n >= 1 and rho > 0");
  }
  const double n_rho = static_cast<double>(sample_size) * rho;
  switch (algorithm) {
    case Algorithm::kNonPrivate:
      return 1.0;
    case Algorithm::kStrNzPubSz:
      return std::sqrt(1.0 + 2.0 / n_rho);
    case Algorithm::kPopNzPubSz:
      return std::sqrt(1.0 + 4.0 / n_rho);
    case Algorithm::kStrNzPrivSz:
      // (1 + p^2) / (p (1 - p)) is minimized at p = sqrt(2) - 1.
      return std::sqrt(1.0 + 2.0 * (1.0 + std::numbers::sqrt2) / n_rho);
    case Algorithm::kDifference:
      break;
  }
  throw ValidationError("lower bound is undefined for difference");
}

double DesignWidthRatio(const Design& design, std::span<const double> p,
                        Algorithm algorithm, const PrivacyBudget& budget) {
  const double sampling = DesignVariance(design, p);
  if (!(sampling > 0.0)) {
    throw ValidationError("design variance is zero; width ratio is undefined");
  }
  const double extrinsic = ExtrinsicVariance(design, algorithm, budget, p);
  return std::sqrt(1.0 + extrinsic / sampling);
}

double DoubleFactorial(int m) {
  if (m < -1) throw ValidationError("double factorial needs m >= -1");
  double result = 1.0;
  for (int i = m; i > 1; i -= 2) result *= i;
  return result;
}

ReciprocalMomentSeries ReciprocalNormalMoments(double mu, double sigma, int k) {
  if (!(mu > 1.0)) {
    throw ValidationError(fmt::format("series needs mu > 1, got {}", mu));
  }
  if (!(sigma > 0.0)) {
    throw ValidationError(fmt::format("series needs sigma > 0, got {}", sigma));
  }
  if (k < 0) throw ValidationError("series order must be nonnegative");
  const double r2 = (sigma / mu) * (sigma / mu);
  ReciprocalMomentSeries s;
  double power = 1.0;
  for (int j = 0; j <= k; ++j) {
    s.mean += DoubleFactorial(2 * j - 1) * power;
    s.second_moment += DoubleFactorial(2 * j + 1) * power;
    power *= r2;
  }
  s.mean /= mu;
  s.second_moment /= mu * mu;
  s.error_order = power;
  return s;
}

ReciprocalMoments ReciprocalMomentsByQuadrature(double mu, double sigma) {
  if (!(mu > 1.0)) {
    throw ValidationError(fmt::format("quadrature needs mu > 1, got {}", mu));
  }
  if (!(sigma > 0.0)) {
    throw ValidationError(
        fmt::format("quadrature needs sigma > 0, got {}", sigma));
  }
  // Standardize: X = mu + sigma z with |z| <= (mu - 1) / sigma.
  const double limit = std::min((mu - 1.0) / sigma, kStandardizedCutoff);
  ReciprocalMoments m;
  m.probability = std::erf(limit / std::numbers::sqrt2);
  const double first = Integrate(
      [&](double z) { return StdNormalPdf(z) / (mu + sigma * z); }, -limit,
      limit);
  const double second = Integrate(
      [&](double z) {
        const double x = mu + sigma * z;
        return StdNormalPdf(z) / (x * x);
      },
      -limit, limit);
  m.mean = first / m.probability;
  m.second_moment = second / m.probability;
  return m;
}

double TruncatedEvenMoment(double /*mu*/, double sigma, double a, int k) {
  if (!(a > 0.0)) throw ValidationError("truncation half-width must be positive");
  if (!(sigma > 0.0)) throw ValidationError("sigma must be positive");
  if (k < 1) throw ValidationError("moment order must be positive");
  const double limit = std::min(
      a / sigma, kStandardizedCutoff + 2.0 * std::sqrt(2.0 * k));
  const double mass = std::erf(limit / std::numbers::sqrt2);
  const double raw = Integrate(
      [k](double z) { return std::pow(z, 2 * k) * StdNormalPdf(z); }, -limit,
      limit);
  return std::pow(sigma, 2 * k) * raw / mass;
}

RatioApproximation StrNzPrivSzApproximation(double p, int64_t sample_size,
                                            int64_t population_size,
                                            double rho1, double rho2) {
  if (sample_size < 2 || sample_size > population_size) {
    throw ValidationError("approximation needs 2 <= n <= N");
  }
  if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("p must lie in [0, 1]");
  if (!(rho1 > 0.0) || !(rho2 > 0.0)) {
    throw ValidationError("rho1 and rho2 must be positive");
  }
  const auto n = static_cast<double>(sample_size);
  const StratumDesign stratum(population_size, sample_size, 1.0);
  const ReciprocalMomentSeries inv =
      ReciprocalNormalMoments(n, std::sqrt(1.0 / (2.0 * rho2)), 2);

  // c~ has mean n p and variance 1/(2 rho1) + n^2 Var(p_hat); c~ and n~ are
  // independent.
  const double count_mean = n * p;
  const double count_second = 1.0 / (2.0 * rho1) +
                              n * n * StratumDesignVariance(stratum, p) +
                              count_mean * count_mean;
  RatioApproximation out;
  out.mean = count_mean * inv.mean;
  out.variance = count_second * inv.second_moment - out.mean * out.mean;
  out.bias = out.mean - p;
  return out;
}

}  // namespace dpstrat
