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

#ifndef DPSTRAT_CORE_H_
#define DPSTRAT_CORE_H_

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dpstrat {

// Raised when an input violates a type invariant or operation precondition.
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Raised when a configuration is well-formed but cannot be realized, e.g. a
// sampling rate that yields more units than the stratum holds.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Raised when input text (a data file or command-line value) cannot be read
// as the expected type.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Algorithm {
  kNonPrivate,
  kStrNzPubSz,
  kPopNzPubSz,
  kStrNzPrivSz,
  kDifference,
};

// Short names used on the command line and in output files:
// nonprivate, str-pub, pop-pub, str-priv, difference.
std::string_view AlgorithmName(Algorithm algorithm);
Algorithm ParseAlgorithm(std::string_view name);

// Public design facts for one stratum. Immutable.
class StratumDesign {
 public:
  // Requires 2 <= sample_size <= population_size and weight in (0, 1].
  StratumDesign(int64_t population_size, int64_t sample_size, double weight);

  int64_t population_size() const { return population_size_; }
  int64_t sample_size() const { return sample_size_; }
  double weight() const { return weight_; }

  // Sampling weight N_h / n_h.
  double sampling_weight() const {
    return static_cast<double>(population_size_) /
           static_cast<double>(sample_size_);
  }

 private:
  int64_t population_size_;
  int64_t sample_size_;
  double weight_;
};

// A stratified design: H strata whose weights sum to one.
class Design {
 public:
  // Weights are computed as N_h / sum_k N_k.
  static Design FromSizes(std::span<const int64_t> population_sizes,
                          std::span<const int64_t> sample_sizes);

  // User-supplied weights must sum to 1 within 1e-12.
  static Design WithWeights(std::span<const int64_t> population_sizes,
                            std::span<const int64_t> sample_sizes,
                            std::span<const double> weights);

  std::span<const StratumDesign> strata() const { return strata_; }
  size_t size() const { return strata_.size(); }
  const StratumDesign& operator[](size_t h) const { return strata_[h]; }
  int64_t total_population() const { return total_population_; }

 private:
  explicit Design(std::vector<StratumDesign> strata);

  std::vector<StratumDesign> strata_;
  int64_t total_population_ = 0;
};

inline constexpr double kWeightSumTolerance = 1e-12;

// Observed attribute-positive counts, one per stratum.
struct StratumCounts {
  std::vector<int64_t> values;
};

// Throws ValidationError unless counts pair with the design and satisfy
// 0 <= c_h <= n_h.
void ValidateCounts(const Design& design, const StratumCounts& counts);

// Sample proportion c_h / n_h for each stratum.
std::vector<double> SampleProportions(const Design& design,
                                      const StratumCounts& counts);

// A zCDP budget rho with a split (rho1, rho2), rho1 + rho2 == rho.
class PrivacyBudget {
 public:
  // rho > 0 and finite; fraction in [0, 1] is the share given to rho1.
  explicit PrivacyBudget(double rho, double fraction = 0.5);

  static PrivacyBudget FromParts(double rho1, double rho2);

  double rho() const { return rho_; }
  double rho1() const { return rho1_; }
  double rho2() const { return rho2_; }

  friend bool operator==(const PrivacyBudget&, const PrivacyBudget&) = default;

 private:
  PrivacyBudget() = default;

  double rho_ = 0.0;
  double rho1_ = 0.0;
  double rho2_ = 0.0;
};

// Sequential composition: the result spends a.rho + b.rho, with the split
// recording (a.rho, b.rho).
PrivacyBudget ComposeBudgets(const PrivacyBudget& a, const PrivacyBudget& b);

struct ClipFlags {
  bool proportion_clipped = false;
  bool interval_clipped = false;
  bool variance_floored = false;
  bool noisy_size_floored = false;

  bool any() const {
    return proportion_clipped || interval_clipped || variance_floored ||
           noisy_size_floored;
  }
};

struct CiResult {
  double point_estimate = 0.0;
  double variance_estimate = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double alpha = 0.1;
  Algorithm algorithm = Algorithm::kNonPrivate;
  std::optional<PrivacyBudget> budget_spent;
  // Only filled for Algorithm::kDifference: one entry per input dataset.
  std::vector<PrivacyBudget> per_dataset_budgets;
  ClipFlags flags;

  double width() const { return upper - lower; }
  bool Covers(double value) const { return lower <= value && value <= upper; }
};

// Builds estimate +/- z_{1-alpha/2} sqrt(variance). Throws on negative or
// non-finite variance and on alpha outside (0, 1).
CiResult MakeWaldInterval(double estimate, double variance, double alpha,
                          Algorithm algorithm);

// Clamps the interval, and the point estimate, onto [0, 1].
void ClipIntervalToUnit(CiResult& result);

void CheckAlpha(double alpha);

}  // namespace dpstrat

#endif  // DPSTRAT_CORE_H_
