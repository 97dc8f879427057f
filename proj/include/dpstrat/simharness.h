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

#ifndef DPSTRAT_SIMHARNESS_H_
#define DPSTRAT_SIMHARNESS_H_

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dpstrat/core.h"
#include "dpstrat/dp_ci.h"
#include "dpstrat/random.h"

namespace dpstrat {

// A fixed value, or a uniform range [lo, hi]. Stratum sizes draw from the
// discrete uniform; rates and proportions from the continuous one.
struct ParameterSpec {
  double lo = 0.0;
  double hi = 0.0;

  static ParameterSpec Fixed(double value) { return {value, value}; }
  static ParameterSpec Uniform(double lo, double hi) { return {lo, hi}; }
  bool fixed() const { return lo == hi; }
  friend bool operator==(const ParameterSpec&, const ParameterSpec&) = default;
};

struct RhoSetting {
  // When set, rho = 1 / max_h n_h for the realized design.
  bool inverse_max_sample_size = false;
  double value = 0.0;
};

struct ExperimentConfig {
  double alpha = 0.1;
  int strata = 1;
  ParameterSpec stratum_size = ParameterSpec::Fixed(2000);
  // Exactly one of sampling_rate / sample_size is used; sample_size wins.
  ParameterSpec sampling_rate = ParameterSpec::Fixed(0.076);
  std::optional<int64_t> sample_size;
  ParameterSpec proportion = ParameterSpec::Fixed(0.5);
  RhoSetting rho;
  // Non-empty for sweeps; overrides rho point by point.
  std::vector<double> rho_grid;
  // Share of rho given to rho1 by the two-part algorithms.
  double split = 0.5;
  std::vector<Algorithm> algorithms = {
      Algorithm::kNonPrivate, Algorithm::kStrNzPubSz, Algorithm::kPopNzPubSz,
      Algorithm::kStrNzPrivSz};
  int64_t repetitions = 10000;
  uint64_t base_seed = 0;
  bool clip_proportions = true;
  bool clip_interval = false;
  // Samples smaller than this are raised to it; 0 disables the floor.
  int64_t min_sample_size = 0;
};

// Throws ValidationError on malformed settings.
void ValidateConfig(const ExperimentConfig& config);

// Finite population: per-stratum sizes and counts of attribute-positive units.
struct Population {
  std::vector<int64_t> stratum_sizes;
  std::vector<int64_t> positives;

  size_t strata() const { return stratum_sizes.size(); }
  std::vector<double> stratum_proportions() const;
  double proportion() const;
};

// Draws N_h and p_h per the config, sets K_h = round(p_h N_h) and recomputes
// the true proportion from the realized K_h.
Population GeneratePopulation(RandomStream& stream, const ExperimentConfig& config);

// Per-stratum sampling rates (all equal when the config fixes them).
std::vector<double> DrawSamplingRates(RandomStream& stream,
                                      const ExperimentConfig& config);

// n_h = max(round_half_up(r_h N_h), min_sample_size). Throws InfeasibleError if
// a size falls outside [2, N_h].
std::vector<int64_t> SampleSizes(const Population& population,
                                 std::span<const double> rates,
                                 int64_t min_sample_size = 0);

// c_h ~ Hypergeometric(N_h, K_h, n_h), independently per stratum.
StratumCounts DrawCounts(RandomStream& stream, const Population& population,
                         const Design& design);

struct Sample {
  Design design;
  StratumCounts counts;
};
Sample DrawSample(RandomStream& stream, const Population& population,
                  std::span<const double> rates, int64_t min_sample_size = 0);

// Everything that stays fixed across repetitions.
struct StudySetup {
  Population population;
  std::vector<double> rates;
  Design design;
  double rho = 0.0;
};

// Generates the fixed population and design from DeriveStream(seed, {-1}).
StudySetup MakeSetup(const ExperimentConfig& config);
StudySetup MakeSetup(const ExperimentConfig& config, RandomStream population_stream);

struct RepetitionRecord {
  int64_t repetition = 0;
  Algorithm algorithm = Algorithm::kNonPrivate;
  bool covered = false;
  double point = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  double width() const { return upper - lower; }
};

struct AlgorithmSummary {
  Algorithm algorithm = Algorithm::kNonPrivate;
  double coverage = 0.0;
  double mean_width = 0.0;
  // Sample standard deviation, R - 1 denominator.
  double width_sd = 0.0;
  // Mean width over the mean non-private width of the same repetitions.
  double width_ratio = 0.0;
  double mean_lower = 0.0;
  double mean_upper = 0.0;
  double mean_point = 0.0;
};

struct ExperimentSummary {
  double true_proportion = 0.0;
  double rho = 0.0;
  int64_t repetitions = 0;
  std::vector<int64_t> sample_sizes;
  std::vector<AlgorithmSummary> algorithms;
  // Filled when ExecutionOptions::keep_records is set, ordered by
  // (repetition, algorithm position).
  std::vector<RepetitionRecord> records;

  const AlgorithmSummary& For(Algorithm algorithm) const;
};

struct ExecutionOptions {
  // 0 picks std::thread::hardware_concurrency().
  unsigned threads = 1;
  bool keep_records = false;
  // Optional permutation of [0, R) giving the order repetitions execute in.
  // Results do not depend on it.
  std::vector<int64_t> execution_order;
};

ExperimentSummary RunExperiment(const ExperimentConfig& config,
                                 const ExecutionOptions& options = {});

// Runs against an existing setup at the given rho. Repetition r uses
// DeriveStream(seed, {r}) without a grid index, {grid_index, r} with one.
ExperimentSummary RunExperiment(const ExperimentConfig& config,
                                const StudySetup& setup, double rho,
                                std::optional<int64_t> grid_index,
                                const ExecutionOptions& options = {});

// One summary per grid point, all on the same population.
std::vector<ExperimentSummary> RhoSweep(const ExperimentConfig& config,
                                        std::span<const double> rho_grid,
                                        const ExecutionOptions& options = {});

// Normal law the estimator of an algorithm is expected to follow for a given
// setup: mean and variance.
struct NormalLaw {
  double mean = 0.0;
  double variance = 0.0;
};
NormalLaw TheoreticalLaw(const StudySetup& setup, Algorithm algorithm,
                         const PrivacyBudget& budget);

struct QqRow {
  double q = 0.0;
  double theoretical = 0.0;
  double empirical = 0.0;
};

// Empirical quantiles of the point estimate over R repetitions against the
// theoretical normal quantiles, at q = i / (grid_size + 1), i = 1..grid_size.
std::vector<QqRow> QqData(const ExperimentConfig& config, Algorithm algorithm,
                          int grid_size, const ExecutionOptions& options = {});

// Coverage of the difference interval p_a - p_b over R repetitions, with
// populations a and b drawn independently. Settings other than the
// population parameters come from config_a.
struct DifferenceSummary {
  double true_difference = 0.0;
  std::vector<AlgorithmSummary> algorithms;
};
DifferenceSummary RunDifferenceExperiment(const ExperimentConfig& config_a,
                                          const ExperimentConfig& config_b,
                                          const ExecutionOptions& options = {});

}  // namespace dpstrat

#endif  // DPSTRAT_SIMHARNESS_H_
