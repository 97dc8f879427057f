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

#include "dpstrat/simharness.h"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <functional>
#include <mutex>
#include <numeric>
#include <string>
#include <thread>

#include <fmt/format.h>

#include "dpstrat/analysis.h"
#include "dpstrat/estimators.h"
#include "dpstrat/normal.h"

namespace dpstrat {
namespace {

constexpr int64_t kPopulationStreamIndex = -1;

void CheckRange(const ParameterSpec& spec, double min, double max,
                const char* name) {
  if (!std::isfinite(spec.lo) || !std::isfinite(spec.hi) || spec.lo > spec.hi ||
      spec.lo < min || spec.hi > max) {
    throw ValidationError(fmt::format("{} must satisfy {} <= lo <= hi <= {}",
                                      name, min, max));
  }
}

double DrawContinuous(RandomStream& stream, const ParameterSpec& spec) {
  if (spec.fixed()) return spec.lo;
  return spec.lo + (spec.hi - spec.lo) * stream.NextUniform();
}

int64_t DrawDiscrete(RandomStream& stream, const ParameterSpec& spec) {
  const auto lo = static_cast<int64_t>(std::ceil(spec.lo));
  const auto hi = static_cast<int64_t>(std::floor(spec.hi));
  if (lo == hi) return lo;
  return lo + static_cast<int64_t>(
                  stream.NextBelow(static_cast<uint64_t>(hi - lo + 1)));
}

int64_t RoundHalfUp(double x) { return static_cast<int64_t>(std::floor(x + 0.5)); }

unsigned ResolveThreads(unsigned requested) {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

// Calls body(r) for every repetition, possibly concurrently, honoring the
// optional execution order. Rethrows the first failure.
void ForEachRepetition(int64_t repetitions, const ExecutionOptions& options,
                       const std::function<void(int64_t)>& body) {
  const std::vector<int64_t>& order = options.execution_order;
  if (!order.empty()) {
    if (static_cast<int64_t>(order.size()) != repetitions) {
      throw ValidationError("execution_order must be a permutation of [0, R)");
    }
    std::vector<int64_t> sorted = order;
    std::sort(sorted.begin(), sorted.end());
    for (int64_t i = 0; i < repetitions; ++i) {
      if (sorted[i] != i) {
        throw ValidationError("execution_order must be a permutation of [0, R)");
      }
    }
  }
  std::atomic<int64_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (;;) {
      const int64_t i = next.fetch_add(1);
      if (i >= repetitions) return;
      try {
        body(order.empty() ? i : order[i]);
      } catch (...) {
        std::lock_guard<std::mutex> lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next.store(repetitions);
        return;
      }
    }
  };
  const unsigned threads = static_cast<unsigned>(
      std::min<int64_t>(ResolveThreads(options.threads), repetitions));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& thread : pool) thread.join();
  }
  if (failure) std::rethrow_exception(failure);
}

RandomStream RepetitionStream(uint64_t seed, std::optional<int64_t> grid_index,
                              int64_t repetition) {
  if (grid_index) return DeriveStream(seed, {*grid_index, repetition});
  return DeriveStream(seed, {repetition});
}

// Algorithms run on substreams keyed by their enum value so that adding or
// reordering algorithms leaves the others' draws untouched. Substream 0 is
// the sample.
RandomStream AlgorithmStream(const RandomStream& rep, Algorithm algorithm) {
  return rep.Substream(1 + static_cast<uint64_t>(algorithm));
}

// Summaries for the given per-repetition intervals; outcome[r * A + a].
std::vector<AlgorithmSummary> Summarize(const std::vector<Algorithm>& algorithms,
                                        const std::vector<RepetitionRecord>& outcome,
                                        const std::vector<double>& baseline_width,
                                        int64_t repetitions) {
  const size_t count = algorithms.size();
  const double reps = static_cast<double>(repetitions);
  double baseline_mean = 0.0;
  for (double w : baseline_width) baseline_mean += w;
  baseline_mean /= reps;

  std::vector<AlgorithmSummary> summaries;
  for (size_t a = 0; a < count; ++a) {
    AlgorithmSummary s;
    s.algorithm = algorithms[a];
    int64_t covered = 0;
    double sum_width = 0.0, sum_lower = 0.0, sum_upper = 0.0, sum_point = 0.0;
    for (int64_t r = 0; r < repetitions; ++r) {
      const RepetitionRecord& rec = outcome[r * count + a];
      covered += rec.covered ? 1 : 0;
      sum_width += rec.width();
      sum_lower += rec.lower;
      sum_upper += rec.upper;
      sum_point += rec.point;
    }
    s.coverage = static_cast<double>(covered) / reps;
    s.mean_width = sum_width / reps;
    s.mean_lower = sum_lower / reps;
    s.mean_upper = sum_upper / reps;
    s.mean_point = sum_point / reps;
    double ss = 0.0;
    for (int64_t r = 0; r < repetitions; ++r) {
      const double d = outcome[r * count + a].width() - s.mean_width;
      ss += d * d;
    }
    s.width_sd = repetitions > 1 ? std::sqrt(ss / (reps - 1.0)) : 0.0;
    if (s.algorithm == Algorithm::kNonPrivate) {
      s.width_ratio = 1.0;
    } else {
      s.width_ratio = baseline_mean > 0.0
                          ? s.mean_width / baseline_mean
                          : std::numeric_limits<double>::quiet_NaN();
    }
    summaries.push_back(s);
  }
  return summaries;
}

PrivacyBudget BudgetFor(const ExperimentConfig& config, double rho) {
  return PrivacyBudget(rho, config.split);
}

}  // namespace

void ValidateConfig(const ExperimentConfig& config) {
  CheckAlpha(config.alpha);
  if (config.strata < 1) throw ValidationError("strata must be at least 1");
  CheckRange(config.stratum_size, 2.0, 9.0e15, "stratum_size");
  if (std::ceil(config.stratum_size.lo) > std::floor(config.stratum_size.hi)) {
    throw ValidationError("stratum_size range contains no integer");
  }
  if (config.sample_size) {
    if (*config.sample_size < 2) {
      throw ValidationError("sample_size must be at least 2");
    }
  } else {
    CheckRange(config.sampling_rate, 0.0, 1.0, "sampling_rate");
    if (config.sampling_rate.lo <= 0.0) {
      throw ValidationError("sampling_rate must be positive");
    }
  }
  CheckRange(config.proportion, 0.0, 1.0, "proportion");
  if (!config.rho.inverse_max_sample_size && config.rho_grid.empty() &&
      !(config.rho.value > 0.0 && std::isfinite(config.rho.value))) {
    throw ValidationError("rho must be positive and finite");
  }
  for (double rho : config.rho_grid) {
    if (!(rho > 0.0 && std::isfinite(rho))) {
      throw ValidationError("rho_grid values must be positive and finite");
    }
  }
  if (!(config.split > 0.0 && config.split < 1.0)) {
    throw ValidationError("split must lie in (0, 1)");
  }
  if (config.algorithms.empty()) {
    throw ValidationError("at least one algorithm is required");
  }
  for (Algorithm a : config.algorithms) {
    if (a == Algorithm::kDifference) {
      throw ValidationError("the difference interval is not a simulation algorithm");
    }
    if (std::count(config.algorithms.begin(), config.algorithms.end(), a) > 1) {
      throw ValidationError(
          fmt::format("algorithm '{}' listed twice", AlgorithmName(a)));
    }
  }
  if (config.repetitions < 1) {
    throw ValidationError("repetitions must be at least 1");
  }
  if (config.min_sample_size < 0) {
    throw ValidationError("min_sample_size must be non-negative");
  }
}

std::vector<double> Population::stratum_proportions() const {
  std::vector<double> p(strata());
  for (size_t h = 0; h < strata(); ++h) {
    p[h] = static_cast<double>(positives[h]) /
           static_cast<double>(stratum_sizes[h]);
  }
  return p;
}

double Population::proportion() const {
  const int64_t total =
      std::accumulate(stratum_sizes.begin(), stratum_sizes.end(), int64_t{0});
  const int64_t positive =
      std::accumulate(positives.begin(), positives.end(), int64_t{0});
  return static_cast<double>(positive) / static_cast<double>(total);
}

Population GeneratePopulation(RandomStream& stream,
                              const ExperimentConfig& config) {
  RandomStream sizes = stream.Substream(0);
  RandomStream proportions = stream.Substream(1);
  Population population;
  for (int h = 0; h < config.strata; ++h) {
    const int64_t size = DrawDiscrete(sizes, config.stratum_size);
    const double p = DrawContinuous(proportions, config.proportion);
    population.stratum_sizes.push_back(size);
    population.positives.push_back(
        std::clamp<int64_t>(RoundHalfUp(p * static_cast<double>(size)), 0, size));
  }
  return population;
}

std::vector<double> DrawSamplingRates(RandomStream& stream,
                                      const ExperimentConfig& config) {
  RandomStream rates_stream = stream.Substream(2);
  std::vector<double> rates;
  for (int h = 0; h < config.strata; ++h) {
    rates.push_back(DrawContinuous(rates_stream, config.sampling_rate));
  }
  return rates;
}

std::vector<int64_t> SampleSizes(const Population& population,
                                 std::span<const double> rates,
                                 int64_t min_sample_size) {
  if (rates.size() != population.strata()) {
    throw ValidationError("one sampling rate per stratum is required");
  }
  std::vector<int64_t> sizes;
  for (size_t h = 0; h < rates.size(); ++h) {
    const int64_t N = population.stratum_sizes[h];
    const int64_t n = std::max(
        RoundHalfUp(rates[h] * static_cast<double>(N)), min_sample_size);
    if (n < 2 || n > N) {
      throw InfeasibleError(fmt::format(
          "stratum {}: sample size {} is outside [2, {}]", h, n, N));
    }
    sizes.push_back(n);
  }
  return sizes;
}

StratumCounts DrawCounts(RandomStream& stream, const Population& population,
                         const Design& design) {
  StratumCounts counts;
  counts.values.reserve(design.size());
  for (size_t h = 0; h < design.size(); ++h) {
    RandomStream sub = stream.Substream(h);
    counts.values.push_back(HypergeometricCount(sub, population.stratum_sizes[h],
                                                population.positives[h],
                                                design[h].sample_size()));
  }
  return counts;
}

Sample DrawSample(RandomStream& stream, const Population& population,
                  std::span<const double> rates, int64_t min_sample_size) {
  const std::vector<int64_t> sizes =
      SampleSizes(population, rates, min_sample_size);
  Design design = Design::FromSizes(population.stratum_sizes, sizes);
  StratumCounts counts = DrawCounts(stream, population, design);
  return Sample{std::move(design), std::move(counts)};
}

StudySetup MakeSetup(const ExperimentConfig& config) {
  return MakeSetup(config, DeriveStream(config.base_seed, {kPopulationStreamIndex}));
}

StudySetup MakeSetup(const ExperimentConfig& config,
                     RandomStream population_stream) {
  ValidateConfig(config);
  Population population = GeneratePopulation(population_stream, config);
  std::vector<double> rates;
  std::vector<int64_t> sizes;
  if (config.sample_size) {
    for (int64_t N : population.stratum_sizes) {
      rates.push_back(static_cast<double>(*config.sample_size) /
                      static_cast<double>(N));
    }
    for (size_t h = 0; h < population.strata(); ++h) {
      const int64_t n = std::max(*config.sample_size, config.min_sample_size);
      if (n > population.stratum_sizes[h]) {
        throw InfeasibleError(fmt::format(
            "stratum {}: sample size {} exceeds population size {}", h, n,
            population.stratum_sizes[h]));
      }
      sizes.push_back(n);
    }
  } else {
    rates = DrawSamplingRates(population_stream, config);
    sizes = SampleSizes(population, rates, config.min_sample_size);
  }
  Design design = Design::FromSizes(population.stratum_sizes, sizes);
  double rho = config.rho.value;
  if (config.rho.inverse_max_sample_size) {
    rho = 1.0 / static_cast<double>(*std::max_element(sizes.begin(), sizes.end()));
  }
  return StudySetup{std::move(population), std::move(rates), std::move(design),
                    rho};
}

const AlgorithmSummary& ExperimentSummary::For(Algorithm algorithm) const {
  for (const auto& s : algorithms) {
    if (s.algorithm == algorithm) return s;
  }
  throw ValidationError(fmt::format("no summary for algorithm '{}'",
                                    AlgorithmName(algorithm)));
}

ExperimentSummary RunExperiment(const ExperimentConfig& config,
                                const ExecutionOptions& options) {
  const StudySetup setup = MakeSetup(config);
  if (!config.rho.inverse_max_sample_size && config.rho.value <= 0.0) {
    throw ValidationError("a single experiment needs a positive rho");
  }
  return RunExperiment(config, setup, setup.rho, std::nullopt, options);
}

ExperimentSummary RunExperiment(const ExperimentConfig& config,
                                const StudySetup& setup, double rho,
                                std::optional<int64_t> grid_index,
                                const ExecutionOptions& options) {
  ValidateConfig(config);
  const PrivacyBudget budget = BudgetFor(config, rho);
  const ClipOptions clip{config.clip_proportions, config.clip_interval};
  const double truth = setup.population.proportion();
  const int64_t reps = config.repetitions;
  const size_t count = config.algorithms.size();

  std::vector<RepetitionRecord> outcome(static_cast<size_t>(reps) * count);
  std::vector<double> baseline(static_cast<size_t>(reps));

  ForEachRepetition(reps, options, [&](int64_t r) {
    const RandomStream rep = RepetitionStream(config.base_seed, grid_index, r);
    RandomStream sample_stream = rep.Substream(0);
    const StratumCounts counts =
        DrawCounts(sample_stream, setup.population, setup.design);
    // The non-private interval draws no noise, so computing it here is
    // the same as reading it off the algorithm list.
    baseline[r] = NonPrivateCi(setup.design, counts, config.alpha).width();
    for (size_t a = 0; a < count; ++a) {
      RandomStream noise = AlgorithmStream(rep, config.algorithms[a]);
      const PrivateCiResult result =
          RunAlgorithm(config.algorithms[a], noise, setup.design, counts,
                       budget, config.alpha, clip);
      RepetitionRecord& rec = outcome[r * count + a];
      rec.repetition = r;
      rec.algorithm = config.algorithms[a];
      rec.covered = result.ci.Covers(truth);
      rec.point = result.ci.point_estimate;
      rec.lower = result.ci.lower;
      rec.upper = result.ci.upper;
    }
  });

  ExperimentSummary summary;
  summary.true_proportion = truth;
  summary.rho = rho;
  summary.repetitions = reps;
  for (const auto& s : setup.design.strata()) {
    summary.sample_sizes.push_back(s.sample_size());
  }
  summary.algorithms = Summarize(config.algorithms, outcome, baseline, reps);
  if (options.keep_records) summary.records = std::move(outcome);
  return summary;
}

std::vector<ExperimentSummary> RhoSweep(const ExperimentConfig& config,
                                        std::span<const double> rho_grid,
                                        const ExecutionOptions& options) {
  if (rho_grid.empty()) throw ValidationError("rho grid is empty");
  const StudySetup setup = MakeSetup(config);
  std::vector<ExperimentSummary> out;
  for (size_t g = 0; g < rho_grid.size(); ++g) {
    if (!(rho_grid[g] > 0.0 && std::isfinite(rho_grid[g]))) {
      throw ValidationError("rho grid values must be positive and finite");
    }
    out.push_back(RunExperiment(config, setup, rho_grid[g],
                                static_cast<int64_t>(g), options));
  }
  return out;
}

NormalLaw TheoreticalLaw(const StudySetup& setup, Algorithm algorithm,
                         const PrivacyBudget& budget) {
  const std::vector<double> p = setup.population.stratum_proportions();
  const Design& design = setup.design;
  NormalLaw law;
  law.mean = setup.population.proportion();
  law.variance = DesignVariance(design, p);
  if (algorithm == Algorithm::kDifference) {
    throw ValidationError("no single-population law for the difference interval");
  }
  law.variance += ExtrinsicVariance(design, algorithm, budget,
                                    std::span<const double>(p));
  if (algorithm == Algorithm::kStrNzPrivSz) {
    for (size_t h = 0; h < design.size(); ++h) {
      const double n = static_cast<double>(design[h].sample_size());
      law.mean += design[h].weight() * p[h] / (2.0 * budget.rho2() * n * n);
    }
  }
  return law;
}

std::vector<QqRow> QqData(const ExperimentConfig& config, Algorithm algorithm,
                          int grid_size, const ExecutionOptions& options) {
  if (grid_size < 1) throw ValidationError("grid size must be at least 1");
  if (algorithm == Algorithm::kDifference) {
    throw ValidationError("Q-Q data is defined for single-population algorithms");
  }
  const StudySetup setup = MakeSetup(config);
  const PrivacyBudget budget = BudgetFor(config, setup.rho);
  const ClipOptions clip{config.clip_proportions, config.clip_interval};
  const int64_t reps = config.repetitions;
  std::vector<double> points(static_cast<size_t>(reps));
  ForEachRepetition(reps, options, [&](int64_t r) {
    const RandomStream rep = RepetitionStream(config.base_seed, std::nullopt, r);
    RandomStream sample_stream = rep.Substream(0);
    const StratumCounts counts =
        DrawCounts(sample_stream, setup.population, setup.design);
    RandomStream noise = AlgorithmStream(rep, algorithm);
    points[r] = RunAlgorithm(algorithm, noise, setup.design, counts, budget,
                             config.alpha, clip)
                    .ci.point_estimate;
  });
  std::sort(points.begin(), points.end());

  const NormalLaw law = TheoreticalLaw(setup, algorithm, budget);
  const double sd = std::sqrt(law.variance);
  std::vector<QqRow> rows;
  for (int i = 1; i <= grid_size; ++i) {
    QqRow row;
    row.q = static_cast<double>(i) / static_cast<double>(grid_size + 1);
    row.theoretical = law.mean + sd * NormalQuantile(row.q);
    // Linear interpolation between order statistics (type 7).
    const double h = static_cast<double>(reps - 1) * row.q;
    const auto lo = static_cast<size_t>(std::floor(h));
    const size_t hi = std::min(lo + 1, points.size() - 1);
    row.empirical = points[lo] + (h - static_cast<double>(lo)) * (points[hi] - points[lo]);
    rows.push_back(row);
  }
  return rows;
}

DifferenceSummary RunDifferenceExperiment(const ExperimentConfig& config_a,
                                          const ExperimentConfig& config_b,
                                          const ExecutionOptions& options) {
  const uint64_t seed = config_a.base_seed;
  const StudySetup a = MakeSetup(
      config_a, DeriveStream(seed, {kPopulationStreamIndex, int64_t{0}}));
  const StudySetup b = MakeSetup(
      config_b, DeriveStream(seed, {kPopulationStreamIndex, int64_t{1}}));
  const PrivacyBudget budget_a = BudgetFor(config_a, a.rho);
  const PrivacyBudget budget_b = BudgetFor(config_a, b.rho);
  const ClipOptions clip{config_a.clip_proportions, config_a.clip_interval};
  const double alpha = config_a.alpha;
  const double truth = a.population.proportion() - b.population.proportion();
  const int64_t reps = config_a.repetitions;
  const size_t count = config_a.algorithms.size();

  std::vector<RepetitionRecord> outcome(static_cast<size_t>(reps) * count);
  std::vector<double> baseline(static_cast<size_t>(reps));
  ForEachRepetition(reps, options, [&](int64_t r) {
    const RandomStream rep_a = DeriveStream(seed, {r, int64_t{0}});
    const RandomStream rep_b = DeriveStream(seed, {r, int64_t{1}});
    RandomStream sa = rep_a.Substream(0);
    RandomStream sb = rep_b.Substream(0);
    const StratumCounts counts_a = DrawCounts(sa, a.population, a.design);
    const StratumCounts counts_b = DrawCounts(sb, b.population, b.design);
    baseline[r] = DifferenceCi(NonPrivateCi(a.design, counts_a, alpha),
                               NonPrivateCi(b.design, counts_b, alpha), alpha)
                      .width();
    for (size_t i = 0; i < count; ++i) {
      const Algorithm alg = config_a.algorithms[i];
      RandomStream na = AlgorithmStream(rep_a, alg);
      RandomStream nb = AlgorithmStream(rep_b, alg);
      const CiResult ci_a =
          RunAlgorithm(alg, na, a.design, counts_a, budget_a, alpha, clip).ci;
      const CiResult ci_b =
          RunAlgorithm(alg, nb, b.design, counts_b, budget_b, alpha, clip).ci;
      const CiResult diff = DifferenceCi(ci_a, ci_b, alpha);
      RepetitionRecord& rec = outcome[r * count + i];
      rec.repetition = r;
      rec.algorithm = alg;
      rec.covered = diff.Covers(truth);
      rec.point = diff.point_estimate;
      rec.lower = diff.lower;
      rec.upper = diff.upper;
    }
  });
  DifferenceSummary summary;
  summary.true_difference = truth;
  summary.algorithms = Summarize(config_a.algorithms, outcome, baseline, reps);
  return summary;
}

}  // namespace dpstrat
