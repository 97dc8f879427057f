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
#include <cmath>
#include <numeric>
#include <random>
#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "dpstrat/analysis.h"
#include "dpstrat/estimators.h"

namespace dpstrat {
namespace {

ExperimentConfig SmallConfig() {
  ExperimentConfig c;
  c.strata = 3;
  c.stratum_size = ParameterSpec::Uniform(800, 1200);
  c.sampling_rate = ParameterSpec::Uniform(0.05, 0.1);
  c.proportion = ParameterSpec::Uniform(0.3, 0.6);
  c.rho.value = 0.01;
  c.repetitions = 300;
  c.base_seed = 5;
  return c;
}

bool SameSummary(const ExperimentSummary& a, const ExperimentSummary& b) {
  if (a.algorithms.size() != b.algorithms.size()) return false;
  for (size_t i = 0; i < a.algorithms.size(); ++i) {
    const AlgorithmSummary& x = a.algorithms[i];
    const AlgorithmSummary& y = b.algorithms[i];
    if (x.algorithm != y.algorithm || x.coverage != y.coverage ||
        x.mean_width != y.mean_width || x.width_sd != y.width_sd ||
        x.width_ratio != y.width_ratio || x.mean_lower != y.mean_lower ||
        x.mean_upper != y.mean_upper || x.mean_point != y.mean_point) {
      return false;
    }
  }
  return a.true_proportion == b.true_proportion && a.rho == b.rho &&
         a.sample_sizes == b.sample_sizes;
}

TEST(PopulationTest, FixedConfig) {
  ExperimentConfig c;
  c.stratum_size = ParameterSpec::Fixed(2000);
  c.proportion = ParameterSpec::Fixed(0.5);
  RandomStream s(1, 0);
  const Population pop = GeneratePopulation(s, c);
  ASSERT_EQ(pop.strata(), 1u);
  EXPECT_EQ(pop.stratum_sizes[0], 2000);
  EXPECT_EQ(pop.positives[0], 1000);
  EXPECT_EQ(pop.proportion(), 0.5);
}

TEST(PopulationTest, DrawsStayInRange) {
  ExperimentConfig c = SmallConfig();
  c.strata = 200;
  RandomStream s(2, 0);
  const Population pop = GeneratePopulation(s, c);
  int64_t total = 0, positive = 0;
  for (size_t h = 0; h < pop.strata(); ++h) {
    ASSERT_GE(pop.stratum_sizes[h], 800);
    ASSERT_LE(pop.stratum_sizes[h], 1200);
    const double p = static_cast<double>(pop.positives[h]) / pop.stratum_sizes[h];
    ASSERT_GE(p, 0.3 - 1e-3);
    ASSERT_LE(p, 0.6 + 1e-3);
    total += pop.stratum_sizes[h];
    positive += pop.positives[h];
  }
  EXPECT_DOUBLE_EQ(pop.proportion(), static_cast<double>(positive) / total);
  const int64_t distinct = static_cast<int64_t>(
      std::set<int64_t>(pop.stratum_sizes.begin(), pop.stratum_sizes.end()).size());
  EXPECT_GT(distinct, 100);
}

TEST(PopulationTest, RoundsHalfUp) {
  ExperimentConfig c;
  c.stratum_size = ParameterSpec::Fixed(10);
  c.proportion = ParameterSpec::Fixed(0.25);
  RandomStream s(1, 0);
  EXPECT_EQ(GeneratePopulation(s, c).positives[0], 3);
}

TEST(SampleSizesTest, RoundingAndFloor) {
  Population pop;
  pop.stratum_sizes = {1000, 1999, 100};
  pop.positives = {10, 10, 10};
  const std::vector<double> rates = {0.0765, 0.05, 0.5};
  EXPECT_EQ(SampleSizes(pop, rates), (std::vector<int64_t>{77, 100, 50}));
  EXPECT_EQ(SampleSizes(pop, rates, 60), (std::vector<int64_t>{77, 100, 60}));
  EXPECT_THROW(SampleSizes(pop, rates, 101), InfeasibleError);
  const std::vector<double> tiny = {0.0001, 0.5, 0.5};
  EXPECT_THROW(SampleSizes(pop, tiny), InfeasibleError);
}

TEST(DrawSampleTest, CensusAndEmptyClass) {
  Population pop;
  pop.stratum_sizes = {300, 400};
  pop.positives = {120, 0};
  RandomStream s(3, 0);
  const std::vector<double> census = {1.0, 0.5};
  const Sample sample = DrawSample(s, pop, census);
  EXPECT_EQ(sample.counts.values[0], 120);
  EXPECT_EQ(sample.counts.values[1], 0);
  EXPECT_EQ(sample.design[0].sample_size(), 300);
}

TEST(DrawSampleTest, Unbiased) {
  Population pop;
  pop.stratum_sizes = {1000, 3000};
  pop.positives = {200, 1800};
  const std::vector<double> rates = {0.05, 0.04};
  const Design d = Design::FromSizes(pop.stratum_sizes, std::vector<int64_t>{50, 120});
  const int draws = 100000;
  double sum = 0.0;
  for (int i = 0; i < draws; ++i) {
    RandomStream s = DeriveStream(4, {i});
    sum += ProportionEstimate(d, DrawCounts(s, pop, d)).p_hat;
  }
  const std::vector<double> p = pop.stratum_proportions();
  const double sd = std::sqrt(DesignVariance(d, p) / draws);
  EXPECT_NEAR(sum / draws, pop.proportion(), 4.0 * sd);
}

TEST(ValidateConfigTest, RejectsBadSettings) {
  ExperimentConfig c = SmallConfig();
  EXPECT_NO_THROW(ValidateConfig(c));
  auto expect_bad = [](auto mutate) {
    ExperimentConfig x = SmallConfig();
    mutate(x);
    EXPECT_THROW(ValidateConfig(x), ValidationError);
  };
  expect_bad([](ExperimentConfig& x) { x.repetitions = 0; });
  expect_bad([](ExperimentConfig& x) { x.alpha = 1.0; });
  expect_bad([](ExperimentConfig& x) { x.strata = 0; });
  expect_bad([](ExperimentConfig& x) { x.sampling_rate = ParameterSpec::Fixed(0.0); });
  expect_bad([](ExperimentConfig& x) { x.sampling_rate = ParameterSpec::Fixed(1.5); });
  expect_bad([](ExperimentConfig& x) { x.proportion = ParameterSpec::Uniform(0.6, 0.4); });
  expect_bad([](ExperimentConfig& x) { x.rho.value = 0.0; });
  expect_bad([](ExperimentConfig& x) { x.split = 1.0; });
  expect_bad([](ExperimentConfig& x) { x.algorithms.clear(); });
  expect_bad([](ExperimentConfig& x) { x.algorithms = {Algorithm::kDifference}; });
  expect_bad([](ExperimentConfig& x) {
    x.algorithms = {Algorithm::kStrNzPubSz, Algorithm::kStrNzPubSz};
  });
}

TEST(RunExperimentTest, SummaryInvariants) {
  const ExperimentSummary s = RunExperiment(SmallConfig());
  ASSERT_EQ(s.algorithms.size(), 4u);
  EXPECT_EQ(s.For(Algorithm::kNonPrivate).width_ratio, 1.0);
  for (const AlgorithmSummary& a : s.algorithms) {
    EXPECT_GE(a.coverage, 0.0);
    EXPECT_LE(a.coverage, 1.0);
    EXPECT_GE(a.mean_width, 0.0);
    EXPECT_GE(a.width_sd, 0.0);
    EXPECT_NEAR(a.mean_upper - a.mean_lower, a.mean_width, 1e-12);
  }
  EXPECT_EQ(s.repetitions, 300);
  EXPECT_EQ(s.sample_sizes.size(), 3u);
  EXPECT_TRUE(s.records.empty());
}

TEST(RunExperimentTest, RecordsMatchSummary) {
  ExecutionOptions opts;
  opts.keep_records = true;
  const ExperimentSummary s = RunExperiment(SmallConfig(), opts);
  ASSERT_EQ(s.records.size(), 300u * 4u);
  for (size_t a = 0; a < 4; ++a) {
    double width = 0.0, ss = 0.0;
    int covered = 0;
    for (int64_t r = 0; r < 300; ++r) {
      const RepetitionRecord& rec = s.records[r * 4 + a];
      ASSERT_EQ(rec.repetition, r);
      width += rec.width();
      covered += rec.covered;
    }
    const double mean = width / 300;
    for (int64_t r = 0; r < 300; ++r) {
      const double d = s.records[r * 4 + a].width() - mean;
      ss += d * d;
    }
    EXPECT_NEAR(s.algorithms[a].mean_width, mean, 1e-15);
    EXPECT_NEAR(s.algorithms[a].width_sd, std::sqrt(ss / 299.0), 1e-15);
    EXPECT_EQ(s.algorithms[a].coverage, covered / 300.0);
  }
}

TEST(RunExperimentTest, BitIdenticalAcrossRunsThreadsAndOrder) {
  const ExperimentConfig c = SmallConfig();
  const ExperimentSummary base = RunExperiment(c);
  EXPECT_TRUE(SameSummary(base, RunExperiment(c)));

  ExecutionOptions threaded;
  threaded.threads = 4;
  EXPECT_TRUE(SameSummary(base, RunExperiment(c, threaded)));

  ExecutionOptions shuffled;
  shuffled.execution_order.resize(c.repetitions);
  std::iota(shuffled.execution_order.begin(), shuffled.execution_order.end(), 0);
  std::mt19937_64 gen(1);
  std::shuffle(shuffled.execution_order.begin(), shuffled.execution_order.end(), gen);
  EXPECT_TRUE(SameSummary(base, RunExperiment(c, shuffled)));
  std::reverse(shuffled.execution_order.begin(), shuffled.execution_order.end());
  shuffled.threads = 3;
  EXPECT_TRUE(SameSummary(base, RunExperiment(c, shuffled)));

  ExecutionOptions bad;
  bad.execution_order = {0, 0, 1};
  EXPECT_THROW(RunExperiment(c, bad), ValidationError);
}

TEST(RunExperimentTest, AlgorithmListOrderDoesNotChangeDraws) {
  ExperimentConfig c = SmallConfig();
  const ExperimentSummary all = RunExperiment(c);
  c.algorithms = {Algorithm::kStrNzPrivSz, Algorithm::kNonPrivate};
  const ExperimentSummary some = RunExperiment(c);
  EXPECT_EQ(some.For(Algorithm::kStrNzPrivSz).mean_width,
            all.For(Algorithm::kStrNzPrivSz).mean_width);
  EXPECT_EQ(some.For(Algorithm::kStrNzPrivSz).width_ratio,
            all.For(Algorithm::kStrNzPrivSz).width_ratio);
}

TEST(RunExperimentTest, SeedChangesResults) {
  ExperimentConfig c = SmallConfig();
  const ExperimentSummary a = RunExperiment(c);
  c.base_seed = 6;
  EXPECT_FALSE(SameSummary(a, RunExperiment(c)));
}

TEST(RunExperimentTest, InverseMaxSampleSizeRule) {
  ExperimentConfig c = SmallConfig();
  c.rho.inverse_max_sample_size = true;
  c.rho.value = 0.0;
  const ExperimentSummary s = RunExperiment(c);
  const int64_t max_n = *std::max_element(s.sample_sizes.begin(), s.sample_sizes.end());
  EXPECT_DOUBLE_EQ(s.rho, 1.0 / static_cast<double>(max_n));
}

TEST(RunExperimentTest, InfeasibleSampling) {
  ExperimentConfig c = SmallConfig();
  c.min_sample_size = 5000;
  EXPECT_THROW(RunExperiment(c), InfeasibleError);
}

TEST(RunExperimentTest, SingleRepetition) {
  ExperimentConfig c = SmallConfig();
  c.repetitions = 1;
  const ExperimentSummary s = RunExperiment(c);
  for (const AlgorithmSummary& a : s.algorithms) {
    EXPECT_TRUE(a.coverage == 0.0 || a.coverage == 1.0);
    EXPECT_EQ(a.width_sd, 0.0);
  }
}

TEST(RhoSweepTest, SharedPopulationAndCardinality) {
  ExperimentConfig c = SmallConfig();
  const std::vector<double> grid = {1e-3, 1e-2, 1e-1};
  const std::vector<ExperimentSummary> out = RhoSweep(c, grid);
  ASSERT_EQ(out.size(), 3u);
  for (size_t g = 0; g < 3; ++g) {
    EXPECT_EQ(out[g].rho, grid[g]);
    EXPECT_EQ(out[g].true_proportion, out[0].true_proportion);
    EXPECT_EQ(out[g].sample_sizes, out[0].sample_sizes);
    EXPECT_EQ(out[g].algorithms.size(), 4u);
  }
  for (Algorithm a : {Algorithm::kStrNzPubSz, Algorithm::kPopNzPubSz,
                      Algorithm::kStrNzPrivSz}) {
    EXPECT_GT(out[0].For(a).mean_width, out[1].For(a).mean_width);
    EXPECT_GT(out[1].For(a).mean_width, out[2].For(a).mean_width);
  }
  EXPECT_THROW(RhoSweep(c, {}), ValidationError);
}

TEST(TheoreticalLawTest, PrivateSizeBiasOffset) {
  ExperimentConfig c;
  c.stratum_size = ParameterSpec::Fixed(2000);
  c.sample_size = 152;
  c.proportion = ParameterSpec::Fixed(0.5);
  c.rho.value = 1.0 / 152.0;
  const StudySetup setup = MakeSetup(c);
  const PrivacyBudget b(1.0 / 152.0);
  const NormalLaw priv = TheoreticalLaw(setup, Algorithm::kStrNzPrivSz, b);
  EXPECT_NEAR(priv.mean - 0.5, 3.289e-3, 5e-7);
  const NormalLaw pub = TheoreticalLaw(setup, Algorithm::kStrNzPubSz, b);
  EXPECT_EQ(pub.mean, 0.5);
  const Design& d = setup.design;
  const std::vector<double> p = {0.5};
  EXPECT_NEAR(pub.variance,
              DesignVariance(d, p) + 1.0 / (2.0 * b.rho() * 152.0 * 152.0), 1e-18);
}

TEST(QqDataTest, SingleGridPointIsMedian) {
  ExperimentConfig c = SmallConfig();
  c.algorithms = {Algorithm::kNonPrivate};
  const std::vector<QqRow> rows = QqData(c, Algorithm::kNonPrivate, 1);
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].q, 0.5);
}

TEST(QqDataTest, NonPrivateLargeSampleIsClose) {
  ExperimentConfig c;
  c.strata = 4;
  c.stratum_size = ParameterSpec::Fixed(20000);
  c.sample_size = 2000;
  c.proportion = ParameterSpec::Uniform(0.3, 0.5);
  c.rho.value = 1.0;
  c.repetitions = 5000;
  c.base_seed = 8;
  const std::vector<QqRow> rows = QqData(c, Algorithm::kNonPrivate, 99);
  ASSERT_EQ(rows.size(), 99u);
  double gap = 0.0;
  for (const QqRow& r : rows) {
    if (r.q < 0.05 || r.q > 0.95) continue;
    gap = std::max(gap, std::fabs(r.empirical - r.theoretical));
  }
  EXPECT_LE(gap, 0.01);
  EXPECT_TRUE(std::is_sorted(rows.begin(), rows.end(), [](const QqRow& a, const QqRow& b) {
    return a.empirical < b.empirical;
  }));
}

TEST(QqDataTest, MedianNearTheoreticalMean) {
  ExperimentConfig c = SmallConfig();
  c.repetitions = 4000;
  c.clip_proportions = false;
  for (Algorithm a : {Algorithm::kStrNzPubSz, Algorithm::kPopNzPubSz}) {
    const std::vector<QqRow> rows = QqData(c, a, 1);
    const StudySetup setup = MakeSetup(c);
    const NormalLaw law = TheoreticalLaw(setup, a, PrivacyBudget(0.01));
    // Standard error of a sample median of a normal: sd sqrt(pi / (2 R)).
    const double se = std::sqrt(law.variance * 3.14159265 / (2.0 * 4000));
    EXPECT_NEAR(rows[0].empirical, law.mean, 3.0 * se) << AlgorithmName(a);
    EXPECT_EQ(rows[0].theoretical, law.mean);
  }
}

TEST(DifferenceExperimentTest, CoversKnownDifference) {
  ExperimentConfig a;
  a.strata = 5;
  a.stratum_size = ParameterSpec::Uniform(1500, 2000);
  a.sampling_rate = ParameterSpec::Uniform(0.04, 0.08);
  a.proportion = ParameterSpec::Fixed(0.5);
  a.rho.value = 0.05;
  a.repetitions = 2000;
  a.base_seed = 9;
  ExperimentConfig b = a;
  b.proportion = ParameterSpec::Fixed(0.3);
  const DifferenceSummary s = RunDifferenceExperiment(a, b);
  EXPECT_NEAR(s.true_difference, 0.2, 1e-3);
  for (const AlgorithmSummary& x : s.algorithms) {
    EXPECT_NEAR(x.coverage, 0.9, 0.03) << AlgorithmName(x.algorithm);
  }
}

}  // namespace
}  // namespace dpstrat
