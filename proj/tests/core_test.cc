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

#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "dpstrat/normal.h"

namespace dpstrat {
namespace {

TEST(AlgorithmNameTest, RoundTrips) {
  for (Algorithm a : {Algorithm::kNonPrivate, Algorithm::kStrNzPubSz,
                      Algorithm::kPopNzPubSz, Algorithm::kStrNzPrivSz,
                      Algorithm::kDifference}) {
    EXPECT_EQ(ParseAlgorithm(AlgorithmName(a)), a);
  }
  EXPECT_THROW(ParseAlgorithm("pop-priv"), ValidationError);
}

TEST(StratumDesignTest, RejectsBadSizes) {
  EXPECT_NO_THROW(StratumDesign(2000, 152, 1.0));
  EXPECT_NO_THROW(StratumDesign(2, 2, 1.0));
  EXPECT_THROW(StratumDesign(2000, 1, 1.0), ValidationError);
  EXPECT_THROW(StratumDesign(100, 101, 1.0), ValidationError);
  EXPECT_THROW(StratumDesign(100, 10, 0.0), ValidationError);
  EXPECT_THROW(StratumDesign(100, 10, 1.5), ValidationError);
}

TEST(DesignTest, WeightsFromSizes) {
  const std::vector<int64_t> big_n = {1000, 3000};
  const std::vector<int64_t> n = {50, 100};
  const Design d = Design::FromSizes(big_n, n);
  ASSERT_EQ(d.size(), 2u);
  EXPECT_DOUBLE_EQ(d[0].weight(), 0.25);
  EXPECT_DOUBLE_EQ(d[1].weight(), 0.75);
  EXPECT_EQ(d.total_population(), 4000);
  EXPECT_DOUBLE_EQ(d[1].sampling_weight(), 30.0);
}

TEST(DesignTest, WeightSumTolerance) {
  const std::vector<int64_t> big_n = {1000, 3000};
  const std::vector<int64_t> n = {50, 100};
  const std::vector<double> ok = {0.25, 0.75};
  const std::vector<double> off = {0.25, 0.75 + 1e-9};
  EXPECT_NO_THROW(Design::WithWeights(big_n, n, ok));
  EXPECT_THROW(Design::WithWeights(big_n, n, off), ValidationError);
  const std::vector<int64_t> short_n = {50};
  EXPECT_THROW(Design::FromSizes(big_n, short_n), ValidationError);
  EXPECT_THROW(Design::FromSizes({}, {}), ValidationError);
}

TEST(CountsTest, Validation) {
  const std::vector<int64_t> big_n = {100};
  const std::vector<int64_t> n = {10};
  const Design d = Design::FromSizes(big_n, n);
  EXPECT_NO_THROW(ValidateCounts(d, {{0}}));
  EXPECT_NO_THROW(ValidateCounts(d, {{10}}));
  EXPECT_THROW(ValidateCounts(d, {{11}}), ValidationError);
  EXPECT_THROW(ValidateCounts(d, {{-1}}), ValidationError);
  EXPECT_THROW(ValidateCounts(d, {{1, 2}}), ValidationError);
  EXPECT_DOUBLE_EQ(SampleProportions(d, {{3}})[0], 0.3);
}

TEST(PrivacyBudgetTest, SplitsSumExactly) {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> log_rho(-12.0, 12.0);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  for (int i = 0; i < 10000; ++i) {
    const double rho = std::pow(10.0, log_rho(gen));
    const double f = frac(gen);
    const PrivacyBudget b(rho, f);
    ASSERT_EQ(b.rho1() + b.rho2(), rho) << rho << " " << f;
    ASSERT_GE(b.rho1(), 0.0);
    ASSERT_GE(b.rho2(), 0.0);
  }
  const PrivacyBudget even(1.0 / 152.0);
  EXPECT_EQ(even.rho1(), even.rho2());
}

TEST(PrivacyBudgetTest, RejectsInvalid) {
  EXPECT_THROW(PrivacyBudget(0.0), ValidationError);
  EXPECT_THROW(PrivacyBudget(-1.0), ValidationError);
  EXPECT_THROW(PrivacyBudget{INFINITY}, ValidationError);
  EXPECT_THROW(PrivacyBudget(1.0, 1.5), ValidationError);
  EXPECT_THROW(PrivacyBudget(1.0, NAN), ValidationError);
  EXPECT_THROW(PrivacyBudget::FromParts(0.0, 0.0), ValidationError);
}

TEST(PrivacyBudgetTest, Compose) {
  const PrivacyBudget c = ComposeBudgets(PrivacyBudget(0.3), PrivacyBudget(0.2));
  EXPECT_DOUBLE_EQ(c.rho(), 0.5);
  EXPECT_DOUBLE_EQ(c.rho1(), 0.3);
  EXPECT_DOUBLE_EQ(c.rho2(), 0.2);
}

TEST(WaldIntervalTest, WidthIdentity) {
  std::mt19937_64 gen(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const double est = u(gen);
    const double var = 0.01 * u(gen);
    const double alpha = 0.01 + 0.3 * u(gen);
    const CiResult r = MakeWaldInterval(est, var, alpha, Algorithm::kNonPrivate);
    const double z = TwoSidedCriticalValue(alpha);
    EXPECT_NEAR(r.width(), 2.0 * z * std::sqrt(var), 1e-14);
    EXPECT_FALSE(r.flags.any());
  }
}

TEST(WaldIntervalTest, RejectsBadInput) {
  EXPECT_THROW(MakeWaldInterval(0.5, -1e-9, 0.1, Algorithm::kNonPrivate),
               ValidationError);
  EXPECT_THROW(MakeWaldInterval(0.5, NAN, 0.1, Algorithm::kNonPrivate),
               ValidationError);
  EXPECT_THROW(MakeWaldInterval(0.5, 0.1, 0.0, Algorithm::kNonPrivate),
               ValidationError);
  EXPECT_THROW(MakeWaldInterval(0.5, 0.1, 1.0, Algorithm::kNonPrivate),
               ValidationError);
}

TEST(WaldIntervalTest, ZeroVarianceIsDegenerate) {
  const CiResult r = MakeWaldInterval(0.3, 0.0, 0.1, Algorithm::kNonPrivate);
  EXPECT_EQ(r.lower, 0.3);
  EXPECT_EQ(r.upper, 0.3);
}

TEST(ClipIntervalTest, ClampsAndFlags) {
  CiResult r = MakeWaldInterval(0.95, 0.01, 0.1, Algorithm::kStrNzPubSz);
  ClipIntervalToUnit(r);
  EXPECT_EQ(r.upper, 1.0);
  EXPECT_TRUE(r.flags.interval_clipped);
  CiResult inside = MakeWaldInterval(0.5, 0.0001, 0.1, Algorithm::kStrNzPubSz);
  ClipIntervalToUnit(inside);
  EXPECT_FALSE(inside.flags.interval_clipped);
  CiResult below = MakeWaldInterval(-0.1, 0.0001, 0.1, Algorithm::kStrNzPubSz);
  ClipIntervalToUnit(below);
  EXPECT_EQ(below.point_estimate, 0.0);
  EXPECT_EQ(below.lower, 0.0);
}

TEST(CiResultTest, CoversIsClosed) {
  CiResult r;
  r.lower = 0.2;
  r.upper = 0.4;
  EXPECT_TRUE(r.Covers(0.2));
  EXPECT_TRUE(r.Covers(0.4));
  EXPECT_FALSE(r.Covers(0.41));
}

}  // namespace
}  // namespace dpstrat
