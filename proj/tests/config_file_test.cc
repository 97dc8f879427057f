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

#include "dpstrat/config_file.h"

#include <string>

#include <gtest/gtest.h>

namespace dpstrat {
namespace {

constexpr char kMinimal[] = R"(# comment line
strata = 20
stratum_size = uniform(1500, 2000)
sampling_rate = uniform(0.04, 0.08)   # trailing comment
proportion = 0.5
rho = 1/max_n
algorithms = nonprivate, str-priv
repetitions = 100
base_seed = 18446744073709551615
)";

TEST(ConfigFileTest, ParsesAllForms) {
  const ExperimentConfig c = ParseExperimentConfig(kMinimal);
  EXPECT_EQ(c.strata, 20);
  EXPECT_EQ(c.stratum_size, ParameterSpec::Uniform(1500, 2000));
  EXPECT_EQ(c.sampling_rate, ParameterSpec::Uniform(0.04, 0.08));
  EXPECT_EQ(c.proportion, ParameterSpec::Fixed(0.5));
  EXPECT_TRUE(c.rho.inverse_max_sample_size);
  EXPECT_EQ(c.algorithms,
            (std::vector<Algorithm>{Algorithm::kNonPrivate, Algorithm::kStrNzPrivSz}));
  EXPECT_EQ(c.repetitions, 100);
  EXPECT_EQ(c.base_seed, 18446744073709551615u);
  EXPECT_EQ(c.alpha, 0.1);
  EXPECT_EQ(c.split, 0.5);
  EXPECT_TRUE(c.clip_proportions);
  EXPECT_FALSE(c.clip_interval);
  EXPECT_EQ(c.min_sample_size, 0);
}

TEST(ConfigFileTest, OptionalKeysAndReciprocals) {
  const ExperimentConfig c = ParseExperimentConfig(
      "strata=1\nstratum_size=2000\nsample_size=152\nproportion=0.5\n"
      "rho=1/152\nalgorithms=str-pub\nrepetitions=1\nbase_seed=0\n"
      "alpha=0.05\nsplit=0.25\nclip_proportions=false\nclip_interval=true\n"
      "min_sample_size=50\n");
  EXPECT_EQ(c.sample_size, 152);
  EXPECT_EQ(c.rho.value, 1.0 / 152.0);
  EXPECT_EQ(c.alpha, 0.05);
  EXPECT_EQ(c.split, 0.25);
  EXPECT_FALSE(c.clip_proportions);
  EXPECT_TRUE(c.clip_interval);
  EXPECT_EQ(c.min_sample_size, 50);
}

TEST(ConfigFileTest, RhoGrid) {
  const ExperimentConfig c = ParseExperimentConfig(
      "strata=1\nstratum_size=2000\nsample_size=152\nproportion=0.5\n"
      "rho_grid=1e-3, 0.01,1/10\nalgorithms=str-pub\nrepetitions=1\nbase_seed=0\n");
  EXPECT_EQ(c.rho_grid, (std::vector<double>{1e-3, 0.01, 0.1}));
}

void ExpectRejected(const std::string& text, const std::string& fragment) {
  try {
    ParseExperimentConfig(text);
    ADD_FAILURE() << "accepted: " << text;
  } catch (const ValidationError& e) {
    EXPECT_NE(std::string(e.what()).find(fragment), std::string::npos) << e.what();
  }
}

TEST(ConfigFileTest, StrictSchema) {
  const std::string base(kMinimal);
  ExpectRejected(base + "rh0 = 0.1\n", "unknown key 'rh0'");
  ExpectRejected(base + "strata = 3\n", "already set on line 2");
  ExpectRejected(base + "just some words\n", "line 10");
  ExpectRejected(base + "alpha =\n", "has no value");
  ExpectRejected("strata = 1\n", "missing required key");
  ExpectRejected(base + "sample_size = 10\n", "exactly one of 'sampling_rate'");
  ExpectRejected(base + "rho_grid = 0.1\n", "exactly one of 'rho'");
}

TEST(ConfigFileTest, MalformedValues) {
  const std::string tail =
      "stratum_size=2000\nsample_size=152\nproportion=0.5\nrho=0.1\n"
      "algorithms=str-pub\nrepetitions=10\nbase_seed=0\n";
  ExpectRejected("strata=two\n" + tail, "expects an integer");
  ExpectRejected("strata=1.5\n" + tail, "expects an integer");
  ExpectRejected("strata=1\nalpha=0.1x\n" + tail, "expects a number");
  ExpectRejected("strata=1\nclip_interval=yes\n" + tail, "true or false");
  ExpectRejected("strata=1\nsplit=uniform(1)\n" + tail, "expects a number");
  ExpectRejected(
      "strata=1\nstratum_size=2000\nsample_size=152\nproportion=uniform(0.1)\n"
      "rho=0.1\nalgorithms=str-pub\nrepetitions=10\nbase_seed=0\n",
      "uniform(lo, hi)");
  ExpectRejected(
      "strata=1\nstratum_size=2000\nsample_size=152\nproportion=0.5\n"
      "rho=0.1\nalgorithms=str-pub, pop-priv\nrepetitions=10\nbase_seed=0\n",
      "pop-priv");
  ExpectRejected(
      "strata=1\nstratum_size=2000\nsample_size=152\nproportion=0.5\n"
      "rho=0.1\nalgorithms=str-pub\nrepetitions=0\nbase_seed=0\n",
      "repetitions");
  ExpectRejected(
      "strata=1\nstratum_size=2000\nsample_size=152\nproportion=0.5\n"
      "rho=1/0\nalgorithms=str-pub\nrepetitions=1\nbase_seed=0\n",
      "positive denominator");
}

TEST(ConfigFileTest, ShippedConfigsLoad) {
  for (const char* name : {"one_stratum", "twenty_strata", "twenty_strata_rare",
                           "rho_sweep", "smoke", "qq_str_priv"}) {
    EXPECT_NO_THROW(LoadExperimentConfig(std::string(DPSTRAT_SOURCE_DIR) +
                                         "/configs/" + name + ".cfg"))
        << name;
  }
  EXPECT_THROW(LoadExperimentConfig("/nonexistent/x.cfg"), ValidationError);
}

}  // namespace
}  // namespace dpstrat
