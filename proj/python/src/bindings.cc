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

// Python bindings. Results cross the boundary either as plain numbers or as
// the same JSON documents the command-line tool writes, so both front ends
// share one serialization.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "dpstrat/analysis.h"
#include "dpstrat/config_file.h"
#include "dpstrat/core.h"
#include "dpstrat/dp_ci.h"
#include "dpstrat/estimators.h"
#include "dpstrat/io.h"
#include "dpstrat/random.h"
#include "dpstrat/simharness.h"

namespace py = pybind11;

namespace dpstrat {
namespace {

StratumData MakeData(const std::vector<int64_t>& population_sizes,
                     const std::vector<int64_t>& sample_sizes,
                     const std::vector<int64_t>& counts) {
  if (population_sizes.size() != sample_sizes.size() ||
      population_sizes.size() != counts.size()) {
    throw ValidationError("population_sizes, sample_sizes and counts differ in length");
  }
  StratumData data;
  data.population_sizes = population_sizes;
  data.sample_sizes = sample_sizes;
  data.counts.values = counts;
  for (size_t h = 0; h < counts.size(); ++h) data.ids.push_back(static_cast<int64_t>(h + 1));
  ValidateCounts(data.design(), data.counts);
  return data;
}

std::string CiJson(const std::vector<int64_t>& population_sizes,
                   const std::vector<int64_t>& sample_sizes,
                   const std::vector<int64_t>& counts, const std::string& algorithm,
                   std::optional<double> rho, double split, double alpha, uint64_t seed,
                   bool clip_proportions, bool clip_interval) {
  const StratumData data = MakeData(population_sizes, sample_sizes, counts);
  const Algorithm a = ParseAlgorithm(algorithm);
  if (a == Algorithm::kDifference) {
    throw ValidationError("use the two-dataset difference interval for 'difference'");
  }
  if (a != Algorithm::kNonPrivate && !rho) {
    throw ValidationError("rho is required for private algorithms");
  }
  // The non-private interval ignores the budget.
  const PrivacyBudget budget = rho ? PrivacyBudget(*rho, split) : PrivacyBudget(1.0, 0.5);
  ClipOptions clip;
  clip.clip_proportions = clip_proportions;
  clip.clip_interval = clip_interval;
  py::gil_scoped_release release;
  RandomStream stream(seed, 0);
  return CiToJson(RunAlgorithm(a, stream, data.design(), data.counts, budget, alpha, clip),
                  data.ids);
}

Design MakeDesign(const std::vector<int64_t>& population_sizes,
                  const std::vector<int64_t>& sample_sizes) {
  if (population_sizes.size() != sample_sizes.size()) {
    throw ValidationError("population_sizes and sample_sizes differ in length");
  }
  return Design::FromSizes(population_sizes, sample_sizes);
}

ExperimentConfig ConfigFrom(const std::string& text, std::optional<int64_t> repetitions) {
  ExperimentConfig config = ParseExperimentConfig(text);
  if (repetitions) {
    config.repetitions = *repetitions;
    ValidateConfig(config);
  }
  return config;
}

std::string SimulateJson(const std::string& config_text, std::optional<int64_t> repetitions,
                         unsigned threads) {
  const ExperimentConfig config = ConfigFrom(config_text, repetitions);
  ExecutionOptions options;
  options.threads = threads;
  py::gil_scoped_release release;
  std::vector<ExperimentSummary> summaries;
  if (config.rho_grid.empty()) {
    summaries.push_back(RunExperiment(config, options));
  } else {
    summaries = RhoSweep(config, config.rho_grid, options);
  }
  return SummariesToJson(config, summaries);
}

std::vector<std::tuple<double, double, double>> Qq(const std::string& config_text,
                                                   const std::string& algorithm,
                                                   int grid, unsigned threads) {
  const ExperimentConfig config = ParseExperimentConfig(config_text);
  if (!config.rho_grid.empty()) {
    throw ValidationError("quantile comparison needs a single rho, not rho_grid");
  }
  ExecutionOptions options;
  options.threads = threads;
  std::vector<QqRow> rows;
  {
    py::gil_scoped_release release;
    rows = QqData(config, ParseAlgorithm(algorithm), grid, options);
  }
  std::vector<std::tuple<double, double, double>> out;
  for (const QqRow& r : rows) out.emplace_back(r.q, r.theoretical, r.empirical);
  return out;
}

}  // namespace
}  // namespace dpstrat

PYBIND11_MODULE(_dpstrat, m) {
  using namespace dpstrat;
  m.doc() = "Private confidence intervals for stratified proportions.";

  py::register_exception<ParseError>(m, "ParseError", PyExc_ValueError);
  py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
  py::register_exception<InfeasibleError>(m, "InfeasibleError", PyExc_ValueError);

  m.def("algorithms", [] {
    std::vector<std::string> names;
    for (Algorithm a : {Algorithm::kNonPrivate, Algorithm::kStrNzPubSz,
                        Algorithm::kPopNzPubSz, Algorithm::kStrNzPrivSz}) {
      names.emplace_back(AlgorithmName(a));
    }
    return names;
  });

  m.def("ci_json", &CiJson, py::arg("population_sizes"), py::arg("sample_sizes"),
        py::arg("counts"), py::arg("algorithm"), py::arg("rho") = py::none(),
        py::arg("split") = 0.5, py::arg("alpha") = 0.1, py::arg("seed") = 0,
        py::arg("clip_proportions") = false, py::arg("clip_interval") = false);

  m.def(
      "width_ratio",
      [](int64_t population_size, int64_t sample_size, double p, double rho,
         const std::string& algorithm) {
        return TheoreticalWidthRatio(population_size, sample_size, p, rho,
                                     ParseAlgorithm(algorithm));
      },
      py::arg("population_size"), py::arg("sample_size"), py::arg("p"), py::arg("rho"),
      py::arg("algorithm"));

  m.def(
      "width_ratio_lower_bound",
      [](int64_t sample_size, double rho, const std::string& algorithm) {
        return TwrLowerBound(sample_size, rho, ParseAlgorithm(algorithm));
      },
      py::arg("sample_size"), py::arg("rho"), py::arg("algorithm"));

  m.def(
      "sampling_variance",
      [](const std::vector<int64_t>& population_sizes, const std::vector<int64_t>& sample_sizes,
         const std::vector<double>& p) {
        return DesignVariance(MakeDesign(population_sizes, sample_sizes), p);
      },
      py::arg("population_sizes"), py::arg("sample_sizes"), py::arg("p"));

  m.def(
      "extrinsic_variance",
      [](const std::vector<int64_t>& population_sizes, const std::vector<int64_t>& sample_sizes,
         const std::vector<double>& p, const std::string& algorithm, double rho, double split) {
        return ExtrinsicVariance(MakeDesign(population_sizes, sample_sizes),
                                 ParseAlgorithm(algorithm), PrivacyBudget(rho, split),
                                 std::span<const double>(p));
      },
      py::arg("population_sizes"), py::arg("sample_sizes"), py::arg("p"), py::arg("algorithm"),
      py::arg("rho"), py::arg("split") = 0.5);

  m.def(
      "reciprocal_moments",
      [](double mu, double sigma, int k) {
        const ReciprocalMomentSeries s = ReciprocalNormalMoments(mu, sigma, k);
        return std::make_tuple(s.mean, s.second_moment);
      },
      py::arg("mu"), py::arg("sigma"), py::arg("k"));

  m.def(
      "reciprocal_moments_quadrature",
      [](double mu, double sigma) {
        const ReciprocalMoments q = ReciprocalMomentsByQuadrature(mu, sigma);
        return std::make_tuple(q.mean, q.second_moment);
      },
      py::arg("mu"), py::arg("sigma"));

  m.def("simulate_json", &SimulateJson, py::arg("config_text"),
        py::arg("repetitions") = py::none(), py::arg("threads") = 1);

  m.def("qq", &Qq, py::arg("config_text"), py::arg("algorithm"), py::arg("grid") = 99,
        py::arg("threads") = 1);
}
