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

#include "dpstrat/cli.h"

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "dpstrat/analysis.h"
#include "dpstrat/config_file.h"
#include "dpstrat/core.h"
#include "dpstrat/dp_ci.h"
#include "dpstrat/estimators.h"
#include "dpstrat/io.h"
#include "dpstrat/simharness.h"

namespace dpstrat {
namespace {

struct CiArgs {
  std::string input;
  std::string algorithm;
  std::optional<double> rho;
  double split = 0.5;
  double alpha = 0.1;
  uint64_t seed = 0;
  bool clip_proportions = false;
  bool clip_interval = false;
  std::string format = "json";
};

struct SimulateArgs {
  std::string config;
  std::string out_dir;
  bool write_records = false;
  unsigned threads = 1;
};

struct AnalyzeArgs {
  std::vector<int64_t> population_sizes;
  std::vector<int64_t> sample_sizes;
  std::string input;
  double rho = 0.0;
  double split = 0.5;
  std::vector<double> proportions;
};

struct QqArgs {
  std::string config;
  int grid = 99;
  std::string algorithm;
  unsigned threads = 1;
};

void WriteFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw ValidationError(fmt::format("cannot write '{}'", path.string()));
  }
  file << text;
}

int CmdCi(const CiArgs& args, std::ostream& out) {
  const StratumData data = LoadStratumData(args.input);
  const Design design = data.design();
  const Algorithm algorithm = ParseAlgorithm(args.algorithm);
  if (algorithm == Algorithm::kDifference) {
    throw ValidationError("--algorithm: difference needs two datasets");
  }
  const ClipOptions clip{args.clip_proportions, args.clip_interval};
  PrivateCiResult result;
  if (algorithm == Algorithm::kNonPrivate) {
    RandomStream unused(args.seed, 0);
    result = RunAlgorithm(algorithm, unused, design, data.counts,
                          PrivacyBudget(1.0, 0.5), args.alpha, clip);
  } else {
    if (!args.rho) throw ValidationError("--rho is required for private algorithms");
    RandomStream stream(args.seed, 0);
    result = RunAlgorithm(algorithm, stream, design, data.counts,
                          PrivacyBudget(*args.rho, args.split), args.alpha, clip);
  }
  out << (args.format == "csv" ? CiToCsv(result, data.ids)
                               : CiToJson(result, data.ids));
  return kExitOk;
}

int CmdSimulate(const SimulateArgs& args, std::ostream& out) {
  const ExperimentConfig config = LoadExperimentConfig(args.config);
  ExecutionOptions options;
  options.threads = args.threads;
  options.keep_records = args.write_records;
  std::vector<ExperimentSummary> summaries;
  if (config.rho_grid.empty()) {
    summaries.push_back(RunExperiment(config, options));
  } else {
    summaries = RhoSweep(config, config.rho_grid, options);
  }
  const std::filesystem::path dir(args.out_dir);
  std::filesystem::create_directories(dir);
  WriteFile(dir / "summary.json", SummariesToJson(config, summaries));
  if (args.write_records) WriteFile(dir / "reps.csv", RecordsToCsv(summaries));
  out << (dir / "summary.json").string() << "\n";
  return kExitOk;
}

int CmdAnalyze(const AnalyzeArgs& args, std::ostream& out) {
  std::vector<int64_t> big_n = args.population_sizes;
  std::vector<int64_t> small_n = args.sample_sizes;
  if (!args.input.empty()) {
    if (!big_n.empty() || !small_n.empty()) {
      throw ValidationError("--input cannot be combined with --N/--n");
    }
    const StratumData data = LoadStratumData(args.input);
    big_n = data.population_sizes;
    small_n = data.sample_sizes;
  }
  if (big_n.empty() || big_n.size() != small_n.size()) {
    throw ValidationError("--N and --n need the same number of strata");
  }
  const Design design = Design::FromSizes(big_n, small_n);
  std::vector<double> p = args.proportions;
  if (p.size() == 1) p.assign(design.size(), p[0]);
  if (p.size() != design.size()) {
    throw ValidationError("--p needs one value or one per stratum");
  }
  for (double v : p) {
    if (!(v >= 0.0 && v <= 1.0)) throw ValidationError("--p values must lie in [0, 1]");
  }
  const PrivacyBudget budget(args.rho, args.split);

  std::string csv = "metric,algorithm,value\n";
  auto row = [&](std::string_view metric, std::string_view algorithm,
                 double value) {
    csv += fmt::format("{},{},{}\n", metric, algorithm, FormatDouble(value));
  };
  const Algorithm kAll[] = {Algorithm::kNonPrivate, Algorithm::kStrNzPubSz,
                            Algorithm::kPopNzPubSz, Algorithm::kStrNzPrivSz};
  row("sampling_variance", "nonprivate", DesignVariance(design, p));
  for (Algorithm a : kAll) {
    row("extrinsic_variance", AlgorithmName(a),
        ExtrinsicVariance(design, a, budget, std::span<const double>(p)));
  }
  for (Algorithm a : kAll) {
    row("width_ratio", AlgorithmName(a), DesignWidthRatio(design, p, a, budget));
  }
  std::vector<double> u;
  for (const auto& s : design.strata()) u.push_back(s.sampling_weight());
  row("budget_ratio", "str-pub/pop-pub", BudgetRatioStrVsPop(u));
  row("budget_ratio", "str-priv/str-pub", BudgetRatioPrivVsPub(u, p));
  if (design.size() == 1) {
    const int64_t N = big_n[0];
    const int64_t n = small_n[0];
    if (n < N && p[0] > 0.0 && p[0] < 1.0) {
      for (Algorithm a : kAll) {
        row("twr", AlgorithmName(a),
            TheoreticalWidthRatio(N, n, p[0], args.rho, a));
      }
    }
    for (Algorithm a : kAll) {
      row("twr_lower_bound", AlgorithmName(a), TwrLowerBound(n, args.rho, a));
    }
  }
  out << csv;
  return kExitOk;
}

int CmdQq(const QqArgs& args, std::ostream& out) {
  const ExperimentConfig config = LoadExperimentConfig(args.config);
  if (!config.rho_grid.empty()) {
    throw ValidationError("qq needs a config with a single 'rho'");
  }
  Algorithm algorithm;
  if (!args.algorithm.empty()) {
    algorithm = ParseAlgorithm(args.algorithm);
  } else if (config.algorithms.size() == 1) {
    algorithm = config.algorithms[0];
  } else {
    throw ValidationError(
        "--algorithm is required when the config lists several algorithms");
  }
  ExecutionOptions options;
  options.threads = args.threads;
  out << QqToCsv(QqData(config, algorithm, args.grid, options));
  return kExitOk;
}

}  // namespace

int RunCli(int argc, const char* const* argv, std::ostream& out,
           std::ostream& err) {
  CLI::App app{"Private confidence intervals for stratified proportions",
               "dpstrat"};
  app.require_subcommand(1);

  CiArgs ci;
  CLI::App* ci_cmd = app.add_subcommand("ci", "Interval from a stratum data file");
  ci_cmd->add_option("--input", ci.input, "CSV with stratum_id,N_h,n_h,c_h")
      ->required();
  ci_cmd->add_option("--algorithm", ci.algorithm, "Interval algorithm")
      ->required()
      ->check(CLI::IsMember({"nonprivate", "str-pub", "pop-pub", "str-priv"}));
  ci_cmd->add_option("--rho", ci.rho, "Total zCDP budget");
  ci_cmd->add_option("--split", ci.split, "Share of rho for the first query");
  ci_cmd->add_option("--alpha", ci.alpha, "Miscoverage level")->capture_default_str();
  ci_cmd->add_option("--seed", ci.seed, "Noise seed")->capture_default_str();
  ci_cmd->add_flag("--clip-proportions", ci.clip_proportions,
                   "Clip noisy proportions to [0, 1]");
  ci_cmd->add_flag("--clip-interval", ci.clip_interval, "Clip the interval to [0, 1]");
  ci_cmd->add_option("--format", ci.format, "Output format")->check(CLI::IsMember({"json", "csv"}));

  SimulateArgs sim;
  CLI::App* sim_cmd = app.add_subcommand("simulate", "Run a coverage experiment");
  sim_cmd->add_option("--config", sim.config, "Experiment config file")->required();
  sim_cmd->add_option("--out", sim.out_dir, "Output directory")->required();
  sim_cmd->add_flag("--reps", sim.write_records, "Also write reps.csv");
  sim_cmd->add_option("--threads", sim.threads, "Worker threads, 0 for all cores");

  AnalyzeArgs an;
  CLI::App* an_cmd = app.add_subcommand("analyze", "Extrinsic variances and width ratios");
  an_cmd->add_option("--N", an.population_sizes, "Stratum population sizes")
      ->delimiter(',');
  an_cmd->add_option("--n", an.sample_sizes, "Stratum sample sizes")->delimiter(',');
  an_cmd->add_option("--input", an.input, "Stratum data file, instead of --N and --n");
  an_cmd->add_option("--rho", an.rho, "Total zCDP budget")->required();
  an_cmd->add_option("--split", an.split, "Share of rho for the first query");
  an_cmd->add_option("--p", an.proportions, "True proportion(s)")
      ->required()
      ->delimiter(',');

  QqArgs qq;
  CLI::App* qq_cmd = app.add_subcommand("qq", "Quantile pairs of the point estimate");
  qq_cmd->add_option("--config", qq.config, "Experiment config file")->required();
  qq_cmd->add_option("--grid", qq.grid, "Number of quantile levels")->capture_default_str();
  qq_cmd->add_option("--algorithm", qq.algorithm,
                     "Algorithm, needed when the config lists several")
      ->check(CLI::IsMember({"nonprivate", "str-pub", "pop-pub", "str-priv"}));
  qq_cmd->add_option("--threads", qq.threads, "Worker threads, 0 for all cores");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitParse;
  }

  try {
    if (*ci_cmd) return CmdCi(ci, out);
    if (*sim_cmd) return CmdSimulate(sim, out);
    if (*an_cmd) return CmdAnalyze(an, out);
    if (*qq_cmd) return CmdQq(qq, out);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitParse;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const InfeasibleError& e) {
    err << "error: " << e.what() << "\n";
    return kExitInfeasible;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitParse;
}

}  // namespace dpstrat
