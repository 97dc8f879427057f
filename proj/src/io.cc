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

#include "dpstrat/io.h"

#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>
#include <nlohmann/json.hpp>

namespace dpstrat {
namespace {

using nlohmann::json;
using nlohmann::ordered_json;

constexpr std::string_view kDataHeader = "stratum_id,N_h,n_h,c_h";
constexpr std::string_view kCiHeader =
    "algorithm,alpha,point_estimate,variance_estimate,lower,upper,rho,rho1,"
    "rho2,proportion_clipped,interval_clipped,variance_floored,"
    "noisy_size_floored";
constexpr std::string_view kStrataHeader =
    "stratum_id,p_tilde,v_tilde,c_tilde,n_tilde,proportion_clipped,"
    "noisy_size_floored,fpc_floored,cv_warning";

std::vector<std::string_view> SplitFields(std::string_view line) {
  std::vector<std::string_view> fields;
  size_t start = 0;
  for (;;) {
    const size_t comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::vector<std::string> Lines(std::string_view text) {
  std::vector<std::string> lines;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  return lines;
}

ordered_json BudgetJson(const std::optional<PrivacyBudget>& budget) {
  if (!budget) return nullptr;
  return {{"rho", budget->rho()},
          {"rho1", budget->rho1()},
          {"rho2", budget->rho2()}};
}

std::string Bool(bool b) { return b ? "true" : "false"; }

bool ParseBool(std::string_view s, int row, int column) {
  if (s == "true") return true;
  if (s == "false") return false;
  throw ParseError(
      fmt::format("row {}, column {}: expected true or false", row, column));
}

double ParseReal(std::string_view s, int row, int column) {
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc() || ptr != s.data() + s.size()) {
    throw ParseError(fmt::format("row {}, column {}: '{}' is not a number", row,
                                 column, s));
  }
  return value;
}

}  // namespace

Design StratumData::design() const {
  return Design::FromSizes(population_sizes, sample_sizes);
}

StratumData ParseStratumData(std::string_view text) {
  const std::vector<std::string> lines = Lines(text);
  if (lines.empty() || lines[0] != kDataHeader) {
    throw ParseError(
        fmt::format("row 1: header must be '{}'", std::string(kDataHeader)));
  }
  StratumData data;
  for (size_t i = 1; i < lines.size(); ++i) {
    const int row = static_cast<int>(i) + 1;
    if (lines[i].empty()) continue;
    const auto fields = SplitFields(lines[i]);
    if (fields.size() != 4) {
      throw ParseError(
          fmt::format("row {}: expected 4 columns, found {}", row, fields.size()));
    }
    int64_t values[4];
    for (int c = 0; c < 4; ++c) {
      const std::string_view f = fields[c];
      const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), values[c]);
      if (f.empty() || ec != std::errc() || ptr != f.data() + f.size()) {
        throw ParseError(fmt::format("row {}, column {} ({}): '{}' is not an integer",
                                     row, c + 1, SplitFields(kDataHeader)[c], f));
      }
    }
    data.ids.push_back(values[0]);
    data.population_sizes.push_back(values[1]);
    data.sample_sizes.push_back(values[2]);
    data.counts.values.push_back(values[3]);
  }
  if (data.ids.empty()) throw ParseError("no stratum rows after the header");
  ValidateCounts(data.design(), data.counts);
  return data;
}

StratumData LoadStratumData(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError(fmt::format("cannot open '{}'", path));
  std::ostringstream text;
  text << in.rdbuf();
  return ParseStratumData(text.str());
}

std::string FormatDouble(double value) {
  // Shortest round-trip form, e.g. 0.1 rather than 0.10000000000000001.
  return fmt::format("{}", value);
}

std::string CiToJson(const PrivateCiResult& result,
                     const std::vector<int64_t>& stratum_ids) {
  const CiResult& ci = result.ci;
  ordered_json out;
  out["algorithm"] = std::string(AlgorithmName(ci.algorithm));
  out["alpha"] = ci.alpha;
  out["point_estimate"] = ci.point_estimate;
  out["variance_estimate"] = ci.variance_estimate;
  out["lower"] = ci.lower;
  out["upper"] = ci.upper;
  out["budget_spent"] = BudgetJson(ci.budget_spent);
  out["flags"] = {{"proportion_clipped", ci.flags.proportion_clipped},
                  {"interval_clipped", ci.flags.interval_clipped},
                  {"variance_floored", ci.flags.variance_floored},
                  {"noisy_size_floored", ci.flags.noisy_size_floored}};
  if (!result.strata.empty()) {
    ordered_json strata = ordered_json::array();
    for (size_t h = 0; h < result.strata.size(); ++h) {
      const PrivateStratumRelease& s = result.strata[h];
      ordered_json row;
      row["stratum_id"] = h < stratum_ids.size() ? stratum_ids[h]
                                                 : static_cast<int64_t>(h);
      row["p_tilde"] = s.p_tilde;
      row["v_tilde"] = s.v_tilde;
      if (ci.algorithm == Algorithm::kStrNzPrivSz) {
        row["c_tilde"] = s.c_tilde;
        row["n_tilde"] = s.n_tilde;
        row["noisy_size_floored"] = s.noisy_size_floored;
        row["fpc_floored"] = s.fpc_floored;
        row["cv_warning"] = s.cv_warning;
      }
      row["proportion_clipped"] = s.proportion_clipped;
      strata.push_back(row);
    }
    out["strata"] = strata;
  }
  if (!result.noise.empty()) {
    ordered_json noise = ordered_json::array();
    for (const NoiseRecord& n : result.noise) {
      ordered_json row;
      row["query"] = n.query;
      if (n.stratum >= 0) row["stratum"] = n.stratum;
      row["sensitivity"] = n.sensitivity;
      row["rho"] = n.rho;
      row["variance"] = n.variance;
      noise.push_back(row);
    }
    out["noise"] = noise;
  }
  return out.dump(2) + "\n";
}

std::string CiToCsv(const PrivateCiResult& result,
                    const std::vector<int64_t>& stratum_ids) {
  const CiResult& ci = result.ci;
  std::string out(kCiHeader);
  out += "\n";
  std::string rho, rho1, rho2;
  if (ci.budget_spent) {
    rho = FormatDouble(ci.budget_spent->rho());
    rho1 = FormatDouble(ci.budget_spent->rho1());
    rho2 = FormatDouble(ci.budget_spent->rho2());
  }
  out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{}\n",
                     AlgorithmName(ci.algorithm), FormatDouble(ci.alpha),
                     FormatDouble(ci.point_estimate),
                     FormatDouble(ci.variance_estimate), FormatDouble(ci.lower),
                     FormatDouble(ci.upper), rho, rho1, rho2,
                     Bool(ci.flags.proportion_clipped),
                     Bool(ci.flags.interval_clipped),
                     Bool(ci.flags.variance_floored),
                     Bool(ci.flags.noisy_size_floored));
  if (!result.strata.empty()) {
    out += "\n";
    out += kStrataHeader;
    out += "\n";
    const bool sizes = ci.algorithm == Algorithm::kStrNzPrivSz;
    for (size_t h = 0; h < result.strata.size(); ++h) {
      const PrivateStratumRelease& s = result.strata[h];
      const int64_t id =
          h < stratum_ids.size() ? stratum_ids[h] : static_cast<int64_t>(h);
      out += fmt::format("{},{},{},{},{},{},{},{},{}\n", id,
                         FormatDouble(s.p_tilde), FormatDouble(s.v_tilde),
                         sizes ? FormatDouble(s.c_tilde) : "",
                         sizes ? FormatDouble(s.n_tilde) : "",
                         Bool(s.proportion_clipped), Bool(s.noisy_size_floored),
                         Bool(s.fpc_floored), Bool(s.cv_warning));
    }
  }
  return out;
}

CiResult CiFromJson(std::string_view text) {
  json in;
  try {
    in = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(e.what());
  }
  try {
    CiResult ci;
    ci.algorithm = ParseAlgorithm(in.at("algorithm").get<std::string>());
    ci.alpha = in.at("alpha").get<double>();
    ci.point_estimate = in.at("point_estimate").get<double>();
    ci.variance_estimate = in.at("variance_estimate").get<double>();
    ci.lower = in.at("lower").get<double>();
    ci.upper = in.at("upper").get<double>();
    const json& budget = in.at("budget_spent");
    if (!budget.is_null()) {
      ci.budget_spent = PrivacyBudget::FromParts(budget.at("rho1").get<double>(),
                                                 budget.at("rho2").get<double>());
    }
    const json& flags = in.at("flags");
    ci.flags.proportion_clipped = flags.at("proportion_clipped").get<bool>();
    ci.flags.interval_clipped = flags.at("interval_clipped").get<bool>();
    ci.flags.variance_floored = flags.at("variance_floored").get<bool>();
    ci.flags.noisy_size_floored = flags.at("noisy_size_floored").get<bool>();
    return ci;
  } catch (const json::exception& e) {
    throw ParseError(e.what());
  }
}

CiResult CiFromCsv(std::string_view text) {
  const std::vector<std::string> lines = Lines(text);
  if (lines.size() < 2 || lines[0] != kCiHeader) {
    throw ParseError("row 1: not an interval CSV header");
  }
  const auto f = SplitFields(lines[1]);
  if (f.size() != 13) {
    throw ParseError(fmt::format("row 2: expected 13 columns, found {}", f.size()));
  }
  CiResult ci;
  ci.algorithm = ParseAlgorithm(f[0]);
  ci.alpha = ParseReal(f[1], 2, 2);
  ci.point_estimate = ParseReal(f[2], 2, 3);
  ci.variance_estimate = ParseReal(f[3], 2, 4);
  ci.lower = ParseReal(f[4], 2, 5);
  ci.upper = ParseReal(f[5], 2, 6);
  if (!f[6].empty()) {
    ci.budget_spent =
        PrivacyBudget::FromParts(ParseReal(f[7], 2, 8), ParseReal(f[8], 2, 9));
  }
  ci.flags.proportion_clipped = ParseBool(f[9], 2, 10);
  ci.flags.interval_clipped = ParseBool(f[10], 2, 11);
  ci.flags.variance_floored = ParseBool(f[11], 2, 12);
  ci.flags.noisy_size_floored = ParseBool(f[12], 2, 13);
  return ci;
}

std::string SummariesToJson(const ExperimentConfig& config,
                            const std::vector<ExperimentSummary>& summaries) {
  ordered_json out;
  out["base_seed"] = config.base_seed;
  out["alpha"] = config.alpha;
  out["repetitions"] = config.repetitions;
  out["split"] = config.split;
  out["clip_proportions"] = config.clip_proportions;
  out["clip_interval"] = config.clip_interval;
  ordered_json points = ordered_json::array();
  for (const ExperimentSummary& s : summaries) {
    ordered_json point;
    point["rho"] = s.rho;
    point["true_proportion"] = s.true_proportion;
    point["sample_sizes"] = s.sample_sizes;
    ordered_json algorithms = ordered_json::array();
    for (const AlgorithmSummary& a : s.algorithms) {
      ordered_json row;
      row["algorithm"] = std::string(AlgorithmName(a.algorithm));
      row["coverage"] = a.coverage;
      row["mean_width"] = a.mean_width;
      row["width_sd"] = a.width_sd;
      row["width_ratio"] = a.width_ratio;
      row["mean_lower"] = a.mean_lower;
      row["mean_upper"] = a.mean_upper;
      row["mean_point"] = a.mean_point;
      algorithms.push_back(row);
    }
    point["algorithms"] = algorithms;
    points.push_back(point);
  }
  out["points"] = points;
  return out.dump(2) + "\n";
}

std::string RecordsToCsv(const std::vector<ExperimentSummary>& summaries) {
  std::string out = "rho,rep,algorithm,covered,width,lower,upper\n";
  for (const ExperimentSummary& s : summaries) {
    const std::string rho = FormatDouble(s.rho);
    for (const RepetitionRecord& r : s.records) {
      out += fmt::format("{},{},{},{},{},{},{}\n", rho, r.repetition,
                         AlgorithmName(r.algorithm), r.covered ? 1 : 0,
                         FormatDouble(r.width()), FormatDouble(r.lower),
                         FormatDouble(r.upper));
    }
  }
  return out;
}

std::string QqToCsv(const std::vector<QqRow>& rows) {
  std::string out = "q,theoretical,empirical\n";
  for (const QqRow& r : rows) {
    out += fmt::format("{},{},{}\n", FormatDouble(r.q), FormatDouble(r.theoretical),
                       FormatDouble(r.empirical));
  }
  return out;
}

}  // namespace dpstrat
