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

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <fmt/format.h>

namespace dpstrat {
namespace {

std::string_view Trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> SplitList(std::string_view s) {
  std::vector<std::string_view> parts;
  size_t start = 0;
  for (;;) {
    const size_t comma = s.find(',', start);
    parts.push_back(Trim(s.substr(start, comma - start)));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return parts;
}

struct Entry {
  int line = 0;
  std::string value;
};

class Reader {
 public:
  explicit Reader(std::map<std::string, Entry> entries)
      : entries_(std::move(entries)) {}

  bool Has(const std::string& key) const { return entries_.count(key) > 0; }

  [[noreturn]] void Fail(const std::string& key, std::string_view what) const {
    throw ValidationError(fmt::format("config line {}: '{}' {}",
                                      entries_.at(key).line, key, what));
  }

  const std::string& Raw(const std::string& key) const {
    return entries_.at(key).value;
  }

  double Number(const std::string& key, std::string_view text) const {
    double value = 0.0;
    const auto [ptr, ec] =
        std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size() ||
        !std::isfinite(value)) {
      Fail(key, fmt::format("expects a number, got '{}'", text));
    }
    return value;
  }

  template <typename Int>
  Int Integer(const std::string& key) const {
    const std::string& text = Raw(key);
    Int value = 0;
    const auto [ptr, ec] =
        std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
      Fail(key, fmt::format("expects an integer, got '{}'", text));
    }
    return value;
  }

  bool Boolean(const std::string& key) const {
    const std::string& text = Raw(key);
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    Fail(key, fmt::format("expects true or false, got '{}'", text));
  }

  ParameterSpec Spec(const std::string& key) const {
    const std::string_view text = Raw(key);
    constexpr std::string_view kPrefix = "uniform(";
    if (text.substr(0, kPrefix.size()) == kPrefix && text.back() == ')') {
      const auto args =
          SplitList(text.substr(kPrefix.size(), text.size() - kPrefix.size() - 1));
      if (args.size() != 2) Fail(key, "expects uniform(lo, hi)");
      return ParameterSpec::Uniform(Number(key, args[0]), Number(key, args[1]));
    }
    return ParameterSpec::Fixed(Number(key, text));
  }

  // A positive value, written plainly or as 1/x.
  double Reciprocal(const std::string& key, std::string_view text) const {
    if (text.substr(0, 2) == "1/") {
      const double denominator = Number(key, Trim(text.substr(2)));
      if (denominator <= 0.0) Fail(key, "needs a positive denominator");
      return 1.0 / denominator;
    }
    return Number(key, text);
  }

 private:
  std::map<std::string, Entry> entries_;
};

const std::set<std::string>& KnownKeys() {
  static const std::set<std::string> keys = {
      "strata",        "stratum_size",    "sampling_rate",    "sample_size",
      "proportion",    "rho",             "rho_grid",         "algorithms",
      "repetitions",   "base_seed",       "alpha",            "split",
      "clip_proportions", "clip_interval", "min_sample_size"};
  return keys;
}

}  // namespace

ExperimentConfig ParseExperimentConfig(std::string_view text) {
  std::map<std::string, Entry> entries;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    std::string_view body = raw;
    body = Trim(body.substr(0, body.find('#')));
    if (body.empty()) continue;
    const size_t eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ValidationError(
          fmt::format("config line {}: expected 'key = value'", line));
    }
    const std::string key(Trim(body.substr(0, eq)));
    const std::string value(Trim(body.substr(eq + 1)));
    if (KnownKeys().count(key) == 0) {
      throw ValidationError(
          fmt::format("config line {}: unknown key '{}'", line, key));
    }
    if (value.empty()) {
      throw ValidationError(
          fmt::format("config line {}: '{}' has no value", line, key));
    }
    if (entries.count(key) > 0) {
      throw ValidationError(fmt::format(
          "config line {}: '{}' already set on line {}", line, key,
          entries[key].line));
    }
    entries[key] = Entry{line, value};
  }

  for (const char* key : {"strata", "stratum_size", "proportion", "algorithms",
                          "repetitions", "base_seed"}) {
    if (entries.count(key) == 0) {
      throw ValidationError(fmt::format("config: missing required key '{}'", key));
    }
  }
  const bool has_rate = entries.count("sampling_rate") > 0;
  const bool has_size = entries.count("sample_size") > 0;
  if (has_rate == has_size) {
    throw ValidationError(
        "config: exactly one of 'sampling_rate' and 'sample_size' is required");
  }
  const bool has_rho = entries.count("rho") > 0;
  const bool has_grid = entries.count("rho_grid") > 0;
  if (has_rho == has_grid) {
    throw ValidationError(
        "config: exactly one of 'rho' and 'rho_grid' is required");
  }

  const Reader r(std::move(entries));
  ExperimentConfig config;
  config.strata = r.Integer<int>("strata");
  config.stratum_size = r.Spec("stratum_size");
  if (has_size) {
    config.sample_size = r.Integer<int64_t>("sample_size");
  } else {
    config.sampling_rate = r.Spec("sampling_rate");
  }
  config.proportion = r.Spec("proportion");
  if (has_rho) {
    if (r.Raw("rho") == "1/max_n") {
      config.rho.inverse_max_sample_size = true;
    } else {
      config.rho.value = r.Reciprocal("rho", r.Raw("rho"));
    }
  } else {
    for (std::string_view item : SplitList(r.Raw("rho_grid"))) {
      config.rho_grid.push_back(r.Reciprocal("rho_grid", item));
    }
  }
  config.algorithms.clear();
  for (std::string_view name : SplitList(r.Raw("algorithms"))) {
    try {
      config.algorithms.push_back(ParseAlgorithm(name));
    } catch (const ValidationError&) {
      r.Fail("algorithms", fmt::format("names an unknown algorithm '{}'", name));
    }
  }
  config.repetitions = r.Integer<int64_t>("repetitions");
  config.base_seed = r.Integer<uint64_t>("base_seed");
  if (r.Has("alpha")) config.alpha = r.Number("alpha", r.Raw("alpha"));
  if (r.Has("split")) config.split = r.Number("split", r.Raw("split"));
  if (r.Has("clip_proportions")) {
    config.clip_proportions = r.Boolean("clip_proportions");
  }
  if (r.Has("clip_interval")) config.clip_interval = r.Boolean("clip_interval");
  if (r.Has("min_sample_size")) {
    config.min_sample_size = r.Integer<int64_t>("min_sample_size");
  }
  ValidateConfig(config);
  return config;
}

ExperimentConfig LoadExperimentConfig(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError(fmt::format("cannot open config '{}'", path));
  std::ostringstream text;
  text << in.rdbuf();
  return ParseExperimentConfig(text.str());
}

}  // namespace dpstrat
