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

#ifndef DPSTRAT_IO_H_
#define DPSTRAT_IO_H_

#include <string>
#include <string_view>
#include <vector>

#include "dpstrat/core.h"
#include "dpstrat/dp_ci.h"
#include "dpstrat/simharness.h"

namespace dpstrat {

// Contents of a stratum data file: header `stratum_id,N_h,n_h,c_h`, then one
// row of integers per stratum. Weights are N_h / sum N.
struct StratumData {
  std::vector<int64_t> ids;
  std::vector<int64_t> population_sizes;
  std::vector<int64_t> sample_sizes;
  StratumCounts counts;

  Design design() const;
};

// Lexical problems raise ParseError naming the row and column; design and
// count checks raise ValidationError.
StratumData ParseStratumData(std::string_view text);
StratumData LoadStratumData(const std::string& path);

// Shortest text that reads back to the same double; "nan"/"inf" are not
// produced for finite input.
std::string FormatDouble(double value);

// JSON object with the interval, budget, flags and, when present, the
// per-stratum releases (ids label them) and noise ledger.
std::string CiToJson(const PrivateCiResult& result,
                     const std::vector<int64_t>& stratum_ids = {});

// CSV with a one-row result table; per-stratum releases follow after a blank
// line in a second table.
std::string CiToCsv(const PrivateCiResult& result,
                    const std::vector<int64_t>& stratum_ids = {});

// Read back the interval part of the renderings above.
CiResult CiFromJson(std::string_view text);
CiResult CiFromCsv(std::string_view text);

// Experiment summaries, one entry per grid point.
std::string SummariesToJson(const ExperimentConfig& config,
                            const std::vector<ExperimentSummary>& summaries);

// One row per (grid point, repetition, algorithm):
// rho,rep,algorithm,covered,width,lower,upper
std::string RecordsToCsv(const std::vector<ExperimentSummary>& summaries);

std::string QqToCsv(const std::vector<QqRow>& rows);

}  // namespace dpstrat

#endif  // DPSTRAT_IO_H_
