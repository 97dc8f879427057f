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

#ifndef DPSTRAT_CONFIG_FILE_H_
#define DPSTRAT_CONFIG_FILE_H_

#include <string>
#include <string_view>

#include "dpstrat/simharness.h"

namespace dpstrat {

// Reads an experiment description written as `key = value` lines. Blank
// lines and text after `#` are ignored. Keys:
//
//   strata            integer H >= 1                              (required)
//   stratum_size      N or uniform(lo, hi), discrete              (required)
//   sampling_rate     r or uniform(lo, hi)          (one of these is required)
//   sample_size       fixed n for every stratum
//   proportion        p or uniform(lo, hi)                        (required)
//   rho               value, 1/x, or 1/max_n        (one of these is required)
//   rho_grid          comma-separated values
//   algorithms        comma-separated names                       (required)
//   repetitions       R >= 1                                      (required)
//   base_seed         unsigned 64-bit seed                        (required)
//   alpha             default 0.1
//   split             share of rho for the first query, default 0.5
//   clip_proportions  true/false, default true
//   clip_interval     true/false, default false
//   min_sample_size   default 0 (off)
//
// Unknown, repeated or missing keys and malformed values raise
// ValidationError naming the line.
ExperimentConfig ParseExperimentConfig(std::string_view text);
ExperimentConfig LoadExperimentConfig(const std::string& path);

}  // namespace dpstrat

#endif  // DPSTRAT_CONFIG_FILE_H_
