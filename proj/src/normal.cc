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

#include "dpstrat/normal.h"

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/erf.hpp>
#include <fmt/core.h>

#include "dpstrat/core.h"

namespace dpstrat {

double NormalCdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double NormalQuantile(double q) {
  if (!(q > 0.0 && q < 1.0)) {
    throw ValidationError(
        fmt::format("normal quantile requires 0 < q < 1, got {}", q));
  }
  // erfc_inv keeps full relative accuracy in both tails.
  return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * q);
}

double TwoSidedCriticalValue(double alpha) {
  CheckAlpha(alpha);
  return -NormalQuantile(0.5 * alpha);
}

}  // namespace dpstrat
