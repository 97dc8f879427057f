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

#ifndef DPSTRAT_NORMAL_H_
#define DPSTRAT_NORMAL_H_

namespace dpstrat {

// Standard normal CDF.
double NormalCdf(double x);

// Inverse of the standard normal CDF for q in (0, 1). Uses Acklam's rational
// approximation followed by one Halley step against an erfc-based CDF, which
// brings the relative error to roughly machine precision.
double NormalQuantile(double q);

// z_{1-alpha/2}.
double TwoSidedCriticalValue(double alpha);

}  // namespace dpstrat

#endif  // DPSTRAT_NORMAL_H_
