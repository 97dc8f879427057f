#
# Copyright 2026 The dpstrat Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
#
"""Private confidence intervals for stratified proportions.

Thin wrappers over the compiled ``_dpstrat`` extension. JSON documents
returned by the extension are decoded into dictionaries with the same keys
the command-line tool writes.
"""

import json
from typing import Optional, Sequence

from dpstrat._dpstrat import (
    InfeasibleError,
    ParseError,
    ValidationError,
    algorithms,
    extrinsic_variance,
    qq,
    reciprocal_moments,
    reciprocal_moments_quadrature,
    sampling_variance,
    width_ratio,
    width_ratio_lower_bound,
)
from dpstrat import _dpstrat

__all__ = [
    "InfeasibleError",
    "ParseError",
    "ValidationError",
    "algorithms",
    "ci",
    "extrinsic_variance",
    "qq",
    "reciprocal_moments",
    "reciprocal_moments_quadrature",
    "sampling_variance",
    "simulate",
    "width_ratio",
    "width_ratio_lower_bound",
]


def ci(
    population_sizes: Sequence[int],
    sample_sizes: Sequence[int],
    counts: Sequence[int],
    algorithm: str,
    rho: Optional[float] = None,
    *,
    split: float = 0.5,
    alpha: float = 0.1,
    seed: int = 0,
    clip_proportions: bool = False,
    clip_interval: bool = False,
) -> dict:
    """Confidence interval for the population proportion.

    Strata are numbered from 1 in the result. ``rho`` is required for every
    algorithm except ``nonprivate``.
    """
    return json.loads(
        _dpstrat.ci_json(
            list(population_sizes),
            list(sample_sizes),
            list(counts),
            algorithm,
            rho,
            split,
            alpha,
            seed,
            clip_proportions,
            clip_interval,
        )
    )


def simulate(
    config_text: str, repetitions: Optional[int] = None, threads: int = 1
) -> dict:
    """Runs the experiment described by a config file's text."""
    return json.loads(_dpstrat.simulate_json(config_text, repetitions, threads))
