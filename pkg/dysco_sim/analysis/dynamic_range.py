# Copyright 2020 Google LLC
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     https://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
"""Dynamic range from the slopes of two population responses."""

import dataclasses
import math
from typing import Optional, Sequence

import numpy as np

from dysco_sim import errors
from dysco_sim.analysis import spectrum

# Slopes below this fraction of 1/span(field) count as flat.
_FLAT_SLOPE = 1e-12

# Fixed-φ sensitivity of a 4·π-pulse unit relative to a free precession of the
# same length.
LINEAR_RESPONSE_FACTOR = 4 / math.pi**2


@dataclasses.dataclass(frozen=True)
class DynamicRange:
    """Slope ratio of a high- and a low-sensitivity response.

    Attributes:
        ratio: max|dP0/dB| at high sensitivity over that at low sensitivity.
        high_slope: max|dP0/dB| of the high-sensitivity response, in 1/T.
        low_slope: max|dP0/dB| of the low-sensitivity response, in 1/T.
        theoretical_bound: Bound t·Ω₋/(9π) for the sequence, if
            its parameters were given.
    """
    ratio: float
    high_slope: float
    low_slope: float
    theoretical_bound: Optional[float] = None


def theoretical_dr_bound(rabi: float, total_time: float) -> float:
    """Returns the dynamic-range bound t·Ω₋/(9π).

    The largest measurable field is set by the shortest admitted modulation
    period 9π/Ω₋, the smallest by the full interrogation time t. For
    Ω₋ = 2π·8.33 MHz and t = 2.55 ms the bound is about 4.7·10³.

    Args:
        rabi: Rabi rate Ω₋, in rad/s.
        total_time: Interrogation time, in seconds.
    """
    if not (rabi > 0 and total_time > 0):
        raise errors.InvalidArgumentError(
            f'rabi and total_time must be positive, got {rabi!r} and '
            f'{total_time!r}')
    return total_time * rabi / (9 * math.pi)


def max_slope(response: Sequence[float], fields: Sequence[float]) -> float:
    """Returns max|dP0/dB| of a 3-point smoothed response.

    Raises:
        SamplingError: Fewer than 3 samples, or non-uniform fields.
        SlopeError: The response is flat.
    """
    response = np.asarray(response, dtype=float)
    if len(response) < 3 or len(fields) != len(response):
        raise errors.SamplingError(
            'A slope needs at least 3 samples with one field each.')
    spacing = spectrum.sample_spacing(fields)
    smoothed = np.convolve(response, np.ones(3) / 3, mode='valid')
    if len(smoothed) < 2:
        smoothed = response
    slope = float(np.max(np.abs(np.gradient(smoothed, spacing))))
    span = spacing * (len(response) - 1)
    if not slope * span > _FLAT_SLOPE:
        raise errors.SlopeError('Response is flat; no slope to estimate.')
    return slope


def dynamic_range(
        low_response: Sequence[float],
        high_response: Sequence[float],
        fields: Sequence[float],
        *,
        low_fields: Optional[Sequence[float]] = None,
        rabi: Optional[float] = None,
        total_time: Optional[float] = None,
) -> DynamicRange:
    """Returns the ratio of the maximum slopes of two P0(B_RF) responses.

    Args:
        low_response: P0 at the lowest sensitivity.
        high_response: P0 at full sensitivity.
        fields: Uniformly spaced fields of high_response, in tesla.
        low_fields: Uniformly spaced fields of low_response, if they differ
            from fields.
        rabi: Rabi rate, for the theoretical bound.
        total_time: Sequence length, for the theoretical bound.
    """
    high = max_slope(high_response, fields)
    low = max_slope(low_response, fields if low_fields is None else low_fields)
    bound = None
    if rabi is not None and total_time is not None:
        bound = theoretical_dr_bound(rabi, total_time)
    return DynamicRange(ratio=high / low,
                        high_slope=high,
                        low_slope=low,
                        theoretical_bound=bound)


def linear_rotation_angle(beta: float, field: float, total_time: float,
                          gamma_nv: float) -> float:
    """Returns the small-field angle Θ = (4/π²)·β·|γ_NV·B|·t.

    This is the angle a fixed-phase DYSCO program of sensitivity β = sin φ
    accumulates under the matched tone of amplitude B.
    """
    return LINEAR_RESPONSE_FACTOR * beta * abs(gamma_nv * field) * total_time
