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
"""DYSCO sequence builders.

The sequence is

    [π_x̄−φ, π_x−φ, π_x+φ, π_x̄+φ]^N − π_y − [π_x+φ, π_x̄+φ, π_x̄−φ, π_x−φ]^N

with phase labels x → 0, x̄ → π, y → π/2. Its total length is
t_N = (4N + 1/2)·2π/Ω₋.
"""

import logging
import math
from typing import List, Sequence, Tuple

import numpy as np

from dysco_sim import errors
from dysco_sim.sequence import pulse

_FIRST_HALF_LABELS = (
    'pi_xbar_minus_phi',
    'pi_x_minus_phi',
    'pi_x_plus_phi',
    'pi_xbar_plus_phi',
)
_SECOND_HALF_LABELS = (
    'pi_x_plus_phi',
    'pi_xbar_plus_phi',
    'pi_xbar_minus_phi',
    'pi_x_minus_phi',
)


def _check_arguments(n_units: int, rabi: float) -> None:
    if n_units < 1:
        raise errors.InvalidArgumentError(
            f'N must be at least 1, got {n_units!r}')
    if not rabi > 0:
        raise errors.InvalidArgumentError(
            f'rabi must be positive, got {rabi!r}')


def _first_half_unit(phi: float, rabi: float) -> List[pulse.Pulse]:
    phases = (math.pi - phi, -phi, phi, math.pi + phi)
    return [
        pulse.pi_pulse(rabi, phase, label)
        for phase, label in zip(phases, _FIRST_HALF_LABELS)
    ]


def _second_half_unit(phi: float, rabi: float) -> List[pulse.Pulse]:
    phases = (phi, math.pi + phi, math.pi - phi, -phi)
    return [
        pulse.pi_pulse(rabi, phase, label)
        for phase, label in zip(phases, _SECOND_HALF_LABELS)
    ]


def _assemble(first_phis: Sequence[float], second_phis: Sequence[float],
              rabi: float) -> Tuple[pulse.Pulse, ...]:
    pulses = []
    for phi in first_phis:
        pulses.extend(_first_half_unit(phi, rabi))
    pulses.append(pulse.pi_pulse(rabi, pulse.PHASE_Y, 'pi_y'))
    for phi in second_phis:
        pulses.extend(_second_half_unit(phi, rabi))
    return tuple(pulses)


def build_dysco(n_units: int, phi: float, rabi: float) -> pulse.PulseProgram:
    """Builds the fixed-phase DYSCO sequence.

    Args:
        n_units: Number N of 4·π-pulse units in each half.
        phi: Unit phase angle φ, in rad.
        rabi: Rabi rate Ω₋, in rad/s.

    Returns:
        Program of 8N + 1 π pulses.

    Raises:
        InvalidArgumentError: N < 1 or rabi ≤ 0.
    """
    _check_arguments(n_units, rabi)
    return pulse.PulseProgram(
        pulses=_assemble([phi] * n_units, [phi] * n_units, rabi),
        kind=pulse.SequenceKind.DYSCO,
        n_units=n_units,
    ).with_parameters(rabi_rad_s=rabi, n_units=n_units, phi_rad=phi)


def phase_for_sensitivity(beta: float) -> float:
    """Returns the unit phase φ = arcsin(β) realizing sensitivity β.

    Raises:
        InvalidArgumentError: |β| > 1.
    """
    if not abs(beta) <= 1:
        raise errors.InvalidArgumentError(
            f'sensitivity must be within [-1, 1], got {beta!r}')
    return math.asin(beta)


def unit_centers(n_units: int, rabi: float) -> np.ndarray:
    """Returns the midpoints of all 2N units, in seconds.

    First-half unit n is centered at (1 + 2n)·2π/Ω₋; second-half units are
    further delayed by the π_y pulse.
    """
    period = 2 * math.pi / rabi
    index = np.arange(2 * n_units)
    return (1 + 2 * index + 0.5 * (index >= n_units)) * period


def bandwidth_limits(n_units: int, rabi: float) -> Tuple[float, float]:
    """Returns the admitted modulation band (1/t_N, Ω₋/9π), in Hz."""
    return (1 / pulse.dysco_total_time(n_units, rabi), rabi / (9 * math.pi))


def check_bandwidth(f_s: float,
                    n_units: int,
                    rabi: float,
                    *,
                    strict: bool = True) -> None:
    """Checks a modulation frequency against the admitted band.

    f_s = 0 is always admitted; it switches the modulation off.

    Raises:
        BandwidthError: f_s is outside the band and strict is True.
    """
    lower, upper = bandwidth_limits(n_units, rabi)
    message = None
    if f_s > upper:
        message = (f'f_s = {f_s!r} Hz exceeds the bandwidth limit '
                   f'Ω₋/9π = {upper!r} Hz')
    elif 0 < f_s < lower:
        message = (f'f_s = {f_s!r} Hz is below the resolution limit '
                   f'1/t_N = {lower!r} Hz')
    elif f_s < 0:
        message = f'f_s must be non-negative, got {f_s!r}'
    if message is None:
        return
    if strict:
        raise errors.BandwidthError(message)
    logging.warning('%s', message)


def sensitivity_schedule(
        n_units: int,
        f_s: float,
        beta_k: float,
        window: pulse.Window,
        rabi: float,
) -> pulse.SensitivityProfile:
    """Returns β(t_n) = window(t_n)·β_k·sin(2π f_s t_n) for every unit."""
    if not 0 <= beta_k <= 1:
        raise errors.InvalidArgumentError(
            f'beta_k must be within [0, 1], got {beta_k!r}')
    centers = unit_centers(n_units, rabi)
    total_time = pulse.dysco_total_time(n_units, rabi)
    betas = (window(centers, total_time) * beta_k *
             np.sin(2 * math.pi * f_s * centers))
    return pulse.SensitivityProfile(
        betas=tuple(float(beta) for beta in np.clip(betas, -beta_k, beta_k)),
        centers=tuple(float(center) for center in centers),
        window=window,
        beta_k=beta_k,
        f_s=f_s,
    )


def build_dysco_modulated(
        n_units: int,
        f_s: float,
        beta_k: float,
        window: pulse.Window,
        rabi: float,
        *,
        strict_bandwidth: bool = True,
) -> pulse.PulseProgram:
    """Builds a DYSCO sequence whose sensitivity follows a sine.

    The middle π_y inverts the sign of the sensitivity of everything after it,
    so second-half units carry −φ_n to keep β(t) continuous across the middle.

    Args:
        n_units: Number N of units in each half.
        f_s: Modulation frequency, in Hz.
        beta_k: Amplitude factor in [0, 1].
        window: Envelope of the modulation.
        rabi: Rabi rate Ω₋, in rad/s.
        strict_bandwidth: Whether out-of-band f_s raises or only warns.

    Raises:
        InvalidArgumentError: Bad N, rabi or beta_k.
        BandwidthError: f_s outside the admitted band.
    """
    _check_arguments(n_units, rabi)
    check_bandwidth(f_s, n_units, rabi, strict=strict_bandwidth)
    schedule = sensitivity_schedule(n_units, f_s, beta_k, window, rabi)
    phis = [phase_for_sensitivity(beta) for beta in schedule.betas]
    first_phis = phis[:n_units]
    second_phis = [-phi for phi in phis[n_units:]]
    return pulse.PulseProgram(
        pulses=_assemble(first_phis, second_phis, rabi),
        kind=pulse.SequenceKind.DYSCO_MODULATED,
        n_units=n_units,
        sensitivity_schedule=schedule,
    ).with_parameters(rabi_rad_s=rabi,
                      n_units=n_units,
                      f_s_hz=f_s,
                      beta_k=beta_k,
                      window=window.value)
