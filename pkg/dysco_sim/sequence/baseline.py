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
"""Conventional sequences used as baselines: Hahn echo and XY8."""

import math

from dysco_sim import errors
from dysco_sim.sequence import pulse

# Drive axes of one XY8 block.
_XY8_PHASES = (
    pulse.PHASE_X,
    pulse.PHASE_Y,
    pulse.PHASE_X,
    pulse.PHASE_Y,
    pulse.PHASE_Y,
    pulse.PHASE_X,
    pulse.PHASE_Y,
    pulse.PHASE_X,
)


def build_hahn_echo(tau: float,
                    rabi: float,
                    *,
                    final_pi_half: bool = False) -> pulse.PulseProgram:
    """Builds π/2_x − τ/2 − π_x − τ/2 [− π/2_x].

    Args:
        tau: Total free evolution time, in seconds.
        rabi: Rabi rate Ω₋, in rad/s.
        final_pi_half: Whether to close with a π/2 pulse mapping the echo
            phase onto populations.

    Raises:
        InvalidArgumentError: tau ≤ 0 or rabi ≤ 0.
    """
    if not tau > 0:
        raise errors.InvalidArgumentError(
            f'tau must be positive, got {tau!r}')
    if not rabi > 0:
        raise errors.InvalidArgumentError(
            f'rabi must be positive, got {rabi!r}')
    pulses = [
        pulse.pi_half_pulse(rabi, pulse.PHASE_X, 'pi_half_x'),
        pulse.free_evolution(tau / 2),
        pulse.pi_pulse(rabi, pulse.PHASE_X, 'pi_x'),
        pulse.free_evolution(tau / 2),
    ]
    if final_pi_half:
        pulses.append(pulse.pi_half_pulse(rabi, pulse.PHASE_X, 'pi_half_x'))
    return pulse.PulseProgram(
        pulses=tuple(pulses),
        kind=pulse.SequenceKind.HAHN_ECHO,
    ).with_parameters(rabi_rad_s=rabi,
                      tau_s=tau,
                      final_pi_half=final_pi_half)


def build_xy8(repetitions: int, tau: float,
              rabi: float) -> pulse.PulseProgram:
    """Builds XY8-M with π pulses spaced tau apart, center to center.

    The sequence is bracketed by π/2_x and π/2_x̄ pulses, so it returns |0⟩
    to |0⟩ at zero field. Its sensitivity toggles every tau, which puts the
    fundamental passband at f = 1/(2τ).

    Args:
        repetitions: Number M of XY8 blocks.
        tau: Interpulse spacing, in seconds.
        rabi: Rabi rate Ω₋, in rad/s.

    Raises:
        InvalidArgumentError: Bad arguments, or tau not longer than a π pulse.
    """
    if repetitions < 1:
        raise errors.InvalidArgumentError(
            f'repetitions must be at least 1, got {repetitions!r}')
    if not rabi > 0:
        raise errors.InvalidArgumentError(
            f'rabi must be positive, got {rabi!r}')
    pi_duration = math.pi / rabi
    if not tau > pi_duration:
        raise errors.InvalidArgumentError(
            f'spacing too short: tau = {tau!r} s must exceed the π pulse '
            f'length {pi_duration!r} s')
    edge_gap = pulse.free_evolution((tau - pi_duration) / 2)
    inner_gap = pulse.free_evolution(tau - pi_duration)
    pulses = [pulse.pi_half_pulse(rabi, pulse.PHASE_X, 'pi_half_x'), edge_gap]
    count = 8 * repetitions
    for index in range(count):
        phase = _XY8_PHASES[index % 8]
        label = 'pi_x' if phase == pulse.PHASE_X else 'pi_y'
        pulses.append(pulse.pi_pulse(rabi, phase, label))
        pulses.append(inner_gap if index < count - 1 else edge_gap)
    pulses.append(pulse.pi_half_pulse(rabi, pulse.PHASE_XBAR, 'pi_half_xbar'))
    return pulse.PulseProgram(
        pulses=tuple(pulses),
        kind=pulse.SequenceKind.XY8,
        n_units=repetitions,
    ).with_parameters(rabi_rad_s=rabi, repetitions=repetitions, tau_s=tau)
