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
"""Pulses and pulse programs."""

import dataclasses
import enum
import fractions
import math
from typing import Any, Mapping, Optional, Tuple

import frozendict
import numpy as np

from dysco_sim import errors

# Phases of the labeled drive axes, in rad.
PHASE_X = 0.0
PHASE_XBAR = math.pi
PHASE_Y = math.pi / 2

# Label prefixes that fix the nominal rotation angle of a pulse.
LABEL_PI_HALF = 'pi_half'
LABEL_PI = 'pi'
LABEL_FREE = 'free'

_ANGLE_TOLERANCE = 1e-12
_TIME_TOLERANCE = 1e-12


class SequenceKind(enum.Enum):
    """Family a program was built from.

    Attributes:
        DYSCO: Fixed-phase DYSCO sequence.
        DYSCO_MODULATED: DYSCO sequence with a per-unit sensitivity schedule.
        HAHN_ECHO: Hahn echo.
        XY8: XY8-M dynamical decoupling.
        CUSTOM: Anything else, e.g. hand-built or inverted programs.
    """
    DYSCO = 'dysco'
    DYSCO_MODULATED = 'dysco-modulated'
    HAHN_ECHO = 'hahn'
    XY8 = 'xy8'
    CUSTOM = 'custom'


class Window(enum.Enum):
    """Envelope applied to a sensitivity schedule.

    Attributes:
        RECTANGULAR: Constant envelope.
        GAUSSIAN: Gaussian centered on the middle of the sequence, with a
            standard deviation of half the sequence length.
    """
    RECTANGULAR = 'rectangular'
    GAUSSIAN = 'gaussian'

    def __call__(self, t: np.ndarray, total_time: float) -> np.ndarray:
        """Returns the envelope at times t for a sequence of total_time."""
        t = np.asarray(t, dtype=float)
        if self is Window.RECTANGULAR:
            return np.ones_like(t)
        half = total_time / 2
        return np.exp(-np.square(t - half) / (2 * half**2))


@dataclasses.dataclass(frozen=True)
class Pulse:
    """Constant-drive segment.

    Free evolution is a pulse with zero Rabi rate.

    Attributes:
        duration: Length of the segment, in seconds.
        rabi: Rabi rate Ω₋, in rad/s.
        phase: Drive phase θ, in rad.
        detuning: Drive detuning δ₋, in rad/s.
        label: Human readable name, e.g. 'pi_xbar_minus_phi'. Labels starting
            with 'pi_half' or 'pi' declare the nominal rotation angle.
    """
    duration: float
    rabi: float
    phase: float = 0.0
    detuning: float = 0.0
    label: str = LABEL_FREE

    @property
    def nominal_angle(self) -> Optional[float]:
        """Rotation angle implied by the label, if it implies one."""
        if self.label.startswith(LABEL_PI_HALF):
            return math.pi / 2
        if self.label == LABEL_PI or self.label.startswith(LABEL_PI + '_'):
            return math.pi
        return None


def pi_pulse(rabi: float, phase: float, label: str) -> Pulse:
    return Pulse(duration=math.pi / rabi, rabi=rabi, phase=phase, label=label)


def pi_half_pulse(rabi: float, phase: float, label: str) -> Pulse:
    return Pulse(duration=math.pi / (2 * rabi),
                 rabi=rabi,
                 phase=phase,
                 label=label)


def free_evolution(duration: float) -> Pulse:
    return Pulse(duration=duration, rabi=0.0, label=LABEL_FREE)


@dataclasses.dataclass(frozen=True)
class SensitivityProfile:
    """Per-unit target sensitivities of a modulated program.

    Attributes:
        betas: Target sensitivity β(t_n) of every unit, in sequence order.
        centers: Midpoint t_n of every unit, in seconds.
        window: Envelope that shaped the schedule.
        beta_k: Amplitude factor.
        f_s: Modulation frequency, in Hz.
    """
    betas: Tuple[float, ...]
    centers: Tuple[float, ...]
    window: Window
    beta_k: float
    f_s: float


@dataclasses.dataclass(frozen=True)
class PulseProgram:
    """Ordered list of pulses plus what they were built from.

    Attributes:
        pulses: The pulses, in time order.
        kind: Family the program was built from.
        n_units: Number N of 4·π-pulse units per half, or of repetitions for
            XY8. Zero if not applicable.
        sensitivity_schedule: Per-unit sensitivities of modulated programs.
        parameters: Build parameters, for provenance headers.
    """
    pulses: Tuple[Pulse, ...]
    kind: SequenceKind = SequenceKind.CUSTOM
    n_units: int = 0
    sensitivity_schedule: Optional[SensitivityProfile] = None
    parameters: Mapping[str, Any] = dataclasses.field(
        default_factory=frozendict.frozendict)

    @property
    def total_time(self) -> float:
        return math.fsum(pulse.duration for pulse in self.pulses)

    @property
    def durations(self) -> np.ndarray:
        return np.array([pulse.duration for pulse in self.pulses], dtype=float)

    @property
    def start_times(self) -> np.ndarray:
        """Start time of every pulse, each rounded once from an exact sum."""
        starts = []
        elapsed = fractions.Fraction(0)
        for pulse in self.pulses:
            starts.append(float(elapsed))
            elapsed += fractions.Fraction(pulse.duration)
        return np.array(starts, dtype=float)

    def inverted(self) -> 'PulseProgram':
        """Returns the time reverse, with every drive axis flipped.

        At zero field and detuning its propagator is the inverse of this
        program's.
        """
        return PulseProgram(pulses=tuple(
            dataclasses.replace(
                pulse, phase=math.remainder(pulse.phase + math.pi, 2 * math.pi))
            for pulse in reversed(self.pulses)))

    def with_parameters(self, **parameters: Any) -> 'PulseProgram':
        return dataclasses.replace(
            self, parameters=frozendict.frozendict(parameters))


def dysco_total_time(n_units: int, rabi: float) -> float:
    """Returns t_N = (4N + 1/2)·2π/Ω₋."""
    return (4 * n_units + 0.5) * 2 * math.pi / rabi


def same_phase(first: float, second: float) -> bool:
    """Whether two phases agree modulo 2π."""
    return abs(math.remainder(first - second, 2 * math.pi)) <= 1e-12


def _unit_phi(phases: Tuple[float, ...], *, reversed_unit: bool) -> float:
    """Returns φ of a 4-pulse unit, or NaN if it doesn't have unit form."""
    if reversed_unit:
        phi = phases[0]
        expected = (phi, math.pi + phi, math.pi - phi, -phi)
    else:
        phi = phases[2]
        expected = (math.pi - phi, -phi, phi, math.pi + phi)
    if all(map(same_phase, phases, expected)):
        return phi
    return math.nan


def _validate_pulses(program: PulseProgram):
    for index, pulse in enumerate(program.pulses):
        if not (math.isfinite(pulse.duration) and pulse.duration > 0):
            yield f'pulse {index}: duration must be positive, got {pulse.duration!r}'
        if not (math.isfinite(pulse.rabi) and pulse.rabi >= 0):
            yield f'pulse {index}: rabi must be non-negative, got {pulse.rabi!r}'
        if not (math.isfinite(pulse.phase) and math.isfinite(pulse.detuning)):
            yield f'pulse {index}: non-finite phase or detuning'
        angle = pulse.nominal_angle
        if angle is not None and abs(pulse.rabi * pulse.duration -
                                     angle) > _ANGLE_TOLERANCE:
            yield (f'pulse {index}: {pulse.label} has rotation angle '
                   f'{pulse.rabi * pulse.duration!r}, expected {angle!r}')


def _validate_dysco(program: PulseProgram):
    n_units = program.n_units
    pulses = program.pulses
    if n_units < 1:
        yield f'n_units must be at least 1, got {n_units!r}'
        return
    if len(pulses) % 2 == 0:
        yield ('mirror symmetry: even pulse count has no middle pi_y pulse '
               f'({len(pulses)} pulses)')
        return
    if len(pulses) != 8 * n_units + 1:
        yield (f'pulse count: expected 8N + 1 = {8 * n_units + 1}, '
               f'got {len(pulses)}')
        return
    middle = pulses[4 * n_units]
    if not (middle.label == 'pi_y' and same_phase(middle.phase, PHASE_Y)):
        yield f'mirror symmetry: middle pulse is {middle.label}, expected pi_y'
    rabi = pulses[0].rabi
    if any(pulse.rabi != rabi for pulse in pulses):
        yield 'all pulses must share one Rabi rate'
    elif abs(program.total_time - dysco_total_time(n_units, rabi)
            ) > _TIME_TOLERANCE * program.total_time:
        yield (f'total time {program.total_time!r} != (4N + 1/2)·2π/Ω '
               f'= {dysco_total_time(n_units, rabi)!r}')
    phases = tuple(pulse.phase for pulse in pulses)
    for unit in range(2 * n_units):
        second_half = unit >= n_units
        start = 4 * unit + (1 if second_half else 0)
        if math.isnan(
                _unit_phi(phases[start:start + 4], reversed_unit=second_half)):
            yield f'mirror symmetry: unit {unit} does not have unit phase form'
    if program.kind is SequenceKind.DYSCO:
        for index in range(4 * n_units):
            if not same_phase(phases[8 * n_units - index],
                              phases[index] + math.pi):
                yield (f'mirror symmetry: pulse {8 * n_units - index} does not '
                       f'mirror pulse {index}')
                break
    schedule = program.sensitivity_schedule
    if program.kind is SequenceKind.DYSCO_MODULATED:
        if schedule is None:
            yield 'modulated program has no sensitivity schedule'
        elif len(schedule.betas) != 2 * n_units:
            yield (f'sensitivity schedule has {len(schedule.betas)} entries, '
                   f'expected {2 * n_units}')
        elif not 0 <= schedule.beta_k <= 1 or any(
                abs(beta) > schedule.beta_k + 1e-15 for beta in schedule.betas):
            yield 'sensitivity schedule exceeds beta_k'


def validate(program: PulseProgram) -> Tuple[str, ...]:
    """Checks a program's invariants.

    Args:
        program: Program to check.

    Returns:
        Every violation found; empty if the program is valid.
    """
    violations = list(_validate_pulses(program))
    if not program.pulses:
        violations.append('program has no pulses')
    if program.kind in (SequenceKind.DYSCO, SequenceKind.DYSCO_MODULATED):
        violations.extend(_validate_dysco(program))
    return tuple(violations)


def check(program: PulseProgram) -> PulseProgram:
    """Returns the program if it's valid.

    Raises:
        InvalidProgramError: The program violates an invariant.
    """
    violations = validate(program)
    if violations:
        raise errors.InvalidProgramError(violations)
    return program
