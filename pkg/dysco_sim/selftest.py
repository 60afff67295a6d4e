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
"""Fast invariant checks that run without the test suite."""

import logging
import math
import sys
from typing import Callable, Optional, TextIO, Tuple

import numpy as np
import scipy.linalg

from dysco_sim import errors
from dysco_sim.analysis import dynamic_range
from dysco_sim.experiments import monte_carlo
from dysco_sim.sequence import dysco
from dysco_sim.sequence import pulse
from dysco_sim.signal import waveform as waveform_lib
from dysco_sim.spin import propagator
from dysco_sim.spin import rotation
from dysco_sim.spin import state as state_lib

_RABI = 2 * math.pi * 8.33e6

_PAULI = (
    np.array(((0, 1), (1, 0)), dtype=complex),
    np.array(((0, -1j), (1j, 0)), dtype=complex),
    np.array(((1, 0), (0, -1)), dtype=complex),
)


class SelfTestFailure(errors.Error):
    """An invariant does not hold."""


def _expect(condition: bool, message: str) -> None:
    if not condition:
        raise SelfTestFailure(message)


def check_zero_field_identity() -> None:
    for n_units in (1, 5, 20, 100):
        for phi in (0, math.pi / 6, math.pi / 4, math.pi / 2, math.pi):
            final = propagator.propagate(state_lib.GROUND,
                                         dysco.build_dysco(n_units, phi, _RABI),
                                         waveform_lib.ZERO)
            p0 = state_lib.p0(final)
            _expect(
                abs(p0 - 1) < 1e-9,
                f'P0 = {p0!r} at zero field for N = {n_units}, φ = {phi!r}')


def check_closed_form_rotation() -> None:
    rng = np.random.default_rng(0)
    for _ in range(100):
        hx, hy, hz = rng.normal(scale=_RABI, size=3)
        duration = rng.uniform(0, 1e-6)
        expected = scipy.linalg.expm(
            0.5j * duration *
            (hx * _PAULI[0] + hy * _PAULI[1] + hz * _PAULI[2]))
        actual = rotation.rotation(rotation.EffectiveField(hx, hy, hz),
                                   duration).matrix
        error = np.max(np.abs(actual - expected))
        _expect(error < 1e-10, f'Rotation deviates from expm by {error!r}')


def check_programs_validate() -> None:
    for program in (
            dysco.build_dysco(20, math.pi / 3, _RABI),
            dysco.build_dysco_modulated(20, 500e3, 0.5,
                                        pulse.Window.GAUSSIAN, _RABI),
    ):
        violations = pulse.validate(program)
        _expect(not violations, f'{program.kind.value}: {violations}')


def check_limits() -> None:
    _, upper = dysco.bandwidth_limits(40, _RABI)
    _expect(
        abs(upper - 1.851e6) < 1e3,
        f'Bandwidth limit is {upper!r} Hz, expected about 1.851 MHz')
    bound = dynamic_range.theoretical_dr_bound(_RABI, state_lib.T_DYSCO)
    _expect(
        abs(bound - 4.72e3) < 0.05e3,
        f'Dynamic range bound is {bound!r}, expected about 4.72e3')


def check_reproducible_shots() -> None:
    program = dysco.build_dysco(5, math.pi / 2, _RABI)
    waveform = waveform_lib.Waveform(
        tones=(waveform_lib.Tone(1e-4, 1e6),),
        shot_phase_mode=waveform_lib.ShotPhaseMode.RANDOM_PER_SHOT,
    )
    first, second = (
        monte_carlo.monte_carlo_p0(program, waveform, 8, 42) for _ in range(2))
    _expect(first == second, f'Same seed gave {first} and {second}')


CHECKS: Tuple[Tuple[str, Callable[[], None]], ...] = (
    ('zero-field identity', check_zero_field_identity),
    ('closed-form rotation', check_closed_form_rotation),
    ('program invariants', check_programs_validate),
    ('bandwidth and dynamic range limits', check_limits),
    ('reproducible shots', check_reproducible_shots),
)


def run(stream: Optional[TextIO] = None) -> int:
    """Runs every check, writing one PASS or FAIL line per check.

    Args:
        stream: Where the lines go; stdout if None.

    Returns:
        0 if every check passed, 1 otherwise.
    """
    stream = stream or sys.stdout
    failures = 0
    for name, check in CHECKS:
        try:
            check()
        except errors.Error as error:
            logging.error('Self test %r failed: %s', name, error)
            stream.write(f'FAIL {name}: {error}\n')
            failures += 1
        else:
            stream.write(f'PASS {name}\n')
    return 1 if failures else 0
