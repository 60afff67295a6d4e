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
"""Shot averaging of populations under random waveforms."""

import dataclasses
import logging
import math
from typing import NamedTuple, Optional, Sequence

import numpy as np

from dysco_sim import errors
from dysco_sim import progress
from dysco_sim.sequence import pulse as pulse_lib
from dysco_sim.signal import waveform as waveform_lib
from dysco_sim.spin import propagator
from dysco_sim.spin import rotation
from dysco_sim.spin import state as state_lib


@dataclasses.dataclass(frozen=True)
class RunOptions:
    """How the runs of an experiment are propagated and scheduled.

    Attributes:
        substeps: Substeps per pulse.
        gamma_nv: Gyromagnetic ratio, in rad/s/T.
        initial: State every run starts in.
        envelope: Contrast envelope applied to every population, evaluated at
            the program's total time. None for ideal contrast.
        threads: Worker threads for independent sweep cells.
        bus: Bus to publish sweep progress on, if any.
    """
    substeps: int = propagator.DEFAULT_SUBSTEPS
    gamma_nv: float = rotation.GAMMA_NV
    initial: state_lib.InitialState = state_lib.InitialState.GROUND
    envelope: Optional[state_lib.Envelope] = None
    threads: int = 1
    bus: Optional[progress.ProgressBus] = dataclasses.field(default=None,
                                                            compare=False)

    def __post_init__(self) -> None:
        if self.threads < 1:
            raise errors.InvalidArgumentError(
                f'threads must be at least 1, got {self.threads!r}')


DEFAULT_OPTIONS = RunOptions()


class Estimate(NamedTuple):
    """Shot average of a population.

    Attributes:
        mean: Mean of P0 over the shots.
        stderr: Standard error of the mean; 0 for deterministic waveforms.
    """
    mean: float
    stderr: float


def propagate_p0(programs: Sequence[pulse_lib.PulseProgram],
                 b_rf: np.ndarray,
                 options: RunOptions = DEFAULT_OPTIONS) -> np.ndarray:
    """Returns P0 of every run of a batch sharing pulse timing.

    Args:
        programs: One program per run.
        b_rf: Field at the substep midpoints, shape (len(programs), steps) or
            (steps,).
        options: Propagation options.
    """
    amp0, _ = propagator.propagate_batch(
        programs,
        b_rf,
        substeps=options.substeps,
        gamma_nv=options.gamma_nv,
        initial=options.initial.state,
    )
    p0 = np.clip(np.abs(amp0)**2, 0.0, 1.0)
    if options.envelope is not None:
        p0 = options.envelope.apply(p0, programs[0].total_time)
    return p0


def shot_fields(waveform: waveform_lib.Waveform, grid: propagator.StepGrid,
                shots: int, seed: int) -> np.ndarray:
    """Returns B_RF of every shot at the substep midpoints of a grid.

    Deterministic waveforms yield a single row, whatever the shot count.

    Returns:
        Array of shape (shots, steps), or (1, steps) if the waveform is
        deterministic.
    """
    if shots < 1:
        raise errors.InvalidArgumentError(
            f'shots must be at least 1, got {shots!r}')
    if waveform.is_deterministic:
        return propagator.sample_field(waveform, grid)[np.newaxis, :]
    return np.stack([
        propagator.sample_field(waveform, grid,
                                waveform_lib.draw_shot(waveform, seed, index))
        for index in range(shots)
    ])


def estimate(p0_samples: np.ndarray) -> Estimate:
    """Returns the mean and standard error of per-shot populations."""
    samples = np.asarray(p0_samples, dtype=float)
    if len(samples) < 2:
        return Estimate(float(samples.mean()), 0.0)
    return Estimate(float(samples.mean()),
                    float(samples.std(ddof=1) / math.sqrt(len(samples))))


def monte_carlo_p0(program: pulse_lib.PulseProgram,
                   waveform: waveform_lib.Waveform,
                   shots: int,
                   seed: int,
                   *,
                   options: RunOptions = DEFAULT_OPTIONS) -> Estimate:
    """Averages P0 of a program over independent shot draws.

    All shots are propagated as one batch. Shot i uses the draws derived from
    (seed, i), so the result does not depend on how the work is scheduled.

    Args:
        program: Program to run.
        waveform: External field.
        shots: Number of shots.
        seed: Base seed.
        options: Propagation options.

    Raises:
        InvalidArgumentError: shots < 1.
    """
    grid = propagator.step_grid(program, options.substeps)
    fields = shot_fields(waveform, grid, shots, seed)
    logging.debug('Averaging %d shots of %d steps.', len(fields),
                  len(grid.durations))
    return estimate(propagate_p0((program,) * len(fields), fields, options))
