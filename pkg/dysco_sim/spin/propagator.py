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
"""Propagation of the spin through pulse programs.

Every pulse is split into substeps; B_RF is sampled at substep midpoints and
each substep applies the closed-form rotation of its constant field. Runs that
share pulse timing are propagated together as one vectorized batch.
"""

import dataclasses
import enum
import logging
from typing import Optional, Sequence, Tuple

import numpy as np

from dysco_sim import errors
from dysco_sim.sequence import pulse as pulse_lib
from dysco_sim.signal import waveform as waveform_lib
from dysco_sim.spin import rotation
from dysco_sim.spin import state as state_lib

DEFAULT_SUBSTEPS = 16

# Upper bound on batch × steps held in memory at once.
_MAX_BATCH_ELEMENTS = 1 << 21


class Frame(enum.Enum):
    """Frame the final state is reported in.

    Attributes:
        ROTATING: The rotating frame of the drive.
        CONTROL: The frame of the ideal program, i.e. the rotating-frame state
            with the field-free, on-resonance program undone. Populations in
            this frame are referenced to the zero-field outcome.
    """
    ROTATING = enum.auto()
    CONTROL = enum.auto()


@dataclasses.dataclass(frozen=True, eq=False)
class StepGrid:
    """Substep layout of a program.

    Attributes:
        midpoints: Midpoint of every substep, in seconds.
        durations: Length of every substep, in seconds.
        pulse_index: Index of the pulse every substep belongs to.
    """
    midpoints: np.ndarray
    durations: np.ndarray
    pulse_index: np.ndarray


@dataclasses.dataclass(frozen=True, eq=False)
class Trajectory:
    """Bloch vectors sampled at substep boundaries.

    Attributes:
        times: Sample times, in seconds, starting with 0.
        bloch: Bloch vectors, shape (len(times), 3).
        pulse_index: Pulse that ends each sample's substep; -1 for the initial
            sample.
    """
    times: np.ndarray
    bloch: np.ndarray
    pulse_index: np.ndarray


def step_grid(program: pulse_lib.PulseProgram, substeps: int) -> StepGrid:
    """Returns the substep layout of a program."""
    if substeps < 1:
        raise errors.InvalidArgumentError(
            f'substeps_per_pulse must be at least 1, got {substeps!r}')
    durations = program.durations / substeps
    offsets = np.arange(substeps) + 0.5
    midpoints = (program.start_times[:, np.newaxis] +
                 offsets[np.newaxis, :] * durations[:, np.newaxis])
    return StepGrid(
        midpoints=midpoints.ravel(),
        durations=np.repeat(durations, substeps),
        pulse_index=np.repeat(np.arange(len(program.pulses)), substeps),
    )


def _drive_arrays(
        programs: Sequence[pulse_lib.PulseProgram]
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    rabi = np.array([[p.rabi for p in program.pulses] for program in programs])
    phase = np.array([[p.phase for p in program.pulses] for program in programs
                     ])
    detuning = np.array([[p.detuning for p in program.pulses]
                         for program in programs])
    return rabi, phase, detuning


def _check_programs(programs: Sequence[pulse_lib.PulseProgram]) -> None:
    for program in programs:
        violations = [
            violation for violation in pulse_lib.validate(program)
            if violation.startswith('pulse ')
        ]
        if violations or not program.pulses:
            raise errors.InvalidProgramError(violations or ['no pulses'])
    durations = programs[0].durations
    for program in programs[1:]:
        if not np.array_equal(program.durations, durations):
            raise ValueError('Batched programs must share pulse timing.')


def reference_unitaries(
        programs: Sequence[pulse_lib.PulseProgram]
) -> Tuple[np.ndarray, np.ndarray]:
    """Returns (a, b) of the ideal field-free, on-resonance programs."""
    rabi, phase, _ = _drive_arrays(programs)
    a, b = rotation.cayley_klein(rabi * np.cos(phase), -rabi * np.sin(phase),
                                 np.zeros_like(rabi),
                                 programs[0].durations[np.newaxis, :])
    return rotation.reduce_product(a, b)


def reference_unitary(program: pulse_lib.PulseProgram) -> rotation.Unitary2:
    """Returns the ideal field-free, on-resonance unitary of one program."""
    a, b = reference_unitaries((program,))
    return rotation.Unitary2(complex(a[0]), complex(b[0]))


def propagate_batch(
        programs: Sequence[pulse_lib.PulseProgram],
        b_rf: np.ndarray,
        *,
        substeps: int = DEFAULT_SUBSTEPS,
        gamma_nv: float = rotation.GAMMA_NV,
        initial: state_lib.SpinState = state_lib.GROUND,
        frame: Frame = Frame.CONTROL,
        normalize: bool = True,
) -> Tuple[np.ndarray, np.ndarray]:
    """Propagates many runs that share pulse timing.

    Args:
        programs: One program per run, all with identical pulse durations.
        b_rf: Field at the substep midpoints of step_grid(programs[0],
            substeps), shape (len(programs), steps) or (steps,) for a field
            shared by all runs, in tesla.
        substeps: Substeps per pulse.
        gamma_nv: Gyromagnetic ratio, in rad/s/T.
        initial: State every run starts in.
        frame: Frame of the returned amplitudes.
        normalize: Whether to rescale the final states to unit norm.

    Returns:
        Final amplitudes (amp0, ampm), each of shape (len(programs),).

    Raises:
        InvalidProgramError: A pulse has a non-positive duration.
    """
    programs = tuple(programs)
    _check_programs(programs)
    grid = step_grid(programs[0], substeps)
    b_rf = np.broadcast_to(np.asarray(b_rf, dtype=float),
                           (len(programs), len(grid.durations)))
    chunk = max(1, _MAX_BATCH_ELEMENTS // len(grid.durations))
    logging.debug('Propagating %d runs of %d steps in chunks of %d.',
                  len(programs), len(grid.durations), chunk)
    a_parts = []
    b_parts = []
    for start in range(0, len(programs), chunk):
        rabi, phase, detuning = _drive_arrays(programs[start:start + chunk])
        rabi = np.repeat(rabi, substeps, axis=1)
        phase = np.repeat(phase, substeps, axis=1)
        detuning = np.repeat(detuning, substeps, axis=1)
        a, b = rotation.cayley_klein(
            rabi * np.cos(phase),
            -rabi * np.sin(phase),
            -detuning + gamma_nv * b_rf[start:start + chunk],
            grid.durations[np.newaxis, :],
        )
        a, b = rotation.reduce_product(a, b)
        if frame is Frame.CONTROL:
            ref_a, ref_b = reference_unitaries(programs[start:start + chunk])
            a, b = rotation.compose(np.conj(ref_a), -ref_b, a, b)
        a_parts.append(a)
        b_parts.append(b)
    a = np.concatenate(a_parts)
    b = np.concatenate(b_parts)
    amp0 = a * initial.amp0 + b * initial.ampm
    ampm = -np.conj(b) * initial.amp0 + np.conj(a) * initial.ampm
    if normalize:
        norm = np.sqrt(np.abs(amp0)**2 + np.abs(ampm)**2)
        amp0 = amp0 / norm
        ampm = ampm / norm
    return amp0, ampm


def sample_field(
        waveform: waveform_lib.Waveform,
        grid: StepGrid,
        shot: Optional[waveform_lib.ShotContext] = None,
) -> np.ndarray:
    """Returns B_RF at the substep midpoints of a grid."""
    return np.asarray(waveform_lib.sample(waveform, grid.midpoints, shot),
                      dtype=float)


def propagate(
        state: state_lib.SpinState,
        program: pulse_lib.PulseProgram,
        waveform: waveform_lib.Waveform,
        *,
        shot: Optional[waveform_lib.ShotContext] = None,
        substeps: int = DEFAULT_SUBSTEPS,
        gamma_nv: float = rotation.GAMMA_NV,
        frame: Frame = Frame.CONTROL,
) -> state_lib.SpinState:
    """Propagates a state through a program under a waveform.

    Args:
        state: Initial state.
        program: Program to run.
        waveform: External field.
        shot: Random draws of the shot, for non-deterministic waveforms.
        substeps: Substeps per pulse.
        gamma_nv: Gyromagnetic ratio, in rad/s/T.
        frame: Frame of the returned state.

    Returns:
        The normalized final state.
    """
    grid = step_grid(program, substeps)
    amp0, ampm = propagate_batch(
        (program,),
        sample_field(waveform, grid, shot),
        substeps=substeps,
        gamma_nv=gamma_nv,
        initial=state,
        frame=frame,
    )
    return state_lib.SpinState(complex(amp0[0]), complex(ampm[0]))


def propagate_with_trajectory(
        state: state_lib.SpinState,
        program: pulse_lib.PulseProgram,
        waveform: waveform_lib.Waveform,
        *,
        shot: Optional[waveform_lib.ShotContext] = None,
        substeps: int = DEFAULT_SUBSTEPS,
        gamma_nv: float = rotation.GAMMA_NV,
        frame: Frame = Frame.ROTATING,
) -> Tuple[state_lib.SpinState, Trajectory]:
    """Like propagate(), also returning the rotating-frame trajectory.

    Only the final state is reported in frame; the trajectory always stays in
    the rotating frame.
    """
    _check_programs((program,))
    grid = step_grid(program, substeps)
    rabi, phase, detuning = (
        np.repeat(values[0], substeps)
        for values in _drive_arrays((program,)))
    step_a, step_b = rotation.cayley_klein(
        rabi * np.cos(phase),
        -rabi * np.sin(phase),
        -detuning + gamma_nv * sample_field(waveform, grid, shot),
        grid.durations,
    )
    amp0 = np.empty(len(grid.durations) + 1, dtype=complex)
    ampm = np.empty_like(amp0)
    amp0[0], ampm[0] = state.amp0, state.ampm
    for index, (a, b) in enumerate(zip(step_a, step_b)):
        amp0[index + 1], ampm[index + 1] = rotation.Unitary2(a, b).apply(
            amp0[index], ampm[index])
    norm = np.sqrt(np.abs(amp0)**2 + np.abs(ampm)**2)
    amp0 /= norm
    ampm /= norm
    trajectory = Trajectory(
        times=np.concatenate(([0.0], np.cumsum(grid.durations))),
        bloch=state_lib.bloch_array(amp0, ampm),
        pulse_index=np.concatenate(([-1], grid.pulse_index)),
    )
    final = (complex(amp0[-1]), complex(ampm[-1]))
    if frame is Frame.CONTROL:
        final = reference_unitary(program).inverse().apply(*final)
    return state_lib.SpinState(*final), trajectory
