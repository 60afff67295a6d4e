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
"""Spectrograms from sine-modulated dynamical sensitivity.

Each column scans one modulation frequency f_s, each row one amplitude β_k of
the sensitivity. All cells share the same shot draws.
"""

import dataclasses
import logging
from typing import Any, Mapping, Optional, Sequence

import frozendict
import numpy as np

from dysco_sim import errors
from dysco_sim.analysis import spectrum
from dysco_sim.experiments import monte_carlo
from dysco_sim.experiments import sweep
from dysco_sim.sequence import dysco
from dysco_sim.sequence import pulse
from dysco_sim.signal import waveform as waveform_lib
from dysco_sim.spin import propagator

# Shots of asynchronous runs, giving a standard error of about 0.02 on the
# P0 = 1/2 plateau.
DEFAULT_ASYNCHRONOUS_SHOTS = 200
MIN_ASYNCHRONOUS_SHOTS = 100

# Smallest deviation 1 − P0 reported as a response.
DETECTION_FLOOR = 0.01


@dataclasses.dataclass(frozen=True, eq=False)
class Spectrogram:
    """P0 over modulation frequency and sensitivity amplitude.

    Attributes:
        f_s: Modulation frequency of every column, in Hz.
        beta_k: Sensitivity amplitude of every row, from 0 to 1.
        p0: Shot-averaged populations, shape (len(beta_k), len(f_s)).
        stderr: Standard error of every cell.
        shots: Shots per cell; 1 for deterministic waveforms.
        metadata: Parameters needed to reproduce the spectrogram.
    """
    f_s: np.ndarray
    beta_k: np.ndarray
    p0: np.ndarray
    stderr: np.ndarray
    shots: int
    metadata: Mapping[str, Any] = dataclasses.field(
        default_factory=frozendict.frozendict)

    def __post_init__(self) -> None:
        shape = (len(self.beta_k), len(self.f_s))
        if self.p0.shape != shape or self.stderr.shape != shape:
            raise errors.InvalidArgumentError(
                f'Spectrogram cells must have shape {shape}.')
        if not np.all((self.p0 >= 0) & (self.p0 <= 1)):
            raise errors.InvalidArgumentError('p0 must be within [0, 1].')

    def response(self) -> np.ndarray:
        """Returns the largest deviation 1 − P0 over β_k of every column."""
        return np.max(1 - self.p0, axis=0)

    @property
    def detection_threshold(self) -> float:
        """5× the median column response, but at least DETECTION_FLOOR."""
        return max(
            spectrum.DETECTION_FACTOR * float(np.median(self.response())),
            DETECTION_FLOOR)

    def detected(self) -> np.ndarray:
        """Returns whether every column responds above the threshold."""
        return self.response() > self.detection_threshold

    @errors.handle_error_policy
    def field_strength(self, *,
                       error_policy: errors.ErrorPolicy) -> np.ndarray:
        """Returns the dominant component magnitude of P0(β_k) per column.

        Over the unambiguous range it grows monotonically with the amplitude
        of the field the column is tuned to. Columns without any non-DC
        component get 0.

        Raises:
            SamplingError: Fewer than spectrum.MIN_SAMPLES rows of β_k.
        """
        del error_policy  # Handled by the decorator.
        strengths = []
        for column in self.p0.T:
            component = spectrum.dominant_component(
                spectrum.response_spectrum(column, self.beta_k),
                detection_factor=0.0)
            strengths.append(0.0 if component is None else component.magnitude)
        return np.array(strengths)

    def as_sweep_result(self) -> sweep.SweepResult:
        return sweep.SweepResult(
            axis1=sweep.axis('beta_k', self.beta_k),
            axis2=sweep.axis('f_s_hz', self.f_s),
            p0=self.p0,
            stderr=self.stderr,
            metadata=self.metadata,
        )


def default_shots(waveform: waveform_lib.Waveform) -> int:
    return 1 if waveform.is_deterministic else DEFAULT_ASYNCHRONOUS_SHOTS


def _spectrogram(
        experiment: str,
        f_s_values: Sequence[float],
        beta_k_steps: int,
        waveform: waveform_lib.Waveform,
        n_units: int,
        rabi: float,
        *,
        window: pulse.Window,
        shots: Optional[int],
        seed: int,
        strict_bandwidth: bool,
        options: monte_carlo.RunOptions,
) -> Spectrogram:
    if len(f_s_values) == 0:
        raise errors.InvalidArgumentError('f_s grid is empty.')
    if beta_k_steps < 1:
        raise errors.InvalidArgumentError(
            f'beta_k_steps must be at least 1, got {beta_k_steps!r}')
    if shots is None:
        shots = default_shots(waveform)
    if not waveform.is_deterministic and shots < MIN_ASYNCHRONOUS_SHOTS:
        raise errors.InvalidArgumentError(
            f'Random waveforms need at least {MIN_ASYNCHRONOUS_SHOTS} shots, '
            f'got {shots!r}')
    for f_s in f_s_values:
        dysco.check_bandwidth(f_s, n_units, rabi, strict=strict_bandwidth)
    beta_ks = np.linspace(0, 1, beta_k_steps + 1)
    # Every cell shares the timing of the unmodulated program.
    reference = dysco.build_dysco(n_units, 0.0, rabi)
    grid = propagator.step_grid(reference, options.substeps)
    fields = monte_carlo.shot_fields(waveform, grid, shots, seed)
    logging.debug('%s: %d columns of %d rows, %d shots of %d steps.',
                  experiment, len(f_s_values), len(beta_ks), len(fields),
                  len(grid.durations))

    def _column(f_s: float) -> np.ndarray:
        estimates = []
        for beta_k in beta_ks:
            program = dysco.build_dysco_modulated(
                n_units,
                f_s,
                beta_k,
                window,
                rabi,
                strict_bandwidth=strict_bandwidth,
            )
            estimates.append(
                monte_carlo.estimate(
                    monte_carlo.propagate_p0((program,) * len(fields), fields,
                                             options)))
        return np.array(estimates)

    columns = sweep.run_cells(experiment, list(f_s_values), _column, options)
    cells = np.stack(columns, axis=1)
    return Spectrogram(
        f_s=np.asarray(f_s_values, dtype=float),
        beta_k=beta_ks,
        p0=cells[..., 0],
        stderr=cells[..., 1],
        shots=len(fields),
        metadata=sweep.metadata(options,
                                experiment=experiment,
                                rabi_rad_s=rabi,
                                n_units=n_units,
                                total_time_s=reference.total_time,
                                window=window.value,
                                beta_k_steps=beta_k_steps,
                                shots=len(fields),
                                seed=seed),
    )


def run_spectrogram(
        f_s_values: Sequence[float],
        beta_k_steps: int,
        waveform: waveform_lib.Waveform,
        n_units: int,
        rabi: float,
        *,
        window: pulse.Window = pulse.Window.RECTANGULAR,
        shots: Optional[int] = None,
        seed: int = 0,
        strict_bandwidth: bool = True,
        options: monte_carlo.RunOptions = monte_carlo.DEFAULT_OPTIONS,
) -> Spectrogram:
    """Scans the modulation frequency and amplitude of the sensitivity.

    The sensitivity of every cell follows window(t)·β_k·sin(2π f_s t), so a
    synchronous tone a·sin(2π f_s t) is sensed in phase. Its frequency
    resolution is 1/t_N.

    Args:
        f_s_values: Modulation frequencies, any order, in Hz.
        beta_k_steps: Number K of β_k steps; rows are β_k = k/K, k = 0..K.
        waveform: External field.
        n_units: Number N of units per half.
        rabi: Rabi rate Ω₋, in rad/s.
        window: Envelope of the modulation.
        shots: Shots per cell; 1 for deterministic waveforms and
            DEFAULT_ASYNCHRONOUS_SHOTS otherwise if None.
        seed: Base seed of the shot draws.
        strict_bandwidth: Whether out-of-band f_s raises or only warns.
        options: Propagation options.

    Raises:
        BandwidthError: An f_s outside [1/t_N, Ω₋/9π].
        InvalidArgumentError: Bad grids, or too few shots for a random
            waveform.
    """
    return _spectrogram('spectrogram',
                        f_s_values,
                        beta_k_steps,
                        waveform,
                        n_units,
                        rabi,
                        window=window,
                        shots=shots,
                        seed=seed,
                        strict_bandwidth=strict_bandwidth,
                        options=options)


def run_noise_spectrum(
        f_s_values: Sequence[float],
        beta_k_steps: int,
        bath: waveform_lib.BathSurrogate,
        n_units: int,
        rabi: float,
        *,
        tones: Sequence[waveform_lib.Tone] = (),
        window: pulse.Window = pulse.Window.RECTANGULAR,
        shots: int = DEFAULT_ASYNCHRONOUS_SHOTS,
        seed: int = 0,
        strict_bandwidth: bool = True,
        options: monte_carlo.RunOptions = monte_carlo.DEFAULT_OPTIONS,
) -> Spectrogram:
    """Like run_spectrogram(), for a bath plus optional asynchronous tones.

    Bath and tone draws come from separate random streams, so adding tones
    leaves the bath of every shot unchanged.
    """
    waveform = waveform_lib.Waveform(
        tones=tuple(tones),
        bath=bath,
        shot_phase_mode=waveform_lib.ShotPhaseMode.RANDOM_PER_SHOT,
    )
    return _spectrogram('noise-spectrum',
                        f_s_values,
                        beta_k_steps,
                        waveform,
                        n_units,
                        rabi,
                        window=window,
                        shots=shots,
                        seed=seed,
                        strict_bandwidth=strict_bandwidth,
                        options=options)
