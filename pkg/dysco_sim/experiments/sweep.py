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
"""Parameter sweeps over fixed-phase DYSCO programs and their baselines.

Every sweep is split into independent cells that run on a thread pool. Runs
within a cell share pulse timing and are propagated as one batch.
"""

from concurrent import futures
import dataclasses
import logging
import math
from typing import (Any, Callable, List, Mapping, Optional, Sequence, Tuple,
                    TypeVar)

import frozendict
import numpy as np

from dysco_sim import errors
from dysco_sim import progress
from dysco_sim.analysis import dynamic_range as dynamic_range_lib
from dysco_sim.analysis import spectrum
from dysco_sim.experiments import monte_carlo
from dysco_sim.sequence import baseline
from dysco_sim.sequence import dysco
from dysco_sim.sequence import pulse as pulse_lib
from dysco_sim.signal import waveform as waveform_lib
from dysco_sim.spin import propagator

T = TypeVar('T')
R = TypeVar('R')

# Largest |γ_NV·B_RF|/Ω₋ for which the response stays harmonic.
HARMONIC_FRACTION = 0.25

# Tolerance on the [0, 1] range of populations.
_P0_TOLERANCE = 1e-9


@dataclasses.dataclass(frozen=True)
class Axis:
    """Named, ordered coordinate of a sweep.

    Attributes:
        name: Column name, with a unit suffix, e.g. 'phi_rad'.
        values: Coordinate of every index.
    """
    name: str
    values: Tuple[float, ...]

    def __post_init__(self) -> None:
        if not self.values:
            raise errors.InvalidArgumentError(
                f'Axis {self.name!r} has no values.')

    def __len__(self) -> int:
        return len(self.values)


def axis(name: str, values: Sequence[float]) -> Axis:
    return Axis(name, tuple(float(value) for value in values))


@dataclasses.dataclass(frozen=True, eq=False)
class SweepResult:
    """P0 over a two-dimensional grid.

    Attributes:
        axis1: Row coordinate.
        axis2: Column coordinate.
        p0: Populations, shape (len(axis1), len(axis2)).
        metadata: Parameters needed to reproduce the sweep, e.g. Ω₋, N,
            seed, shots and substeps.
        stderr: Standard error of every cell, for shot-averaged sweeps.
    """
    axis1: Axis
    axis2: Axis
    p0: np.ndarray
    metadata: Mapping[str, Any] = dataclasses.field(
        default_factory=frozendict.frozendict)
    stderr: Optional[np.ndarray] = None

    def __post_init__(self) -> None:
        shape = (len(self.axis1), len(self.axis2))
        if self.p0.shape != shape:
            raise errors.InvalidArgumentError(
                f'p0 has shape {self.p0.shape}, axes need {shape}.')
        if self.stderr is not None and self.stderr.shape != shape:
            raise errors.InvalidArgumentError(
                f'stderr has shape {self.stderr.shape}, axes need {shape}.')
        if not np.all((self.p0 >= -_P0_TOLERANCE) &
                      (self.p0 <= 1 + _P0_TOLERANCE)):
            raise errors.InvalidArgumentError('p0 must be within [0, 1].')


@dataclasses.dataclass(frozen=True, eq=False)
class SensitivityScan:
    """Spectral view of a P0(φ, B_RF) map.

    Attributes:
        result: The underlying map.
        zeta: Spectral coordinate ζ of every column of s_map, in 1/T.
        s_map: Response spectrum of every φ row, normalized to the global
            maximum of the map.
        curve: β(φ) extracted from the map.
    """
    result: SweepResult
    zeta: np.ndarray
    s_map: np.ndarray
    curve: spectrum.SensitivityCurve


@dataclasses.dataclass(frozen=True, eq=False)
class DynamicRangeRun:
    """Responses at the lowest and the full sensitivity of one sequence.

    Attributes:
        result: P0 with a row per sensitivity (β_min, then 1) and a column per
            linear-model angle Θ.
        low_fields: Field of every column of the β_min row, in tesla.
        high_fields: Field of every column of the β = 1 row, in tesla.
        beta_min: Lowest admitted sensitivity t_1/t_N.
        dynamic_range: Slope ratio of the two rows.
    """
    result: SweepResult
    low_fields: np.ndarray
    high_fields: np.ndarray
    beta_min: float
    dynamic_range: dynamic_range_lib.DynamicRange


def run_cells(experiment: str, cells: Sequence[T], function: Callable[[T], R],
              options: monte_carlo.RunOptions) -> List[R]:
    """Runs function on every cell and returns the results in cell order."""
    tracker = progress.Tracker(options.bus, experiment, len(cells))
    logging.debug('Running %d %s cells on %d threads.', len(cells), experiment,
                  options.threads)

    def _run(index: int) -> R:
        result = function(cells[index])
        tracker.cell_finished(index)
        return result

    with futures.ThreadPoolExecutor(max_workers=options.threads) as executor:
        results = list(executor.map(_run, range(len(cells))))
    tracker.finish()
    return results


def metadata(options: monte_carlo.RunOptions,
             **parameters: Any) -> Mapping[str, Any]:
    """Returns sweep metadata with the propagation options filled in."""
    return frozendict.frozendict(
        substeps=options.substeps,
        gamma_nv_rad_s_t=options.gamma_nv,
        initial_state=options.initial.value,
        **parameters,
    )


def _check_grid(name: str, values: Sequence[float]) -> None:
    if len(values) == 0:
        raise errors.InvalidArgumentError(f'{name} grid is empty.')


def _matched_profile(program: pulse_lib.PulseProgram,
                     options: monte_carlo.RunOptions) -> np.ndarray:
    grid = propagator.step_grid(program, options.substeps)
    tone = waveform_lib.matched_tone(program.total_time, 1.0)
    return propagator.sample_field(waveform_lib.Waveform(tones=(tone,)), grid)


def _field_ramp(program: pulse_lib.PulseProgram, fields: Sequence[float],
                options: monte_carlo.RunOptions) -> np.ndarray:
    """Returns P0 of a program under the matched tone of every amplitude."""
    profile = _matched_profile(program, options)
    b_rf = np.multiply.outer(np.asarray(fields, dtype=float), profile)
    return monte_carlo.propagate_p0((program,) * len(fields), b_rf, options)


def run_p0_map(
        phis: Sequence[float],
        fields: Sequence[float],
        n_units: int,
        rabi: float,
        *,
        options: monte_carlo.RunOptions = monte_carlo.DEFAULT_OPTIONS,
) -> SweepResult:
    """Maps P0 over unit phase and field amplitude.

    Each row runs build_dysco(n_units, φ) under the matched tone
    B·cos(π t/t_N) for every amplitude B of the field grid.

    Args:
        phis: Unit phases φ, in rad.
        fields: Tone amplitudes B, in tesla.
        n_units: Number N of units per half.
        rabi: Rabi rate Ω₋, in rad/s.
        options: Propagation options.
    """
    _check_grid('phi', phis)
    _check_grid('field', fields)
    programs = [dysco.build_dysco(n_units, phi, rabi) for phi in phis]
    rows = run_cells('map', programs,
                     lambda program: _field_ramp(program, fields, options),
                     options)
    return SweepResult(
        axis1=axis('phi_rad', phis),
        axis2=axis('b_rf_t', fields),
        p0=np.array(rows),
        metadata=metadata(options,
                          experiment='map',
                          rabi_rad_s=rabi,
                          n_units=n_units,
                          total_time_s=programs[0].total_time),
    )


def run_sensitivity_scan(
        phis: Sequence[float],
        fields: Sequence[float],
        n_units: int,
        rabi: float,
        *,
        options: monte_carlo.RunOptions = monte_carlo.DEFAULT_OPTIONS,
) -> SensitivityScan:
    """Maps P0 over φ and B_RF and extracts β(φ) from its spectra.

    Args:
        phis: Unit phases φ, typically covering [0, π].
        fields: Uniformly spaced tone amplitudes within the harmonic range
            |γ_NV·B| ≤ Ω₋/4, in tesla.
        n_units: Number N of units per half.
        rabi: Rabi rate Ω₋, in rad/s.
        options: Propagation options.

    Raises:
        InvalidArgumentError: The ramp leaves the harmonic range.
        NoComponentError: No φ row responds to the field.
    """
    _check_grid('field', fields)
    largest = np.max(np.abs(fields)) * abs(options.gamma_nv)
    if largest > HARMONIC_FRACTION * rabi * (1 + 1e-12):
        raise errors.InvalidArgumentError(
            f'Field ramp leaves the harmonic range: |γB|/Ω₋ = '
            f'{largest / rabi!r} > {HARMONIC_FRACTION!r}')
    result = run_p0_map(phis, fields, n_units, rabi, options=options)
    spectra = [spectrum.response_spectrum(row, fields) for row in result.p0]
    magnitudes = np.array([row.magnitudes for row in spectra])
    peak = np.max(magnitudes)
    return SensitivityScan(
        result=result,
        zeta=spectra[0].coordinates,
        s_map=magnitudes / peak if peak > 0 else magnitudes,
        curve=spectrum.sensitivity_curve(result.p0, phis, fields),
    )


def _check_ramp(beta_ks: Sequence[float]) -> None:
    _check_grid('beta_k', beta_ks)
    betas = np.asarray(beta_ks, dtype=float)
    if betas[0] != 0:
        raise errors.InvalidArgumentError(
            f'beta_k ramp must start at 0, got {betas[0]!r}')
    if np.any(np.diff(betas) < 0):
        raise errors.InvalidArgumentError('beta_k ramp must be non-decreasing.')
    if np.any(betas > 1):
        raise errors.InvalidArgumentError(
            f'beta_k must be within [0, 1], got {np.max(betas)!r}')


def run_dr_ramp(
        beta_ks: Sequence[float],
        fields: Sequence[float],
        n_units: int,
        rabi: float,
        *,
        options: monte_carlo.RunOptions = monte_carlo.DEFAULT_OPTIONS,
) -> SweepResult:
    """Ramps the sensitivity from 0 to β_k at fixed fields.

    Every run uses build_dysco(n_units, asin β_k) under the matched tone.
    Starting at zero sensitivity makes the accumulated angle recoverable
    without 2π ambiguity, see oscillation_counts().

    Args:
        beta_ks: Non-decreasing sensitivities starting at 0.
        fields: Tone amplitudes, one row each, in tesla.
        n_units: Number N of units per half.
        rabi: Rabi rate Ω₋, in rad/s.
        options: Propagation options.
    """
    _check_ramp(beta_ks)
    _check_grid('field', fields)
    programs = tuple(
        dysco.build_dysco(n_units, dysco.phase_for_sensitivity(beta), rabi)
        for beta in beta_ks)
    profile = _matched_profile(programs[0], options)

    def _row(field: float) -> np.ndarray:
        return monte_carlo.propagate_p0(programs, field * profile, options)

    rows = run_cells('dr-ramp', list(fields), _row, options)
    return SweepResult(
        axis1=axis('b_rf_t', fields),
        axis2=axis('beta_k', beta_ks),
        p0=np.array(rows),
        metadata=metadata(options,
                          experiment='dr-ramp',
                          rabi_rad_s=rabi,
                          n_units=n_units,
                          total_time_s=programs[0].total_time),
    )


def oscillation_counts(result: SweepResult) -> np.ndarray:
    """Returns Θ(β_k = last)/2π of every row of a DR ramp."""
    return np.array([
        spectrum.unwrap_rotation_angle(row)[-1] / (2 * math.pi)
        for row in result.p0
    ])


def run_dynamic_range(
        n_units: int,
        rabi: float,
        *,
        max_fraction: float = HARMONIC_FRACTION,
        samples: int = 256,
        options: monte_carlo.RunOptions = monte_carlo.DEFAULT_OPTIONS,
) -> DynamicRangeRun:
    """Compares the responses at the lowest and the full sensitivity.

    The lowest sensitivity is β_min = t_1/t_N, that of the shortest sequence
    relative to this one. Both rows cover the same range of the linear-model
    angle, so the β_min row needs fields 1/β_min times larger.

    Args:
        n_units: Number N ≥ 2 of units per half.
        rabi: Rabi rate Ω₋, in rad/s.
        max_fraction: Largest |γ_NV·B|/Ω₋ of the β_min row.
        samples: Fields per row.
        options: Propagation options.
    """
    if n_units < 2:
        raise errors.InvalidArgumentError(
            f'n_units must be at least 2, got {n_units!r}')
    total_time = pulse_lib.dysco_total_time(n_units, rabi)
    beta_min = pulse_lib.dysco_total_time(1, rabi) / total_time
    low_fields = np.linspace(0, max_fraction * rabi / abs(options.gamma_nv),
                             samples)
    high_fields = beta_min * low_fields
    def _row(cell: Tuple[float, np.ndarray]) -> np.ndarray:
        phi, fields = cell
        return _field_ramp(dysco.build_dysco(n_units, phi, rabi), fields,
                           options)

    rows = run_cells('dynamic-range', [
        (dysco.phase_for_sensitivity(beta_min), low_fields),
        (math.pi / 2, high_fields),
    ], _row, options)
    angles = dynamic_range_lib.linear_rotation_angle(1.0, high_fields,
                                                     total_time,
                                                     options.gamma_nv)
    return DynamicRangeRun(
        result=SweepResult(
            axis1=axis('beta', (beta_min, 1.0)),
            axis2=axis('linear_angle_rad', angles),
            p0=np.array(rows),
            metadata=metadata(options,
                              experiment='dynamic-range',
                              rabi_rad_s=rabi,
                              n_units=n_units,
                              total_time_s=total_time),
        ),
        low_fields=low_fields,
        high_fields=high_fields,
        beta_min=beta_min,
        dynamic_range=dynamic_range_lib.dynamic_range(
            rows[0],
            rows[1],
            high_fields,
            low_fields=low_fields,
            rabi=rabi,
            total_time=total_time,
        ),
    )


def run_trace(
        program: pulse_lib.PulseProgram,
        waveform: waveform_lib.Waveform,
        *,
        seed: int = 0,
        options: monte_carlo.RunOptions = monte_carlo.DEFAULT_OPTIONS,
) -> propagator.Trajectory:
    """Returns the rotating-frame Bloch trajectory of one run.

    Non-deterministic waveforms use the draws of shot 0 of the seed.
    """
    if program.kind in (pulse_lib.SequenceKind.DYSCO,
                        pulse_lib.SequenceKind.DYSCO_MODULATED):
        pulse_lib.check(program)
    shot = (None if waveform.is_deterministic else waveform_lib.draw_shot(
        waveform, seed, 0))
    _, trajectory = propagator.propagate_with_trajectory(
        options.initial.state,
        program,
        waveform,
        shot=shot,
        substeps=options.substeps,
        gamma_nv=options.gamma_nv,
    )
    return trajectory


def baseline_program(kind: pulse_lib.SequenceKind,
                     tau: float,
                     rabi: float,
                     *,
                     repetitions: int = 4,
                     phi: float = math.pi / 2) -> pulse_lib.PulseProgram:
    """Returns the program of one cell of a baseline comparison.

    Args:
        kind: HAHN_ECHO, XY8 or DYSCO.
        tau: Free evolution time of the Hahn echo, or the XY8 spacing, in
            seconds. The DYSCO program gets the N whose t_N is closest to the
            length of XY8-M at this spacing.
        rabi: Rabi rate Ω₋, in rad/s.
        repetitions: Number M of XY8 blocks.
        phi: Unit phase of the DYSCO program.

    Raises:
        InvalidArgumentError: Unsupported kind or bad parameters.
    """
    if kind is pulse_lib.SequenceKind.HAHN_ECHO:
        return baseline.build_hahn_echo(tau, rabi, final_pi_half=True)
    if kind is pulse_lib.SequenceKind.XY8:
        return baseline.build_xy8(repetitions, tau, rabi)
    if kind is pulse_lib.SequenceKind.DYSCO:
        periods = 8 * repetitions * tau * rabi / (2 * math.pi)
        n_units = max(1, round((periods - 0.5) / 4))
        return dysco.build_dysco(n_units, phi, rabi)
    raise errors.InvalidArgumentError(
        f'{kind.value!r} is not a baseline sequence.')


def run_baseline_comparison(
        kinds: Sequence[pulse_lib.SequenceKind],
        taus: Sequence[float],
        waveform: waveform_lib.Waveform,
        rabi: float,
        *,
        repetitions: int = 4,
        phi: float = math.pi / 2,
        shots: int = 1,
        seed: int = 0,
        options: monte_carlo.RunOptions = monte_carlo.DEFAULT_OPTIONS,
) -> SweepResult:
    """Shot-averages P0 of baseline sequences and DYSCO over spacings.

    Every cell uses the same shot draws, so the rows differ only by the
    sequence. The contrast envelope of options, if any, is applied at the
    length of every program.

    Args:
        kinds: Sequence of every row, see baseline_program().
        taus: Spacing of every column, in seconds.
        waveform: External field, e.g. a bath surrogate.
        rabi: Rabi rate Ω₋, in rad/s.
        repetitions: Number M of XY8 blocks.
        phi: Unit phase of DYSCO rows.
        shots: Shots per cell.
        seed: Base seed.
        options: Propagation options.
    """
    _check_grid('sequence', kinds)
    _check_grid('tau', taus)
    cells = [(kind, tau) for kind in kinds for tau in taus]
    programs = [
        baseline_program(kind, tau, rabi, repetitions=repetitions, phi=phi)
        for kind, tau in cells
    ]
    estimates = run_cells(
        'baseline', programs, lambda program: monte_carlo.monte_carlo_p0(
            program, waveform, shots, seed, options=options), options)
    shape = (len(kinds), len(taus))
    return SweepResult(
        axis1=axis('sequence', range(len(kinds))),
        axis2=axis('tau_s', taus),
        p0=np.array([estimate.mean for estimate in estimates]).reshape(shape),
        stderr=np.array([estimate.stderr for estimate in estimates
                        ]).reshape(shape),
        metadata=metadata(options,
                          experiment='baseline',
                          sequences=','.join(kind.value for kind in kinds),
                          rabi_rad_s=rabi,
                          repetitions=repetitions,
                          phi_rad=phi,
                          shots=shots,
                          seed=seed),
    )
