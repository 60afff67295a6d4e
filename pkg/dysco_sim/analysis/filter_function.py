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
"""Sensitivity functions, filter functions and coherence integrals.

The sensitivity function g(t) of a program is the in-plane part of σ_z in the
toggling frame of the ideal, field-free program, projected on its dominant
axis. Its filter function is F(ω) = ω²/2·|ĝ(ω)|² with
ĝ(ω) = ∫ g(t)·e^{iωt} dt, and a noise spectrum S(ω) dephases the spin by

    χ(t) = (1/π)·∫ S(ω)·F(ωt)/ω² dω.
"""

import dataclasses
import logging
import math
from typing import Callable, Optional, Sequence

import numpy as np
import scipy.integrate

from dysco_sim import errors
from dysco_sim.sequence import pulse as pulse_lib
from dysco_sim.spin import rotation

DEFAULT_SAMPLES_PER_PULSE = 16
COVERAGE_TOLERANCE = 1e-3

# Upper bound on frequencies × samples held in memory at once.
_MAX_TRANSFORM_ELEMENTS = 1 << 22
_INITIAL_POINTS = 257
_MIN_REFINEMENTS = 2
_MAX_REFINEMENTS = 12


@dataclasses.dataclass(frozen=True, eq=False)
class SensitivityFunction:
    """g(t) sampled at the midpoints of a uniform grid over [0, t].

    Attributes:
        values: g at every sample.
        dt: Sample spacing, in seconds.
    """
    values: np.ndarray
    dt: float

    @property
    def times(self) -> np.ndarray:
        return (np.arange(len(self.values)) + 0.5) * self.dt

    @property
    def duration(self) -> float:
        return len(self.values) * self.dt


def sensitivity_function(program: pulse_lib.PulseProgram,
                         dt: float) -> SensitivityFunction:
    """Samples the sensitivity function of a program.

    g is defined up to an overall sign.

    Args:
        program: Program to analyze.
        dt: Largest admitted sample spacing, in seconds. The spacing used is
            the largest one not above dt that divides the program length.
    """
    if not dt > 0:
        raise errors.InvalidArgumentError(f'dt must be positive, got {dt!r}')
    total_time = program.total_time
    count = max(1, math.ceil(total_time / dt))
    dt = total_time / count
    times = (np.arange(count) + 0.5) * dt
    starts = program.start_times
    index = np.clip(
        np.searchsorted(starts, times, side='right') - 1, 0,
        len(starts) - 1)
    rabi = np.array([p.rabi for p in program.pulses])
    phase = np.array([p.phase for p in program.pulses])
    hx = rabi * np.cos(phase)
    hy = -rabi * np.sin(phase)
    step_a, step_b = rotation.cayley_klein(hx, hy, np.zeros_like(rabi),
                                           program.durations)
    before_a = np.empty(len(rabi), dtype=complex)
    before_b = np.empty(len(rabi), dtype=complex)
    a, b = 1 + 0j, 0j
    for pulse_index in range(len(rabi)):
        before_a[pulse_index], before_b[pulse_index] = a, b
        a, b = rotation.compose(step_a[pulse_index], step_b[pulse_index], a, b)
    partial_a, partial_b = rotation.cayley_klein(hx[index], hy[index],
                                                 np.zeros(count),
                                                 times - starts[index])
    a, b = rotation.compose(partial_a, partial_b, before_a[index],
                            before_b[index])
    in_plane = 2 * a * np.conj(b)
    # Axis of g averaged over four pulses; in-plane swings that alternate
    # between pulse pairs cancel in the average.
    driven = [p.duration for p in program.pulses if p.rabi > 0]
    width = min(count, max(1, round(4 * min(driven, default=0.0) / dt)))
    smoothed = np.convolve(in_plane, np.ones(width) / width, mode='same')
    axis = 0.5 * np.angle(np.sum(np.square(smoothed)))
    return SensitivityFunction(values=np.real(in_plane * np.exp(-1j * axis)),
                               dt=dt)


def _transform(values: np.ndarray, dt: float,
               omega: np.ndarray) -> np.ndarray:
    """Returns ĝ(ω) = Σ g_j·e^{iωt_j}·dt at every ω."""
    times = (np.arange(len(values)) + 0.5) * dt
    chunk = max(1, _MAX_TRANSFORM_ELEMENTS // max(1, len(values)))
    parts = [
        np.exp(1j * np.multiply.outer(omega[start:start + chunk], times)) @
        values for start in range(0, len(omega), chunk)
    ]
    if not parts:
        return np.zeros(0, dtype=complex)
    return np.concatenate(parts) * dt


@dataclasses.dataclass(frozen=True, eq=False)
class FilterFunction:
    """F(ω) of a sampled sensitivity function.

    Attributes:
        omega_grid: Angular frequencies, in rad/s.
        values: F at every frequency.
        g: Sensitivity function the filter was computed from.
        dt: Sample spacing of g, in seconds.
    """
    omega_grid: np.ndarray
    values: np.ndarray
    g: np.ndarray
    dt: float

    @property
    def duration(self) -> float:
        return len(self.g) * self.dt

    def transform(self,
                  omega: np.ndarray,
                  duration: Optional[float] = None) -> np.ndarray:
        """Returns ĝ(ω) of g stretched to the given duration."""
        dt = self.dt if duration is None else self.dt * duration / self.duration
        return _transform(self.g, dt, np.asarray(omega, dtype=float))


def filter_function(g: Sequence[float], dt: float,
                    omega_grid: Sequence[float]) -> FilterFunction:
    """Computes F(ω) = ω²/2·|ĝ(ω)|² on a grid.

    Args:
        g: Sensitivity function sampled at the midpoints of a uniform grid.
        dt: Sample spacing, in seconds.
        omega_grid: Angular frequencies, in rad/s.
    """
    g = np.asarray(g, dtype=float)
    omega_grid = np.asarray(omega_grid, dtype=float)
    transform = _transform(g, dt, omega_grid)
    return FilterFunction(
        omega_grid=omega_grid,
        values=np.square(omega_grid) * np.square(np.abs(transform)) / 2,
        g=g,
        dt=dt,
    )


def program_filter_function(
        program: pulse_lib.PulseProgram,
        omega_grid: Sequence[float],
        *,
        samples_per_pulse: int = DEFAULT_SAMPLES_PER_PULSE,
) -> FilterFunction:
    """Filter function of a program, sampled finely enough for its pulses."""
    dt = min(p.duration for p in program.pulses) / samples_per_pulse
    sensitivity = sensitivity_function(program, dt)
    logging.debug('Sampled sensitivity function with %d points.',
                  len(sensitivity.values))
    return filter_function(sensitivity.values, sensitivity.dt, omega_grid)


def _check_coverage(spectrum: np.ndarray, lower_is_open: bool) -> None:
    peak = float(np.max(np.abs(spectrum)))
    if not peak > 0:
        return
    edges = [abs(spectrum[-1])]
    if lower_is_open:
        edges.append(abs(spectrum[0]))
    if max(edges) > COVERAGE_TOLERANCE * peak:
        raise errors.GridCoverageError(
            f'Noise spectrum at the grid edge is {max(edges) / peak!r} of its '
            f'peak; extend the filter grid to cover the spectrum.')


def coherence_integral(
        noise_spectrum: Callable[[np.ndarray], np.ndarray],
        filter_fn: FilterFunction,
        t: float,
        *,
        rtol: float = 1e-6,
) -> float:
    """Returns χ(t) by adaptive trapezoidal quadrature.

    The quadrature spans the filter's frequency range and halves its spacing
    until the result changes by less than rtol.

    Args:
        noise_spectrum: S(ω) for an array of ω in rad/s.
        filter_fn: Filter function whose sensitivity function is stretched to
            length t.
        t: Evolution time, in seconds.
        rtol: Relative tolerance.

    Raises:
        GridCoverageError: S hasn't decayed at the edges of the grid.
    """
    lower = float(filter_fn.omega_grid[0])
    upper = float(filter_fn.omega_grid[-1])
    omega = np.linspace(lower, upper, _INITIAL_POINTS)
    spectrum = np.asarray(noise_spectrum(omega), dtype=float)
    _check_coverage(spectrum, lower_is_open=lower > 0)

    def integrand(omega, spectrum):
        weight = np.square(np.abs(filter_fn.transform(omega, t))) / 2
        return spectrum * weight / math.pi

    values = integrand(omega, spectrum)
    result = scipy.integrate.trapezoid(values, omega)
    for refinement in range(_MAX_REFINEMENTS):
        middle = 0.5 * (omega[:-1] + omega[1:])
        middle_values = integrand(
            middle, np.asarray(noise_spectrum(middle), dtype=float))
        merged_omega = np.empty(2 * len(omega) - 1)
        merged_omega[0::2] = omega
        merged_omega[1::2] = middle
        merged_values = np.empty_like(merged_omega)
        merged_values[0::2] = values
        merged_values[1::2] = middle_values
        omega, values = merged_omega, merged_values
        previous, result = result, scipy.integrate.trapezoid(values, omega)
        if (refinement + 1 >= _MIN_REFINEMENTS and
                abs(result - previous) <= rtol * abs(result)):
            return float(result)
    logging.warning('Coherence integral did not reach rtol=%r with %d points.',
                    rtol, len(omega))
    return float(result)
