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
"""Response spectra of population series and sensitivity extraction."""

import dataclasses
import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np
import scipy.signal

from dysco_sim import errors

DEFAULT_WINDOW = 'hann'
DEFAULT_PADDING = 8
# Peaks below this multiple of the median bin magnitude aren't components.
DETECTION_FACTOR = 5.0
# Rows whose population varies less than this have no sensitivity.
MIN_CONTRAST = 0.05
MIN_SAMPLES = 16

_UNIFORMITY_TOLERANCE = 1e-6


@dataclasses.dataclass(frozen=True, eq=False)
class Spectrum:
    """Magnitude spectrum over the variable conjugate to the sample axis.

    Magnitudes are scaled so that a sinusoid of amplitude A peaks at about A.

    Attributes:
        coordinates: Conjugate coordinate ζ of every bin, strictly increasing.
        magnitudes: Magnitude of every bin.
        spacing: Sample spacing of the transformed series.
        window: Name of the taper applied before the transform.
        padding: Zero-padding factor.
    """
    coordinates: np.ndarray
    magnitudes: np.ndarray
    spacing: float = 1.0
    window: str = DEFAULT_WINDOW
    padding: int = DEFAULT_PADDING

    def __post_init__(self) -> None:
        if self.coordinates.shape != self.magnitudes.shape:
            raise errors.InvalidArgumentError(
                'Coordinates and magnitudes must have the same shape.')
        if np.any(np.diff(self.coordinates) <= 0):
            raise errors.InvalidArgumentError(
                'Coordinates must be strictly increasing.')


@dataclasses.dataclass(frozen=True)
class Component:
    """Dominant component of a spectrum.

    Attributes:
        coordinate: Interpolated position ζ* of the peak.
        magnitude: Interpolated height of the peak.
    """
    coordinate: float
    magnitude: float


def sample_spacing(coordinates: Sequence[float]) -> float:
    """Returns the spacing of a uniform, increasing grid.

    Raises:
        SamplingError: The grid is not uniform and increasing.
    """
    coordinates = np.asarray(coordinates, dtype=float)
    steps = np.diff(coordinates)
    if not len(steps):
        raise errors.SamplingError('A grid needs at least two points.')
    spacing = (coordinates[-1] - coordinates[0]) / len(steps)
    if not spacing > 0 or np.max(np.abs(steps - spacing)) > (
            _UNIFORMITY_TOLERANCE * spacing):
        raise errors.SamplingError(
            'Samples must be uniformly spaced along an increasing axis.')
    return float(spacing)


def response_spectrum(
        values: Sequence[float],
        coordinates: Sequence[float],
        *,
        window: str = DEFAULT_WINDOW,
        padding: int = DEFAULT_PADDING,
) -> Spectrum:
    """Returns the magnitude spectrum of a uniformly sampled response.

    The series is mean-subtracted, tapered and zero-padded before the
    transform.

    Args:
        values: Response, e.g. P0 at every B_RF.
        coordinates: Uniformly spaced sample positions, e.g. B_RF in tesla.
        window: Any window name scipy.signal.get_window accepts.
        padding: Transform length as a multiple of the series length.

    Raises:
        SamplingError: Fewer than MIN_SAMPLES samples, or non-uniform
            coordinates.
    """
    values = np.asarray(values, dtype=float)
    if len(values) < MIN_SAMPLES:
        raise errors.SamplingError(
            f'At least {MIN_SAMPLES} samples are needed, got {len(values)}.')
    if len(coordinates) != len(values):
        raise errors.SamplingError(
            'Every sample needs exactly one coordinate.')
    if padding < 1:
        raise errors.InvalidArgumentError(
            f'padding must be at least 1, got {padding!r}')
    spacing = sample_spacing(coordinates)
    taper = scipy.signal.get_window(window, len(values), fftbins=False)
    length = padding * len(values)
    transform = np.fft.rfft((values - np.mean(values)) * taper, n=length)
    return Spectrum(
        coordinates=np.fft.rfftfreq(length, d=spacing),
        magnitudes=2 * np.abs(transform) / np.sum(taper),
        spacing=spacing,
        window=window,
        padding=padding,
    )


def parabolic_peak(values: np.ndarray, index: int) -> Tuple[float, float]:
    """Returns (position, height) of the parabola through three samples.

    Args:
        values: Regularly sampled values.
        index: Index of a local maximum with a neighbor on each side.
    """
    left, center, right = values[index - 1:index + 2]
    curvature = left - 2 * center + right
    if curvature == 0:
        return float(index), float(center)
    offset = 0.5 * (left - right) / curvature
    return index + offset, center - 0.25 * (left - right) * offset


@errors.handle_error_policy
def dominant_component(
        spectrum: Spectrum,
        *,
        detection_factor: float = DETECTION_FACTOR,
        error_policy: errors.ErrorPolicy = errors.ErrorPolicy.DEFAULT,
) -> Component:
    """Returns the strongest non-DC component of a spectrum.

    Args:
        spectrum: Spectrum to search.
        detection_factor: Peaks must exceed this multiple of the median bin
            magnitude.
        error_policy: See ErrorPolicy.

    Raises:
        NoComponentError: The spectrum is degenerate, or its peak is below the
            detection threshold.
    """
    del error_policy  # Handled by the decorator.
    magnitudes = spectrum.magnitudes
    if len(magnitudes) < 3:
        raise errors.NoComponentError(
            f'Spectrum has only {len(magnitudes)} bins.')
    index = 1 + int(np.argmax(magnitudes[1:]))
    threshold = detection_factor * float(np.median(magnitudes[1:]))
    if not magnitudes[index] > threshold:
        raise errors.NoComponentError(
            f'Peak magnitude {magnitudes[index]!r} does not exceed the '
            f'detection threshold {threshold!r}.')
    if index == len(magnitudes) - 1:
        position, height = float(index), float(magnitudes[index])
    else:
        position, height = parabolic_peak(magnitudes, index)
    step = spectrum.coordinates[1] - spectrum.coordinates[0]
    return Component(
        coordinate=float(spectrum.coordinates[0] + position * step),
        magnitude=float(height),
    )


@errors.handle_error_policy
def _row_frequency(
        row: np.ndarray,
        fields: Sequence[float],
        *,
        error_policy: errors.ErrorPolicy = errors.ErrorPolicy.DEFAULT,
) -> float:
    del error_policy  # Handled by the decorator.
    contrast = float(np.ptp(row))
    if contrast < MIN_CONTRAST:
        raise errors.NoComponentError(
            f'Response contrast {contrast!r} is below {MIN_CONTRAST!r}.')
    return dominant_component(response_spectrum(row, fields),
                              error_policy=errors.ErrorPolicy.RAISE).coordinate


@dataclasses.dataclass(frozen=True, eq=False)
class SensitivityCurve:
    """Normalized dynamical sensitivity per unit phase.

    Attributes:
        phis: Unit phases φ, in rad.
        betas: β(φ), normalized to a maximum of 1. Rows without a dominant
            component have β = 0.
        frequencies: Unnormalized dominant ζ per row, in 1/T.
        scale: Fitted amplitude a of β(φ) ≈ a·|sin φ|.
        residuals: β(φ) − a·|sin φ|.
        r_squared: Coefficient of determination of the fit.
    """
    phis: np.ndarray
    betas: np.ndarray
    frequencies: np.ndarray
    scale: float
    residuals: np.ndarray
    r_squared: float


def sensitivity_curve(
        p0_map: np.ndarray,
        phis: Sequence[float],
        fields: Sequence[float],
        *,
        error_policy: errors.ErrorPolicy = errors.ErrorPolicy.DEFAULT,
) -> SensitivityCurve:
    """Extracts β(φ) from a map of P0 over unit phase and field.

    Args:
        p0_map: P0 with one row per φ and one column per field.
        phis: Unit phase of every row, in rad.
        fields: Uniformly spaced field of every column, in tesla.
        error_policy: What to do with rows without a dominant component.
            With the default policy they get β = 0.

    Raises:
        NoComponentError: No row has a dominant component.
    """
    p0_map = np.asarray(p0_map, dtype=float)
    phis = np.asarray(phis, dtype=float)
    if p0_map.shape != (len(phis), len(fields)):
        raise errors.InvalidArgumentError(
            f'Map of shape {p0_map.shape} does not match {len(phis)} phases '
            f'and {len(fields)} fields.')
    frequencies = []
    for phi, row in zip(phis, p0_map):
        frequency = _row_frequency(row, fields, error_policy=error_policy)
        if frequency is None:
            logging.debug('No sensitivity at phi=%r.', phi)
            frequency = 0.0
        frequencies.append(frequency)
    frequencies = np.array(frequencies)
    peak = np.max(frequencies)
    if not peak > 0:
        raise errors.NoComponentError('No row has a dominant component.')
    betas = frequencies / peak
    model = np.abs(np.sin(phis))
    scale = float(np.dot(betas, model) / np.dot(model, model))
    residuals = betas - scale * model
    total = np.sum(np.square(betas - np.mean(betas)))
    r_squared = (1 - float(np.sum(np.square(residuals)) / total)
                 if total > 0 else math.nan)
    return SensitivityCurve(
        phis=phis,
        betas=betas,
        frequencies=frequencies,
        scale=scale,
        residuals=residuals,
        r_squared=r_squared,
    )


def unwrap_rotation_angle(p0_series: Sequence[float]) -> np.ndarray:
    """Recovers the accumulated rotation angle Θ from P0 = cos²(Θ/2).

    The series must start at Θ = 0 and sample Θ densely enough that it moves
    by less than π/2 between samples; each sample is then assigned the fold of
    arccos closest to a linear extrapolation of the previous two.

    Args:
        p0_series: Ideal (contrast 1) populations along a monotone ramp.

    Returns:
        Θ at every sample, in rad.
    """
    principal = 2 * np.arccos(np.sqrt(np.clip(p0_series, 0, 1)))
    angles = np.empty_like(principal)
    fold = 0
    for index, value in enumerate(principal):
        if index == 0:
            angles[0] = value
            continue
        previous = angles[index - 1]
        prediction = previous + (previous - angles[index - 2]
                                 if index > 1 else 0.0)
        candidates = [
            (abs(_unfold(value, k) - prediction), k)
            for k in (fold - 1, fold, fold + 1)
            if k >= 0
        ]
        fold = min(candidates)[1]
        angles[index] = _unfold(value, fold)
    return angles


def _unfold(principal: float, fold: int) -> float:
    """Maps the principal angle in [0, π] on fold k to the unwrapped angle."""
    if fold % 2:
        return (fold + 1) * math.pi - principal
    return fold * math.pi + principal
