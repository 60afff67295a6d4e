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
"""Declarative descriptions of the external RF field B_RF(t)."""

import dataclasses
import enum
import math
from typing import Optional, Tuple, Union

import numpy as np

from dysco_sim import errors

# Gyromagnetic ratios, in Hz/T.
GAMMA_C13 = 10.705e6

ArrayOrFloat = Union[float, np.ndarray]

# Random streams of a shot.
_TONE_STREAM = 0
_BATH_STREAM = 1
_COUPLED_STREAM = 2


def larmor_frequency(gyromagnetic_ratio: float, b0: float) -> float:
    """Returns the Larmor frequency in Hz for a ratio in Hz/T and b0 in T."""
    return gyromagnetic_ratio * b0


@dataclasses.dataclass(frozen=True)
class Tone:
    """Monochromatic field a·cos(2πft + θ).

    Attributes:
        amplitude: Amplitude a, in tesla.
        frequency: Frequency f, in Hz.
        phase: Phase θ, in rad.
    """
    amplitude: float
    frequency: float
    phase: float = 0.0

    def __post_init__(self) -> None:
        if not self.amplitude >= 0:
            raise errors.InvalidArgumentError(
                f'amplitude must be non-negative, got {self.amplitude!r}')
        if not self.frequency >= 0:
            raise errors.InvalidArgumentError(
                f'frequency must be non-negative, got {self.frequency!r}')


@dataclasses.dataclass(frozen=True)
class CoupledSpin:
    """A pair of resolved lines at larmor_center ± offset/2.

    Attributes:
        offset: Splitting of the pair, in Hz.
        amplitude: Amplitude of each line, in tesla.
    """
    offset: float
    amplitude: float


@dataclasses.dataclass(frozen=True)
class BathSurrogate:
    """Classical stand-in for a nuclear spin bath.

    The bath is a sum of n_oscillators random-phase oscillators whose
    frequencies are drawn per shot from Normal(larmor_center, larmor_spread).
    Each has amplitude rms_amplitude·√(2/n_oscillators), so the total field has
    the given RMS.

    Attributes:
        larmor_center: Mean Larmor frequency, in Hz.
        larmor_spread: Standard deviation of the Larmor frequency, in Hz.
        n_oscillators: Number of oscillators.
        rms_amplitude: RMS field of the bath, in tesla.
        coupled_spins: Extra resolved line pairs.
    """
    larmor_center: float
    larmor_spread: float = 10e3
    n_oscillators: int = 32
    rms_amplitude: float = 0.0
    coupled_spins: Tuple[CoupledSpin, ...] = ()

    def __post_init__(self) -> None:
        if self.n_oscillators < 1:
            raise errors.InvalidArgumentError(
                f'n_oscillators must be at least 1, got {self.n_oscillators!r}'
            )
        if not self.rms_amplitude >= 0:
            raise errors.InvalidArgumentError(
                f'rms_amplitude must be non-negative, got '
                f'{self.rms_amplitude!r}')
        if not self.larmor_spread >= 0:
            raise errors.InvalidArgumentError(
                f'larmor_spread must be non-negative, got '
                f'{self.larmor_spread!r}')

    @property
    def oscillator_amplitude(self) -> float:
        return self.rms_amplitude * math.sqrt(2 / self.n_oscillators)

    @property
    def coupled_frequencies(self) -> np.ndarray:
        return np.array([
            self.larmor_center + sign * spin.offset / 2
            for spin in self.coupled_spins
            for sign in (-1, 1)
        ])

    @property
    def coupled_amplitudes(self) -> np.ndarray:
        return np.array([
            spin.amplitude for spin in self.coupled_spins for _ in range(2)
        ])


class ShotPhaseMode(enum.Enum):
    """How tone phases behave across shots.

    Attributes:
        FIXED: Phase-synchronized to the sequence start.
        RANDOM_PER_SHOT: Each shot adds an independent uniform phase.
    """
    FIXED = 'fixed'
    RANDOM_PER_SHOT = 'random-per-shot'


@dataclasses.dataclass(frozen=True)
class Waveform:
    """B_RF(t) as a sum of tones plus an optional bath.

    Attributes:
        tones: Tone components.
        bath: Bath surrogate, if any.
        shot_phase_mode: Whether tones are synchronous or asynchronous.
    """
    tones: Tuple[Tone, ...] = ()
    bath: Optional[BathSurrogate] = None
    shot_phase_mode: ShotPhaseMode = ShotPhaseMode.FIXED

    @property
    def is_deterministic(self) -> bool:
        """Whether every shot sees the same field."""
        return (self.bath is None or
                (self.bath.rms_amplitude == 0 and not self.bath.coupled_spins)
               ) and (self.shot_phase_mode is ShotPhaseMode.FIXED or
                      not self.tones)


ZERO = Waveform()


@dataclasses.dataclass(frozen=True)
class ShotContext:
    """Random draws of one shot.

    Attributes:
        tone_phases: Extra phase θ_shot of every tone, in rad.
        bath_frequencies: Frequency of every bath oscillator, in Hz.
        bath_phases: Phase of every bath oscillator, in rad.
        coupled_phases: Phase of every coupled-spin line, in rad.
    """
    tone_phases: Tuple[float, ...] = ()
    bath_frequencies: Tuple[float, ...] = ()
    bath_phases: Tuple[float, ...] = ()
    coupled_phases: Tuple[float, ...] = ()


def shot_rng(seed: int,
             shot_index: int,
             stream: int = 0) -> np.random.Generator:
    """Returns a generator derived from (seed, shot_index, stream).

    Separate streams keep the draws of one component independent of how many
    draws the others take.
    """
    return np.random.default_rng(
        np.random.SeedSequence(entropy=seed, spawn_key=(shot_index, stream)))


def draw_shot(waveform: Waveform, seed: int, shot_index: int) -> ShotContext:
    """Draws the random parameters of a shot.

    Args:
        waveform: Waveform to draw for.
        seed: Base seed of the run.
        shot_index: Index of the shot within the run.
    """
    tone_count = len(waveform.tones)
    if waveform.shot_phase_mode is ShotPhaseMode.RANDOM_PER_SHOT:
        tone_phases = shot_rng(seed, shot_index, _TONE_STREAM).uniform(
            0, 2 * math.pi, tone_count)
    else:
        tone_phases = np.zeros(tone_count)
    bath = waveform.bath
    if bath is None:
        return ShotContext(tone_phases=tuple(tone_phases))
    rng = shot_rng(seed, shot_index, _BATH_STREAM)
    bath_frequencies = rng.normal(bath.larmor_center, bath.larmor_spread,
                                  bath.n_oscillators)
    bath_phases = rng.uniform(0, 2 * math.pi, bath.n_oscillators)
    coupled_phases = shot_rng(seed, shot_index, _COUPLED_STREAM).uniform(
        0, 2 * math.pi, 2 * len(bath.coupled_spins))
    return ShotContext(
        tone_phases=tuple(tone_phases),
        bath_frequencies=tuple(bath_frequencies),
        bath_phases=tuple(bath_phases),
        coupled_phases=tuple(coupled_phases),
    )


def _oscillators(t: np.ndarray, amplitudes: np.ndarray,
                 frequencies: np.ndarray, phases: np.ndarray) -> np.ndarray:
    if not len(amplitudes):
        return np.zeros_like(t)
    arguments = (2 * math.pi * np.multiply.outer(t, frequencies) + phases)
    return np.cos(arguments) @ amplitudes


def sample(waveform: Waveform,
           t: ArrayOrFloat,
           shot: Optional[ShotContext] = None) -> ArrayOrFloat:
    """Evaluates B_RF at time(s) t, in tesla.

    Args:
        waveform: What to evaluate.
        t: Time or array of times since the sequence start, in seconds.
        shot: Random draws of the shot; required unless the waveform is
            deterministic.
    """
    if shot is None:
        if not waveform.is_deterministic:
            raise ValueError('A non-deterministic waveform needs a shot.')
        shot = ShotContext(tone_phases=(0.0,) * len(waveform.tones))
    t_array = np.asarray(t, dtype=float)
    field = _oscillators(
        t_array,
        np.array([tone.amplitude for tone in waveform.tones]),
        np.array([tone.frequency for tone in waveform.tones]),
        np.array([tone.phase for tone in waveform.tones]) +
        np.array(shot.tone_phases),
    )
    bath = waveform.bath
    if bath is not None and shot.bath_frequencies:
        field = field + _oscillators(
            t_array,
            np.full(bath.n_oscillators, bath.oscillator_amplitude),
            np.array(shot.bath_frequencies),
            np.array(shot.bath_phases),
        )
    if bath is not None and bath.coupled_spins:
        field = field + _oscillators(
            t_array,
            bath.coupled_amplitudes,
            bath.coupled_frequencies,
            np.array(shot.coupled_phases),
        )
    if np.ndim(field) == 0:
        return float(field)
    return field


def multiplex(first: Waveform, second: Waveform) -> Waveform:
    """Returns the waveform whose field is the sum of two waveforms.

    Raises:
        InvalidArgumentError: Both waveforms have a bath, or the tones of both
            use different shot phase modes.
    """
    if first.bath is not None and second.bath is not None:
        raise errors.InvalidArgumentError('Only one bath can be multiplexed.')
    if (first.tones and second.tones and
            first.shot_phase_mode is not second.shot_phase_mode):
        raise errors.InvalidArgumentError(
            'Tones with different shot phase modes cannot be multiplexed.')
    mode = (first.shot_phase_mode if first.tones else second.shot_phase_mode)
    return Waveform(
        tones=first.tones + second.tones,
        bath=first.bath if first.bath is not None else second.bath,
        shot_phase_mode=mode,
    )


def matched_tone(total_time: float, amplitude: float) -> Tone:
    """Returns the tone a fixed-phase DYSCO sequence is most sensitive to.

    A fixed-phase sequence senses the part of B_RF that is antisymmetric about
    its middle. The half-period cosine B·cos(π t/t_N) has its zero crossing on
    the middle π_y and keeps one sign in each half.

    Args:
        total_time: Sequence length t_N, in seconds.
        amplitude: Tone amplitude, in tesla.
    """
    return Tone(amplitude=amplitude, frequency=1 / (2 * total_time), phase=0.0)
