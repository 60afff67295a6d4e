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
"""Two-level spin states and their observables.

States live in the ordered basis (|0⟩, |−⟩). The Bloch vector convention is
x = 2 Re(a0* am), y = 2 Im(a0* am), z = |a0|² − |am|², so |0⟩ points along +z
and the equal superposition along +x.
"""

import dataclasses
import enum
import math
from typing import Tuple, Union

import numpy as np

# Tolerance for treating a state as normalized.
NORM_TOLERANCE = 1e-12

ArrayOrFloat = Union[float, np.ndarray]

# Decay times of the contrast in spin-locking and DYSCO measurements.
T1_RHO = 3.2e-3
T_DYSCO = 2.55e-3


@dataclasses.dataclass(frozen=True)
class SpinState:
    """State of the spin within the {|0⟩, |−⟩} subspace.

    Attributes:
        amp0: Complex amplitude of |0⟩.
        ampm: Complex amplitude of |−⟩.
    """
    amp0: complex
    ampm: complex

    @property
    def norm(self) -> float:
        return math.hypot(abs(self.amp0), abs(self.ampm))

    def normalized(self) -> 'SpinState':
        """Returns the state rescaled to unit norm."""
        norm = self.norm
        return SpinState(self.amp0 / norm, self.ampm / norm)


GROUND = SpinState(1 + 0j, 0j)
SUPERPOSITION = SpinState(complex(1 / math.sqrt(2)), complex(1 / math.sqrt(2)))


class InitialState(enum.Enum):
    """Named states a run can be prepared in.

    Attributes:
        GROUND: |0⟩, the optically pumped state.
        SUPERPOSITION: (|0⟩ + |−⟩)/√2.
    """
    GROUND = 'ground'
    SUPERPOSITION = 'superposition'

    @property
    def state(self) -> SpinState:
        if self is InitialState.GROUND:
            return GROUND
        return SUPERPOSITION


def p0(state: SpinState) -> float:
    """Returns the occupancy of |0⟩."""
    return min(1.0, max(0.0, abs(state.amp0)**2))


def bloch(state: SpinState) -> Tuple[float, float, float]:
    """Returns the Bloch vector (x, y, z) of a normalized state."""
    overlap = state.amp0.conjugate() * state.ampm
    return (
        2 * overlap.real,
        2 * overlap.imag,
        abs(state.amp0)**2 - abs(state.ampm)**2,
    )


def bloch_array(amp0: np.ndarray, ampm: np.ndarray) -> np.ndarray:
    """Vectorized bloch(), returning an array of shape amp0.shape + (3,)."""
    overlap = np.conj(amp0) * ampm
    return np.stack(
        (2 * overlap.real, 2 * overlap.imag,
         np.abs(amp0)**2 - np.abs(ampm)**2),
        axis=-1,
    )


def apply_contrast_envelope(
        p0_ideal: ArrayOrFloat,
        t: ArrayOrFloat,
        *,
        tau: float,
        exponent: float,
) -> ArrayOrFloat:
    """Relaxes a population toward 1/2 with a stretched exponential.

    Args:
        p0_ideal: Population of |0⟩ without decoherence.
        t: Interrogation time, in seconds.
        tau: Decay time, in seconds.
        exponent: Stretching exponent.

    Returns:
        1/2 + (p0_ideal − 1/2)·exp(−(t/tau)^exponent).
    """
    if tau <= 0:
        raise ValueError(f'tau must be positive, got {tau!r}')
    if exponent <= 0:
        raise ValueError(f'exponent must be positive, got {exponent!r}')
    decay = np.exp(-np.power(np.divide(t, tau), exponent))
    result = 0.5 + (np.subtract(p0_ideal, 0.5)) * decay
    if np.ndim(result) == 0:
        return float(result)
    return result


@dataclasses.dataclass(frozen=True)
class Envelope:
    """Stretched-exponential loss of contrast.

    Attributes:
        tau: Decay time, in seconds.
        exponent: Stretching exponent.
    """
    tau: float = T_DYSCO
    exponent: float = 1.0

    def __post_init__(self) -> None:
        if not self.tau > 0:
            raise ValueError(f'tau must be positive, got {self.tau!r}')
        if not self.exponent > 0:
            raise ValueError(
                f'exponent must be positive, got {self.exponent!r}')

    def apply(self, p0_ideal: ArrayOrFloat, t: ArrayOrFloat) -> ArrayOrFloat:
        return apply_contrast_envelope(p0_ideal,
                                       t,
                                       tau=self.tau,
                                       exponent=self.exponent)
