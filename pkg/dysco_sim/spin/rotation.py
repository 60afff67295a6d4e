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
"""Closed-form SU(2) rotations for piecewise-constant Hamiltonians.

A Hamiltonian H = −(1/2)(hx·σx + hy·σy + hz·σz) held for a time dt generates
U = exp(+i(dt/2) h·σ) = cos ψ·I + i sin ψ·n·σ with ψ = |h|·dt/2 and n = h/|h|.
Every such U is stored in Cayley-Klein form U = [[a, b], [−b*, a*]] with

    a = cos ψ + i sin ψ·nz,    b = sin ψ·(ny + i nx).
"""

import dataclasses
import math
from typing import Tuple

import numpy as np

from dysco_sim import errors

# Gyromagnetic ratio of the NV electron spin, in rad/s/T.
GAMMA_NV = -2 * math.pi * 28e9


@dataclasses.dataclass(frozen=True)
class EffectiveField:
    """Angular-frequency vector of a constant two-level Hamiltonian.

    Attributes:
        hx: x component, in rad/s.
        hy: y component, in rad/s.
        hz: z component, in rad/s.
    """
    hx: float
    hy: float
    hz: float

    def __post_init__(self) -> None:
        if not all(map(math.isfinite, (self.hx, self.hy, self.hz))):
            raise errors.InvalidArgumentError(f'Non-finite field: {self!r}')

    @property
    def magnitude(self) -> float:
        return math.sqrt(self.hx**2 + self.hy**2 + self.hz**2)


@dataclasses.dataclass(frozen=True)
class Unitary2:
    """2×2 unitary in Cayley-Klein form [[a, b], [−b*, a*]].

    Attributes:
        a: Diagonal parameter.
        b: Off-diagonal parameter.
    """
    a: complex
    b: complex

    @property
    def matrix(self) -> np.ndarray:
        return np.array(
            ((self.a, self.b), (-self.b.conjugate(), self.a.conjugate())),
            dtype=complex,
        )

    @property
    def determinant(self) -> float:
        return abs(self.a)**2 + abs(self.b)**2

    def __matmul__(self, earlier: 'Unitary2') -> 'Unitary2':
        """Returns self·earlier, i.e. earlier applied first."""
        a, b = compose(self.a, self.b, earlier.a, earlier.b)
        return Unitary2(complex(a), complex(b))

    def inverse(self) -> 'Unitary2':
        return Unitary2(self.a.conjugate(), -self.b)

    def apply(self, amp0: complex, ampm: complex) -> Tuple[complex, complex]:
        return (
            self.a * amp0 + self.b * ampm,
            -self.b.conjugate() * amp0 + self.a.conjugate() * ampm,
        )


IDENTITY = Unitary2(1 + 0j, 0j)


def effective_field(
        rabi: float,
        detuning: float,
        phase: float,
        b_rf: float,
        gamma_nv: float = GAMMA_NV,
) -> EffectiveField:
    """Returns the field of the drive Hamiltonian after the RWA.

    The |+⟩ level is discarded; the z component is the coefficient of |−⟩⟨−|
    projected onto the {|0⟩, |−⟩} subspace.

    Args:
        rabi: Rabi rate Ω₋, in rad/s.
        detuning: Drive detuning δ₋, in rad/s.
        phase: Drive phase θ, in rad.
        b_rf: Axial RF field, in tesla.
        gamma_nv: Gyromagnetic ratio, in rad/s/T.
    """
    if rabi < 0:
        raise errors.InvalidArgumentError(
            f'rabi must be non-negative, got {rabi!r}')
    return EffectiveField(
        hx=rabi * math.cos(phase),
        hy=-rabi * math.sin(phase),
        hz=-detuning + gamma_nv * b_rf,
    )


def cayley_klein(
        hx: np.ndarray,
        hy: np.ndarray,
        hz: np.ndarray,
        dt: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray]:
    """Vectorized rotation parameters (a, b) for broadcastable inputs."""
    magnitude = np.sqrt(np.square(hx) + np.square(hy) + np.square(hz))
    psi = 0.5 * magnitude * dt
    # sin(ψ)/|h| without dividing by zero for a vanishing field.
    sin_over_magnitude = 0.5 * dt * np.sinc(psi / np.pi)
    a = np.cos(psi) + 1j * sin_over_magnitude * hz
    b = sin_over_magnitude * (hy + 1j * hx)
    return a, b


def compose(
        late_a: np.ndarray,
        late_b: np.ndarray,
        early_a: np.ndarray,
        early_b: np.ndarray,
) -> Tuple[np.ndarray, np.ndarray]:
    """Returns (a, b) of U_late·U_early."""
    return (
        late_a * early_a - late_b * np.conj(early_b),
        late_a * early_b + late_b * np.conj(early_a),
    )


def reduce_product(a: np.ndarray,
                   b: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Multiplies time-ordered rotations along the last axis.

    The product is formed as a balanced tree, which keeps rounding error
    growing with log2 of the number of steps.

    Args:
        a: Rotation parameters, earliest first along the last axis.
        b: Rotation parameters, same shape as a.

    Returns:
        (a, b) of the full product, with the last axis removed.
    """
    if a.shape[-1] == 0:
        return np.ones(a.shape[:-1], complex), np.zeros(a.shape[:-1], complex)
    while a.shape[-1] > 1:
        if a.shape[-1] % 2:
            pad = [(0, 0)] * (a.ndim - 1) + [(0, 1)]
            a = np.pad(a, pad, constant_values=1)
            b = np.pad(b, pad, constant_values=0)
        a, b = compose(a[..., 1::2], b[..., 1::2], a[..., 0::2], b[..., 0::2])
    return a[..., 0], b[..., 0]


def rotation(field: EffectiveField, duration: float) -> Unitary2:
    """Returns exp(+i(duration/2)·h·σ) for a constant field.

    Args:
        field: The constant effective field.
        duration: How long the field is applied, in seconds.
    """
    if duration < 0:
        raise errors.InvalidArgumentError(
            f'duration must be non-negative, got {duration!r}')
    a, b = cayley_klein(
        np.float64(field.hx),
        np.float64(field.hy),
        np.float64(field.hz),
        np.float64(duration),
    )
    return Unitary2(complex(a), complex(b))
