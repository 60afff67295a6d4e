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
"""Utilities for testing spin propagation."""

import math
import unittest

import numpy as np

from dysco_sim.spin import state as state_lib

_PAULI = np.array((
    ((0, 1), (1, 0)),
    ((0, -1j), (1j, 0)),
    ((1, 0), (0, -1)),
),
                  dtype=complex)


def integrate_schrodinger(
        fields: np.ndarray,
        durations: np.ndarray,
        initial: np.ndarray,
        *,
        step_fraction: float = 1e-4,
) -> np.ndarray:
    """Integrates dψ/dt = (i/2)(h·σ)ψ with fixed-step RK4.

    Args:
        fields: Constant fields (hx, hy, hz) of every draw, shape (n, 3), in
            rad/s.
        durations: Duration of every draw, shape (n,), in seconds.
        initial: Initial states, shape (n, 2).
        step_fraction: Step size as a fraction of the period 2π/|h| of the
            strongest field.

    Returns:
        Final states, shape (n, 2).
    """
    generators = 0.5j * np.einsum('nk,kij->nij', fields, _PAULI)
    strongest = max(np.max(np.linalg.norm(fields, axis=1)), 1e-300)
    longest = np.max(durations)
    steps = max(1, math.ceil(longest / (step_fraction * 2 * math.pi /
                                        strongest)))
    dt = (durations / steps)[:, np.newaxis]
    psi = np.array(initial, dtype=complex)

    def derivative(value):
        return np.einsum('nij,nj->ni', generators, value)

    for _ in range(steps):
        k1 = derivative(psi)
        k2 = derivative(psi + 0.5 * dt * k1)
        k3 = derivative(psi + 0.5 * dt * k2)
        k4 = derivative(psi + dt * k3)
        psi = psi + dt / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return psi


def fidelity(first: np.ndarray, second: np.ndarray) -> np.ndarray:
    """Returns |⟨first|second⟩|² along the last axis."""
    return np.abs(np.sum(np.conj(first) * second, axis=-1))**2


class TestCase(unittest.TestCase):
    """Base class with spin state assertions."""

    def assert_p0(self, state: state_lib.SpinState, expected: float,
                  delta: float) -> None:
        self.assertAlmostEqual(expected, state_lib.p0(state), delta=delta)

    def assert_normalized(self,
                          state: state_lib.SpinState,
                          delta: float = 1e-12) -> None:
        self.assertAlmostEqual(1.0, state.norm, delta=delta)
