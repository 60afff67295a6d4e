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
"""Tests for dysco_sim.spin.state."""

import math
import unittest

import numpy as np

from dysco_sim.spin import state


class StateTest(unittest.TestCase):

    def test_ground_state(self):
        self.assertEqual(1.0, state.p0(state.GROUND))
        self.assertEqual((0.0, 0.0, 1.0), state.bloch(state.GROUND))

    def test_equal_superposition(self):
        superposition = state.SpinState(1 / math.sqrt(2), 1 / math.sqrt(2))
        self.assertAlmostEqual(0.5, state.p0(superposition), delta=1e-15)
        np.testing.assert_allclose((1, 0, 0),
                                   state.bloch(superposition),
                                   atol=1e-15)

    def test_excited_state(self):
        excited = state.SpinState(0j, 1 + 0j)
        self.assertEqual(0.0, state.p0(excited))
        self.assertEqual((0.0, 0.0, -1.0), state.bloch(excited))

    def test_bloch_vector_has_unit_norm(self):
        rng = np.random.default_rng(7)
        for amplitudes in rng.normal(size=(100, 4)):
            random_state = state.SpinState(
                complex(amplitudes[0], amplitudes[1]),
                complex(amplitudes[2], amplitudes[3])).normalized()
            self.assertAlmostEqual(1.0,
                                   np.linalg.norm(state.bloch(random_state)),
                                   delta=1e-12)

    def test_bloch_array_matches_bloch(self):
        random_state = state.SpinState(0.6 + 0.0j, 0.48 + 0.64j)
        np.testing.assert_allclose(
            state.bloch(random_state),
            state.bloch_array(np.array([random_state.amp0]),
                              np.array([random_state.ampm]))[0],
        )

    def test_initial_state_names(self):
        self.assertEqual(state.GROUND, state.InitialState('ground').state)
        self.assertAlmostEqual(
            0.5, state.p0(state.InitialState('superposition').state))


class ContrastEnvelopeTest(unittest.TestCase):

    def test_no_decay_at_time_zero(self):
        self.assertEqual(
            1.0, state.apply_contrast_envelope(1.0, 0.0, tau=1e-3,
                                               exponent=2))

    def test_full_decay_at_infinity(self):
        self.assertEqual(
            0.5,
            state.apply_contrast_envelope(1.0, math.inf, tau=1e-3,
                                          exponent=1))

    def test_one_decay_time(self):
        self.assertAlmostEqual(
            0.5 + 0.3 * math.exp(-1),
            state.apply_contrast_envelope(0.8, 2e-3, tau=2e-3, exponent=1),
        )
        self.assertAlmostEqual(
            0.6104,
            state.apply_contrast_envelope(0.8, 2e-3, tau=2e-3, exponent=1),
            places=4)

    def test_arrays(self):
        np.testing.assert_allclose(
            (1.0, 0.5 + 0.5 * math.exp(-1)),
            state.apply_contrast_envelope(np.array((1.0, 1.0)),
                                          np.array((0.0, 3.2e-3)),
                                          tau=3.2e-3,
                                          exponent=1),
        )

    def test_rejects_bad_parameters(self):
        with self.assertRaisesRegex(ValueError, 'tau'):
            state.apply_contrast_envelope(1.0, 1.0, tau=0, exponent=1)
        with self.assertRaisesRegex(ValueError, 'exponent'):
            state.apply_contrast_envelope(1.0, 1.0, tau=1, exponent=0)

    def test_envelope_defaults_to_dysco_decay(self):
        envelope = state.Envelope()
        self.assertEqual(state.T_DYSCO, envelope.tau)
        self.assertAlmostEqual(0.5 + 0.5 * math.exp(-1),
                               envelope.apply(1.0, state.T_DYSCO))

    def test_spin_locking_decays_slower(self):
        self.assertGreater(
            state.Envelope(tau=state.T1_RHO).apply(1.0, 1e-3),
            state.Envelope(tau=state.T_DYSCO).apply(1.0, 1e-3))

    def test_envelope_rejects_bad_parameters(self):
        with self.assertRaisesRegex(ValueError, 'tau'):
            state.Envelope(tau=-1.0)
        with self.assertRaisesRegex(ValueError, 'exponent'):
            state.Envelope(exponent=0.0)


if __name__ == '__main__':
    unittest.main()
