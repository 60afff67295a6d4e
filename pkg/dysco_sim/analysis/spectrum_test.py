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
"""Tests for dysco_sim.analysis.spectrum."""

import math
import unittest

import numpy as np

from dysco_sim import errors
from dysco_sim.analysis import spectrum

_FIELDS = np.arange(256) / 256


def _cosine(frequency):
    return 0.5 + 0.5 * np.cos(2 * math.pi * frequency * _FIELDS)


class ResponseSpectrumTest(unittest.TestCase):

    def test_coordinates(self):
        result = spectrum.response_spectrum(_cosine(20), _FIELDS)
        self.assertEqual(8 * 256 // 2 + 1, len(result.coordinates))
        self.assertEqual(0.0, result.coordinates[0])
        self.assertAlmostEqual(1 / 8, result.coordinates[1])
        self.assertEqual(1 / 256, result.spacing)
        self.assertEqual('hann', result.window)
        self.assertEqual(8, result.padding)

    def test_harmonic_at_bin_center(self):
        result = spectrum.response_spectrum(_cosine(20), _FIELDS)
        self.assertEqual(20.0,
                         result.coordinates[np.argmax(result.magnitudes)])
        component = spectrum.dominant_component(result)
        self.assertAlmostEqual(20.0, component.coordinate, delta=1 / 16)
        self.assertAlmostEqual(0.5, component.magnitude, delta=0.01)

    def test_harmonic_between_bins(self):
        for frequency in (7.3, 20.37, 41.81):
            with self.subTest(frequency=frequency):
                component = spectrum.dominant_component(
                    spectrum.response_spectrum(_cosine(frequency), _FIELDS))
                self.assertAlmostEqual(frequency,
                                       component.coordinate,
                                       delta=0.01 * frequency)

    def test_constant(self):
        result = spectrum.response_spectrum(np.full(256, 0.7), _FIELDS)
        self.assertLess(np.max(result.magnitudes), 1e-12)

    def test_parseval(self):
        values = np.random.default_rng(0).normal(size=64)
        result = spectrum.response_spectrum(values,
                                            np.arange(64),
                                            window='boxcar',
                                            padding=1)
        transform = result.magnitudes * 64 / 2
        energy = (transform[0]**2 + 2 * np.sum(transform[1:-1]**2) +
                  transform[-1]**2) / 64
        centered = values - np.mean(values)
        self.assertAlmostEqual(1.0,
                               energy / np.sum(np.square(centered)),
                               delta=1e-9)

    def test_rejects_short_series(self):
        with self.assertRaisesRegex(errors.SamplingError, '16'):
            spectrum.response_spectrum(np.ones(15), np.arange(15))

    def test_rejects_non_uniform_sampling(self):
        fields = np.arange(32.0)
        fields[10] += 0.1
        with self.assertRaisesRegex(errors.SamplingError, 'uniformly'):
            spectrum.response_spectrum(np.ones(32), fields)

    def test_rejects_decreasing_coordinates(self):
        with self.assertRaises(errors.SamplingError):
            spectrum.response_spectrum(np.ones(32), -np.arange(32.0))


class SpectrumTest(unittest.TestCase):

    def test_rejects_unordered_coordinates(self):
        with self.assertRaises(errors.InvalidArgumentError):
            spectrum.Spectrum(coordinates=np.array([0.0, 2.0, 1.0]),
                              magnitudes=np.zeros(3))

    def test_rejects_mismatched_shapes(self):
        with self.assertRaises(errors.InvalidArgumentError):
            spectrum.Spectrum(coordinates=np.arange(3.0),
                              magnitudes=np.zeros(4))


class DominantComponentTest(unittest.TestCase):

    def test_parabolic_peak(self):
        position, height = spectrum.parabolic_peak(
            np.array([2, 3, 1, 6, 4, 2, 3, 1], dtype=float), 3)
        self.assertAlmostEqual(3.2142857142857144, position)
        self.assertAlmostEqual(6.1607142857142856, height)

    def test_excludes_dc(self):
        result = spectrum.Spectrum(coordinates=np.arange(8.0),
                                   magnitudes=np.array(
                                       [100, 0, 0, 0, 10, 0, 0, 0.0]))
        self.assertEqual(4.0, spectrum.dominant_component(result).coordinate)

    def test_white_noise_is_not_a_component(self):
        values = np.random.default_rng(1).normal(size=256)
        result = spectrum.response_spectrum(values, _FIELDS)
        with self.assertRaises(errors.NoComponentError):
            spectrum.dominant_component(result,
                                        error_policy=errors.ErrorPolicy.RAISE)

    def test_returns_none_by_default(self):
        result = spectrum.Spectrum(coordinates=np.arange(2.0),
                                   magnitudes=np.zeros(2))
        with self.assertLogs(level='WARNING'):
            self.assertIsNone(spectrum.dominant_component(result))

    def test_degenerate(self):
        result = spectrum.Spectrum(coordinates=np.arange(2.0),
                                   magnitudes=np.ones(2))
        with self.assertRaisesRegex(errors.NoComponentError, '2 bins'):
            spectrum.dominant_component(result,
                                        error_policy=errors.ErrorPolicy.RAISE)


def _synthetic_map(phis, scale=2 * math.pi * 20):
    angles = scale * np.outer(np.abs(np.sin(phis)), _FIELDS)
    return np.square(np.cos(angles / 2))


class SensitivityCurveTest(unittest.TestCase):

    def test_sine_law(self):
        phis = np.linspace(0, math.pi, 19)
        curve = spectrum.sensitivity_curve(_synthetic_map(phis), phis, _FIELDS)
        self.assertEqual(0.0, curve.betas[0])
        self.assertEqual(0.0, curve.betas[-1])
        self.assertEqual(1.0, curve.betas[9])
        self.assertAlmostEqual(0.5, curve.betas[3], delta=0.02)
        self.assertAlmostEqual(20.0, curve.frequencies[9], delta=0.2)
        self.assertGreater(curve.r_squared, 0.99)
        self.assertLess(np.max(np.abs(curve.residuals)), 0.05)
        self.assertAlmostEqual(1.0, curve.scale, delta=0.02)

    def test_flat_rows_raise_with_raise_policy(self):
        phis = np.array([0.0, math.pi / 2])
        with self.assertRaisesRegex(errors.NoComponentError, 'contrast'):
            spectrum.sensitivity_curve(_synthetic_map(phis),
                                       phis,
                                       _FIELDS,
                                       error_policy=errors.ErrorPolicy.RAISE)

    def test_no_component_anywhere(self):
        phis = np.array([0.0, math.pi])
        with self.assertLogs(level='WARNING'):
            with self.assertRaisesRegex(errors.NoComponentError, 'No row'):
                spectrum.sensitivity_curve(_synthetic_map(phis), phis, _FIELDS)

    def test_rejects_mismatched_map(self):
        with self.assertRaises(errors.InvalidArgumentError):
            spectrum.sensitivity_curve(np.ones((3, 256)), [0.0, 1.0], _FIELDS)


class UnwrapRotationAngleTest(unittest.TestCase):

    def test_recovers_ramp(self):
        angles = np.linspace(0, 7 * math.pi, 301)
        np.testing.assert_allclose(
            angles,
            spectrum.unwrap_rotation_angle(np.square(np.cos(angles / 2))),
            rtol=0,
            atol=1e-6)

    def test_recovers_nonlinear_ramp(self):
        angles = 40 * np.linspace(0, 1, 401)**1.5
        np.testing.assert_allclose(
            angles,
            spectrum.unwrap_rotation_angle(np.square(np.cos(angles / 2))),
            rtol=0,
            atol=1e-6)

    def test_small_angles_stay_on_first_fold(self):
        angles = np.linspace(0, 1, 11)
        np.testing.assert_allclose(
            angles,
            spectrum.unwrap_rotation_angle(np.square(np.cos(angles / 2))),
            atol=1e-7)


if __name__ == '__main__':
    unittest.main()
