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
"""Tests for dysco_sim.analysis.filter_function."""

import math
import unittest

import numpy as np
import scipy.integrate

from dysco_sim import errors
from dysco_sim.analysis import filter_function
from dysco_sim.sequence import baseline
from dysco_sim.sequence import dysco
from dysco_sim.sequence import pulse

_RABI = 2 * math.pi * 8.33e6


def _peak(filter_fn, low, high):
    inside = (filter_fn.omega_grid >= low) & (filter_fn.omega_grid <= high)
    return np.max(filter_fn.values[inside])


def _lorentzian(weight, center, width):

    def spectrum(omega):
        return weight * (width / math.pi) / (np.square(omega - center) +
                                             width**2)

    return spectrum


class FilterFunctionTest(unittest.TestCase):

    def test_constant_sensitivity(self):
        duration = 1e-5
        omega = np.linspace(0, 1e6, 501)
        result = filter_function.filter_function(np.ones(1000), duration / 1000,
                                                 omega)
        np.testing.assert_allclose(2 * np.square(np.sin(omega * duration / 2)),
                                   result.values,
                                   rtol=1e-4,
                                   atol=1e-12)
        self.assertAlmostEqual(duration, result.duration)

    def test_non_negative_and_zero_at_dc(self):
        values = np.random.default_rng(2).normal(size=300)
        result = filter_function.filter_function(values, 1e-8,
                                                 np.linspace(0, 1e8, 1001))
        self.assertEqual(0.0, result.values[0])
        self.assertTrue(np.all(result.values >= 0))

    def test_balanced_sensitivity(self):
        values = np.concatenate((np.ones(100), -np.ones(100)))
        result = filter_function.filter_function(values, 1e-8,
                                                 np.array([0.0, 1e3, 1e4]))
        self.assertEqual(0.0, result.values[0])
        # F ∝ ω⁴ near zero for a balanced modulation.
        self.assertAlmostEqual(1e4, result.values[2] / result.values[1],
                               delta=1e2)

    def test_stretched_transform(self):
        values = np.ones(500)
        result = filter_function.filter_function(values, 1e-8, np.zeros(1))
        omega = np.array([1e5, 3e5])
        np.testing.assert_allclose(
            filter_function.filter_function(values, 2e-8, omega).values,
            np.square(omega) *
            np.square(np.abs(result.transform(omega, 1e-5))) / 2,
            rtol=1e-12)


class SensitivityFunctionTest(unittest.TestCase):

    def test_hahn_echo(self):
        rabi = 2 * math.pi * 50e6
        tau = 2e-6
        program = baseline.build_hahn_echo(tau, rabi)
        sensitivity = filter_function.sensitivity_function(program, 1e-9)
        self.assertAlmostEqual(program.total_time, sensitivity.duration)
        times = sensitivity.times
        first = (times > 0.1e-6) & (times < 0.9e-6)
        second = (times > 1.2e-6) & (times < 1.9e-6)
        np.testing.assert_allclose(1, np.abs(sensitivity.values[first]),
                                   atol=1e-9)
        self.assertAlmostEqual(-np.mean(sensitivity.values[first]),
                               np.mean(sensitivity.values[second]),
                               delta=1e-9)

    def test_free_evolution_is_insensitive(self):
        program = pulse.PulseProgram(pulses=(pulse.free_evolution(1e-6),))
        sensitivity = filter_function.sensitivity_function(program, 1.01e-8)
        self.assertEqual(100, len(sensitivity.values))
        np.testing.assert_array_equal(np.zeros(100), sensitivity.values)

    def test_fixed_phase_dysco_is_antisymmetric(self):
        phi = math.pi / 6
        program = dysco.build_dysco(40, phi, _RABI)
        sensitivity = filter_function.sensitivity_function(
            program, math.pi / _RABI / 16)
        half = len(sensitivity.values) // 2
        first = np.mean(sensitivity.values[:half])
        second = np.mean(sensitivity.values[half:])
        self.assertAlmostEqual(2 / math.pi * math.sin(phi),
                               abs(first),
                               delta=0.03 * 2 / math.pi * math.sin(phi))
        self.assertAlmostEqual(-first, second, delta=0.03 * abs(first))

    def test_zero_phase_dysco_has_no_net_sensitivity(self):
        means = []
        for phi in (0.0, math.pi / 6):
            sensitivity = filter_function.sensitivity_function(
                dysco.build_dysco(10, phi, _RABI), math.pi / _RABI / 16)
            means.append(
                np.mean(sensitivity.values[:len(sensitivity.values) // 2]))
        self.assertLess(abs(means[0]), 0.05 * abs(means[1]))

    def test_rejects_bad_spacing(self):
        with self.assertRaises(errors.InvalidArgumentError):
            filter_function.sensitivity_function(
                dysco.build_dysco(1, 0.0, _RABI), 0.0)


class ProgramFilterFunctionTest(unittest.TestCase):

    def test_xy8_has_odd_harmonics(self):
        tau = 1e-6
        program = baseline.build_xy8(4, tau, 2 * math.pi * 50e6)
        fundamental = math.pi / tau
        omega = np.linspace(0.2 * fundamental, 4 * fundamental, 3801)
        result = filter_function.program_filter_function(program, omega)
        first = _peak(result, 0.9 * fundamental, 1.1 * fundamental)
        third = _peak(result, 2.9 * fundamental, 3.1 * fundamental)
        low_band = result.omega_grid < 1.5 * fundamental
        self.assertAlmostEqual(
            fundamental,
            result.omega_grid[low_band][np.argmax(result.values[low_band])],
            delta=0.02 * fundamental,
        )
        self.assertGreater(third, 0.03 * first)

    def test_modulated_dysco_has_single_passband(self):
        n_units = 40
        total_time = pulse.dysco_total_time(n_units, _RABI)
        f_s = 4 / total_time
        program = dysco.build_dysco_modulated(n_units, f_s, 1.0,
                                              pulse.Window.RECTANGULAR, _RABI)
        passband = 2 * math.pi * f_s
        omega = passband * np.arange(1, 6)
        result = filter_function.program_filter_function(program, omega)
        self.assertEqual(0, np.argmax(result.values))
        for harmonic in (2, 3, 4):
            with self.subTest(harmonic=harmonic):
                self.assertLess(result.values[harmonic - 1],
                                10**-2.6 * result.values[0])

    def test_modulated_dysco_peaks_at_modulation_frequency(self):
        n_units = 40
        total_time = pulse.dysco_total_time(n_units, _RABI)
        f_s = 6 / total_time
        program = dysco.build_dysco_modulated(n_units, f_s, 0.8,
                                              pulse.Window.GAUSSIAN, _RABI)
        omega = 2 * math.pi * np.linspace(0.5 * f_s, 1.5 * f_s, 201)
        result = filter_function.program_filter_function(program, omega)
        self.assertAlmostEqual(
            2 * math.pi * f_s,
            result.omega_grid[np.argmax(result.values)],
            delta=2 * math.pi * 0.05 * f_s,
        )


class CoherenceIntegralTest(unittest.TestCase):

    def setUp(self):
        super().setUp()
        self.duration = 12.5e-6
        self.filter = filter_function.filter_function(
            np.ones(1000), self.duration / 1000,
            np.linspace(0, 2 * math.pi * 1e6, 11))

    def test_zero_spectrum(self):
        self.assertEqual(
            0.0,
            filter_function.coherence_integral(np.zeros_like, self.filter,
                                               self.duration))

    def test_narrow_line(self):
        center = 2 * math.pi * 100e3
        width = 2 * math.pi * 1e3
        spectrum = _lorentzian(3.0, center, width)
        chi = filter_function.coherence_integral(spectrum, self.filter,
                                                 self.duration)
        omega = np.linspace(0, 2 * math.pi * 1e6, 2000001)
        dt = self.duration / 1000
        weight = (dt**2 * np.square(np.sin(1000 * omega * dt / 2)) /
                  np.square(np.sin(omega * dt / 2).clip(1e-300)))
        weight[0] = self.duration**2
        reference = scipy.integrate.trapezoid(spectrum(omega) * weight / 2,
                                              omega) / math.pi
        self.assertAlmostEqual(1.0, chi / reference, delta=1e-5)
        narrow_line = (3.0 * 2 * np.sin(center * self.duration / 2)**2 /
                       (math.pi * center**2))
        self.assertAlmostEqual(1.0, chi / narrow_line, delta=0.1)

    def test_linear_in_spectrum(self):
        spectrum = _lorentzian(1.0, 2 * math.pi * 200e3, 2 * math.pi * 20e3)
        once = filter_function.coherence_integral(spectrum, self.filter,
                                                  self.duration)
        twice = filter_function.coherence_integral(lambda w: 2 * spectrum(w),
                                                   self.filter, self.duration)
        self.assertAlmostEqual(2.0, twice / once, delta=1e-9)

    def test_stretches_with_time(self):
        spectrum = _lorentzian(1.0, 2 * math.pi * 200e3, 2 * math.pi * 20e3)
        self.assertNotAlmostEqual(
            filter_function.coherence_integral(spectrum, self.filter,
                                               self.duration),
            filter_function.coherence_integral(spectrum, self.filter,
                                               2 * self.duration),
            delta=1e-12,
        )

    def test_grid_coverage(self):
        spectrum = _lorentzian(1.0, 2 * math.pi * 990e3, 2 * math.pi * 20e3)
        with self.assertRaises(errors.GridCoverageError):
            filter_function.coherence_integral(spectrum, self.filter,
                                               self.duration)


if __name__ == '__main__':
    unittest.main()
