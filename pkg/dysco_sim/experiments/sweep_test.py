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
"""Tests for dysco_sim.experiments.sweep."""

import math
import unittest
from unittest import mock

import numpy as np

from dysco_sim import errors
from dysco_sim import progress
from dysco_sim.analysis import dynamic_range
from dysco_sim.analysis import spectrum
from dysco_sim.experiments import monte_carlo
from dysco_sim.experiments import sweep
from dysco_sim.sequence import dysco
from dysco_sim.sequence import pulse
from dysco_sim.signal import waveform
from dysco_sim.spin import rotation
from dysco_sim.spin import state

_RABI = 2 * math.pi * 10e6


def _tesla(fraction, rabi=_RABI):
    return fraction * rabi / abs(rotation.GAMMA_NV)


def _linear_angle(beta, fraction, n_units, rabi=_RABI):
    return dynamic_range.linear_rotation_angle(
        beta, _tesla(fraction, rabi), pulse.dysco_total_time(n_units, rabi),
        rotation.GAMMA_NV)


class SweepResultTest(unittest.TestCase):

    def test_rejects_mismatched_shape(self):
        with self.assertRaisesRegex(errors.InvalidArgumentError, 'shape'):
            sweep.SweepResult(sweep.axis('a', (1, 2)), sweep.axis('b', (1,)),
                              np.ones((1, 2)))

    def test_rejects_out_of_range(self):
        with self.assertRaisesRegex(errors.InvalidArgumentError, r'\[0, 1\]'):
            sweep.SweepResult(sweep.axis('a', (1,)), sweep.axis('b', (1,)),
                              np.array([[1.5]]))

    def test_rejects_empty_axis(self):
        with self.assertRaisesRegex(errors.InvalidArgumentError, 'no values'):
            sweep.axis('a', ())


class P0MapTest(unittest.TestCase):

    def test_zero_phase_row_is_insensitive(self):
        result = sweep.run_p0_map((0.0, math.pi / 2),
                                  np.linspace(0, _tesla(0.02), 16), 5, _RABI)
        np.testing.assert_allclose(1.0, result.p0[0], atol=1e-6)
        self.assertLess(np.min(result.p0[1]), 0.9)

    def test_zero_field_column(self):
        result = sweep.run_p0_map(np.linspace(0, math.pi, 5), (0.0,), 20,
                                  _RABI)
        np.testing.assert_allclose(1.0, result.p0[:, 0], atol=1e-9)

    def test_axes_and_metadata(self):
        result = sweep.run_p0_map((0.0, 1.0), (0.0, 1e-7, 2e-7), 2, _RABI)
        self.assertEqual('phi_rad', result.axis1.name)
        self.assertEqual((0.0, 1e-7, 2e-7), result.axis2.values)
        self.assertEqual((2, 3), result.p0.shape)
        self.assertEqual(2, result.metadata['n_units'])
        self.assertEqual(_RABI, result.metadata['rabi_rad_s'])
        self.assertEqual(monte_carlo.DEFAULT_OPTIONS.substeps,
                         result.metadata['substeps'])

    def test_angle_grows_with_sequence_length(self):
        fields = (_tesla(0.01),)
        short = sweep.run_p0_map((math.pi / 2,), fields, 1, _RABI)
        long = sweep.run_p0_map((math.pi / 2,), fields, 20, _RABI)
        short_angle = 2 * math.acos(math.sqrt(short.p0[0, 0]))
        long_angle = 2 * math.acos(math.sqrt(long.p0[0, 0]))
        self.assertAlmostEqual(_linear_angle(1.0, 0.01, 20),
                               long_angle,
                               delta=0.05 * long_angle)
        self.assertAlmostEqual(
            pulse.dysco_total_time(20, _RABI) /
            pulse.dysco_total_time(1, _RABI),
            long_angle / short_angle,
            delta=0.05 * long_angle / short_angle,
        )

    def test_response_strengthens_toward_quadrature(self):
        # Angles stay below π, where P0 falls monotonically with the angle.
        fields = np.linspace(0, _tesla(0.2), 64)
        result = sweep.run_p0_map((math.pi / 12, math.pi / 4, math.pi / 2),
                                  fields, 1, _RABI)
        np.testing.assert_array_less(np.diff(result.p0[:, 1:], axis=0), 0)

    def test_thread_count_does_not_change_result(self):
        phis = np.linspace(0, math.pi, 5)
        fields = np.linspace(0, _tesla(0.05), 8)
        serial = sweep.run_p0_map(phis, fields, 3, _RABI)
        threaded = sweep.run_p0_map(
            phis, fields, 3, _RABI, options=monte_carlo.RunOptions(threads=3))
        np.testing.assert_array_equal(serial.p0, threaded.p0)

    def test_publishes_progress(self):
        bus = progress.ProgressBus()
        callback = mock.Mock(spec=())
        bus.subscribe(progress.SweepFinished, callback)
        sweep.run_p0_map((0.0, 1.0, 2.0), (0.0,),
                         1,
                         _RABI,
                         options=monte_carlo.RunOptions(bus=bus))
        bus.join()
        callback.assert_called_once_with(progress.SweepFinished('map', 3))

    def test_rejects_empty_grid(self):
        with self.assertRaisesRegex(errors.InvalidArgumentError, 'empty'):
            sweep.run_p0_map((), (0.0,), 1, _RABI)


class SensitivityScanTest(unittest.TestCase):

    def test_sine_law(self):
        phis = np.linspace(0, math.pi, 19)
        scan = sweep.run_sensitivity_scan(phis,
                                          np.linspace(0, _tesla(0.15), 256),
                                          40, _RABI)
        self.assertGreater(scan.curve.r_squared, 0.99)
        self.assertLess(np.max(np.abs(scan.curve.residuals)), 0.05)
        self.assertEqual(0.0, scan.curve.betas[0])
        self.assertEqual(0.0, scan.curve.betas[-1])
        self.assertEqual(1.0, np.max(scan.s_map))
        self.assertEqual((19, len(scan.zeta)), scan.s_map.shape)

    def test_rejects_ramp_outside_harmonic_range(self):
        with self.assertRaisesRegex(errors.InvalidArgumentError, 'harmonic'):
            sweep.run_sensitivity_scan((1.0,), np.linspace(0, _tesla(0.3), 32),
                                       5, _RABI)


class LinearRegimeTest(unittest.TestCase):

    def test_zeta_scales_with_units(self):
        fields = np.linspace(0, _tesla(0.05), 256)
        units = (50, 100, 200)
        zetas = []
        for n_units in units:
            result = sweep.run_p0_map((math.pi / 2,), fields, n_units, _RABI)
            zetas.append(
                spectrum.dominant_component(
                    spectrum.response_spectrum(result.p0[0], fields),
                    error_policy=errors.ErrorPolicy.RAISE).coordinate)
        slope, intercept = np.polyfit(units, zetas, 1)
        predicted = slope * np.array(units) + intercept
        r_squared = 1 - (np.sum(np.square(zetas - predicted)) /
                         np.sum(np.square(zetas - np.mean(zetas))))
        self.assertGreater(r_squared, 0.999)

    def test_response_is_harmonic(self):
        fields = np.linspace(0, _tesla(sweep.HARMONIC_FRACTION), 256)
        result = sweep.run_p0_map((math.pi / 2,), fields, 50, _RABI)
        response = spectrum.response_spectrum(result.p0[0], fields)
        peak = int(np.argmax(response.magnitudes))
        # Hann main lobe plus margin, in padded bins.
        guard = 8 * response.padding
        outside = np.concatenate(
            (response.magnitudes[1:max(1, peak - guard)],
             response.magnitudes[peak + guard + 1:]))
        self.assertLess(np.max(outside), 0.1 * response.magnitudes[peak])


class DynamicRangeRampTest(unittest.TestCase):

    def setUp(self):
        super().setUp()
        self._betas = np.linspace(0, 1, 201)

    def test_counts_match_linear_model_over_three_decades(self):
        fractions = (1e-4, 1e-3, 1e-2, 1e-1)
        result = sweep.run_dr_ramp(self._betas,
                                   [_tesla(fraction) for fraction in fractions],
                                   40, _RABI)
        np.testing.assert_allclose(1.0, result.p0[:, 0], atol=1e-2)
        expected = [
            _linear_angle(1.0, fraction, 40) / (2 * math.pi)
            for fraction in fractions
        ]
        np.testing.assert_allclose(expected,
                                   sweep.oscillation_counts(result),
                                   rtol=0.05)

    def test_double_field_doubles_count(self):
        result = sweep.run_dr_ramp(self._betas, (_tesla(0.02), _tesla(0.04)),
                                   40, _RABI)
        first, second = sweep.oscillation_counts(result)
        self.assertAlmostEqual(2.0, second / first, delta=0.04)
        self.assertEqual('beta_k', result.axis2.name)

    def test_rejects_ramp_not_starting_at_zero(self):
        with self.assertRaisesRegex(errors.InvalidArgumentError, 'start at 0'):
            sweep.run_dr_ramp((0.5, 1.0), (0.0,), 1, _RABI)

    def test_rejects_decreasing_ramp(self):
        with self.assertRaisesRegex(errors.InvalidArgumentError,
                                    'non-decreasing'):
            sweep.run_dr_ramp((0.0, 0.5, 0.2), (0.0,), 1, _RABI)


class DynamicRangeTest(unittest.TestCase):

    def test_ratio_matches_bound(self):
        run = sweep.run_dynamic_range(40, 2 * math.pi * 8.33e6)
        total_time = pulse.dysco_total_time(40, 2 * math.pi * 8.33e6)
        self.assertAlmostEqual(
            pulse.dysco_total_time(1, 2 * math.pi * 8.33e6) / total_time,
            run.beta_min)
        self.assertEqual((2, 256), run.result.p0.shape)
        result = run.dynamic_range
        self.assertLess(result.ratio, 2 * result.theoretical_bound)
        self.assertGreater(result.ratio, result.theoretical_bound / 2)

    def test_rejects_single_unit(self):
        with self.assertRaisesRegex(errors.InvalidArgumentError, 'n_units'):
            sweep.run_dynamic_range(1, _RABI)


class TraceTest(unittest.TestCase):

    def setUp(self):
        super().setUp()
        self._unit = pulse.PulseProgram(
            pulses=dysco.build_dysco(1, math.pi / 6, _RABI).pulses[:4])

    def test_unit_without_field_is_closed(self):
        trajectory = sweep.run_trace(self._unit, waveform.ZERO)
        np.testing.assert_allclose(trajectory.bloch[0],
                                   trajectory.bloch[-1],
                                   atol=1e-9)
        self.assertEqual(-1, trajectory.pulse_index[0])
        self.assertEqual(3, trajectory.pulse_index[-1])
        self.assertEqual(4 * monte_carlo.DEFAULT_OPTIONS.substeps + 1,
                         len(trajectory.times))

    def test_unit_with_field_is_open(self):
        drive = waveform.Waveform(
            tones=(waveform.Tone(amplitude=_tesla(0.1), frequency=0.0),))
        trajectory = sweep.run_trace(self._unit, drive)
        self.assertGreater(
            np.linalg.norm(trajectory.bloch[-1] - trajectory.bloch[0]), 0.05)
        self.assertLess(trajectory.bloch[-1][2], 0.99)

    def test_norm_is_preserved(self):
        program = dysco.build_dysco(3, math.pi / 4, _RABI)
        drive = waveform.Waveform(
            tones=(waveform.matched_tone(program.total_time, _tesla(0.2)),))
        trajectory = sweep.run_trace(program, drive)
        np.testing.assert_allclose(1.0,
                                   np.linalg.norm(trajectory.bloch, axis=1),
                                   atol=1e-12)


class BaselineComparisonTest(unittest.TestCase):

    _KINDS = (pulse.SequenceKind.HAHN_ECHO, pulse.SequenceKind.XY8,
              pulse.SequenceKind.DYSCO)
    _FAST_RABI = 2 * math.pi * 50e6

    def test_zero_field(self):
        result = sweep.run_baseline_comparison(self._KINDS, (1e-6, 2e-6),
                                               waveform.ZERO, self._FAST_RABI)
        np.testing.assert_allclose(1.0, result.p0, atol=1e-9)
        np.testing.assert_array_equal(0.0, result.stderr)
        self.assertEqual('hahn,xy8,dysco', result.metadata['sequences'])

    def test_envelope_uses_program_length(self):
        options = monte_carlo.RunOptions(envelope=state.Envelope(tau=1e-5))
        result = sweep.run_baseline_comparison(self._KINDS[:2], (1e-6,),
                                               waveform.ZERO,
                                               self._FAST_RABI,
                                               options=options)
        for row, kind in enumerate(self._KINDS[:2]):
            length = sweep.baseline_program(kind, 1e-6,
                                            self._FAST_RABI).total_time
            self.assertAlmostEqual(0.5 + 0.5 * math.exp(-length / 1e-5),
                                   result.p0[row, 0])

    def test_xy8_dips_at_larmor_condition(self):
        larmor = 432.5e3
        bath = waveform.Waveform(bath=waveform.BathSurrogate(
            larmor_center=larmor, rms_amplitude=1e-6))
        taus = (0.8e-6, 1 / (2 * larmor), 1.6e-6)
        result = sweep.run_baseline_comparison(
            (pulse.SequenceKind.XY8, pulse.SequenceKind.DYSCO),
            taus,
            bath,
            self._FAST_RABI,
            shots=50,
            seed=4,
        )
        xy8, dysco_row = result.p0
        self.assertLess(xy8[1], 0.7)
        self.assertGreater(xy8[0], 0.9)
        self.assertGreater(xy8[2], 0.9)
        np.testing.assert_array_less(0.95, dysco_row)

    def test_dysco_length_follows_xy8(self):
        xy8 = sweep.baseline_program(pulse.SequenceKind.XY8, 1e-6,
                                     self._FAST_RABI)
        program = sweep.baseline_program(pulse.SequenceKind.DYSCO, 1e-6,
                                         self._FAST_RABI)
        self.assertAlmostEqual(xy8.total_time,
                               program.total_time,
                               delta=4 * 2 * math.pi / self._FAST_RABI)

    def test_rejects_other_sequences(self):
        with self.assertRaisesRegex(errors.InvalidArgumentError, 'baseline'):
            sweep.baseline_program(pulse.SequenceKind.DYSCO_MODULATED, 1e-6,
                                   self._FAST_RABI)


if __name__ == '__main__':
    unittest.main()
