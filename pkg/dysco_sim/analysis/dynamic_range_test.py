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
"""Tests for dysco_sim.analysis.dynamic_range."""

import math
import unittest

import numpy as np

from dysco_sim import errors
from dysco_sim.analysis import dynamic_range

_FIELDS = np.linspace(0, 1e-6, 201)


class TheoreticalBoundTest(unittest.TestCase):

    def test_bound_at_full_length(self):
        bound = dynamic_range.theoretical_dr_bound(2 * math.pi * 8.33e6,
                                                   2.55e-3)
        self.assertAlmostEqual(4.7e3, bound, delta=0.1e3)
        self.assertLess(abs(bound - 5e3) / 5e3, 0.15)

    def test_rejects(self):
        with self.assertRaises(errors.InvalidArgumentError):
            dynamic_range.theoretical_dr_bound(0.0, 1e-3)
        with self.assertRaises(errors.InvalidArgumentError):
            dynamic_range.theoretical_dr_bound(1e6, -1e-3)


class DynamicRangeTest(unittest.TestCase):

    def test_identical_responses(self):
        response = np.square(np.cos(3e6 * _FIELDS))
        result = dynamic_range.dynamic_range(response, response, _FIELDS)
        self.assertEqual(1.0, result.ratio)
        self.assertIsNone(result.theoretical_bound)

    def test_slope_ratio(self):
        low = np.square(np.cos(1e6 * _FIELDS))
        high = np.square(np.cos(1e7 * _FIELDS))
        result = dynamic_range.dynamic_range(low,
                                             high,
                                             _FIELDS,
                                             rabi=2 * math.pi * 8.33e6,
                                             total_time=2.55e-3)
        # max|d/dB cos²(kB)| = k.
        self.assertAlmostEqual(1e7, result.high_slope, delta=0.02 * 1e7)
        self.assertAlmostEqual(10, result.ratio, delta=0.2)
        self.assertAlmostEqual(4.72e3, result.theoretical_bound, delta=10)

    def test_separate_field_grids(self):
        # Same angle range on a ten times wider grid.
        low = np.square(np.cos(1e6 * _FIELDS))
        high = np.square(np.cos(1e7 * _FIELDS / 10))
        result = dynamic_range.dynamic_range(low,
                                             high,
                                             _FIELDS / 10,
                                             low_fields=_FIELDS)
        self.assertAlmostEqual(10, result.ratio, delta=0.2)

    def test_linear_response(self):
        low = 1 - 0.5 * _FIELDS / _FIELDS[-1]
        self.assertAlmostEqual(0.5e6,
                               dynamic_range.max_slope(low, _FIELDS),
                               delta=1e-3)

    def test_flat_response(self):
        with self.assertRaises(errors.SlopeError):
            dynamic_range.dynamic_range(np.ones(201),
                                        np.square(np.cos(3e6 * _FIELDS)),
                                        _FIELDS)

    def test_rejects_short_response(self):
        with self.assertRaises(errors.SamplingError):
            dynamic_range.max_slope([1.0, 0.5], [0.0, 1.0])


class LinearRotationAngleTest(unittest.TestCase):

    def test_value(self):
        self.assertAlmostEqual(
            4 / math.pi**2 * 0.5 * 2 * math.pi * 28e9 * 1e-9 * 1e-3,
            dynamic_range.linear_rotation_angle(0.5, 1e-9, 1e-3,
                                                -2 * math.pi * 28e9))


if __name__ == '__main__':
    unittest.main()
