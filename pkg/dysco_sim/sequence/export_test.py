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
"""Tests for dysco_sim.sequence.export."""

import math
import unittest

from dysco_sim.sequence import dysco
from dysco_sim.sequence import export

_RABI = 2 * math.pi * 8.33e6


class ExportTest(unittest.TestCase):

    def test_records(self):
        program = dysco.build_dysco(1, 0.2, _RABI)
        records = tuple(export.export(program))
        self.assertEqual(9, len(records))
        self.assertEqual(tuple(range(9)), tuple(r.index for r in records))
        self.assertEqual('pi_y', records[4].label)
        self.assertEqual(0.0, records[0].start_s)
        for previous, record in zip(records, records[1:]):
            self.assertLess(previous.start_s, record.start_s)
            self.assertAlmostEqual(previous.start_s + previous.duration_s,
                                   record.start_s,
                                   delta=1e-18)
        self.assertAlmostEqual(program.total_time,
                               records[-1].start_s + records[-1].duration_s,
                               delta=1e-18)

    def test_as_row(self):
        record = next(iter(export.export(dysco.build_dysco(1, 0.0, _RABI))))
        self.assertEqual(len(export.COLUMNS), len(record.as_row()))
        self.assertEqual((0, 0.0, math.pi / _RABI, _RABI, math.pi,
                          'pi_xbar_minus_phi'), record.as_row())

    def test_header(self):
        program = dysco.build_dysco(3, 0.5, _RABI)
        self.assertEqual(
            {
                'kind': 'dysco',
                'rabi_rad_s': _RABI,
                'n_units': 3,
                'phi_rad': 0.5,
                'pulse_count': 25,
                'total_time_s': program.total_time,
            },
            dict(export.header(program)),
        )


if __name__ == '__main__':
    unittest.main()
