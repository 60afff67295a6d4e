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
"""Export of pulse programs as record streams."""

import dataclasses
from typing import Iterator, Mapping

import frozendict

from dysco_sim.sequence import pulse as pulse_lib

COLUMNS = ('index', 'start_s', 'duration_s', 'rabi_rad_s', 'phase_rad',
           'label')


@dataclasses.dataclass(frozen=True)
class PulseRecord:
    """One exported pulse.

    Attributes:
        index: Position of the pulse in the program.
        start_s: Start time, in seconds.
        duration_s: Duration, in seconds.
        rabi_rad_s: Rabi rate, in rad/s.
        phase_rad: Drive phase, in rad.
        label: Pulse label.
    """
    index: int
    start_s: float
    duration_s: float
    rabi_rad_s: float
    phase_rad: float
    label: str

    def as_row(self):
        return tuple(getattr(self, column) for column in COLUMNS)


def export(program: pulse_lib.PulseProgram) -> Iterator[PulseRecord]:
    """Yields one record per pulse, in time order."""
    for index, (start, pulse) in enumerate(
            zip(program.start_times, program.pulses)):
        yield PulseRecord(
            index=index,
            start_s=float(start),
            duration_s=pulse.duration,
            rabi_rad_s=pulse.rabi,
            phase_rad=pulse.phase,
            label=pulse.label,
        )


def header(program: pulse_lib.PulseProgram) -> Mapping[str, object]:
    """Returns the metadata describing how a program was built."""
    return frozendict.frozendict({
        'kind': program.kind.value,
        **program.parameters,
        'pulse_count': len(program.pulses),
        'total_time_s': program.total_time,
    })
