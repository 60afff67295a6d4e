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
"""Tab-delimited result tables with a provenance header.

A table reads

    #config_token=config/v1:3f…
    #seed=0
    phi_rad	b_rf_t	p0
    0	0	1

Metadata lines come first, sorted by key, then the header and one line per
row. Floats carry 17 significant digits, so reading a table back gives the
exact values written.

Pulse programs use the record layout instead: a single metadata line of
semicolon separated pairs, then comma separated columns.

    #kind=dysco;n_units=1;phi_rad=0;seed=0
    index,start_s,duration_s,rabi_rad_s,phase_rad,label
    0,0,6.0024…e-08,52338933.6…,3.1415926535897931,pi_xbar_minus_phi
"""

import dataclasses
from typing import Any, Callable, Mapping, Optional, Sequence, Tuple

import frozendict

import dysco_sim
from dysco_sim import errors
from dysco_sim.experiments import sweep
from dysco_sim.io import config as config_lib
from dysco_sim.io import formatting

_FORBIDDEN = ('\t', '\n', '\r')


@dataclasses.dataclass(frozen=True)
class ResultTable:
    """Rectangular table of results.

    Attributes:
        columns: Column names, with unit suffixes.
        rows: Cells of every row, in column order.
        metadata: Provenance and parameters, written as '#key=value' lines.
    """
    columns: Tuple[str, ...]
    rows: Tuple[Tuple[Any, ...], ...] = ()
    metadata: Mapping[str, Any] = dataclasses.field(
        default_factory=frozendict.frozendict)

    def __post_init__(self) -> None:
        if not self.columns:
            raise errors.InvalidArgumentError('A table needs columns.')
        if len(set(self.columns)) != len(self.columns):
            raise errors.InvalidArgumentError(
                f'Duplicate columns: {self.columns!r}')
        for name in (*self.columns, *self.metadata):
            if not name or '=' in name or any(
                    character in name for character in _FORBIDDEN):
                raise errors.InvalidArgumentError(
                    f'Invalid column or metadata name: {name!r}')
        for index, row in enumerate(self.rows):
            if len(row) != len(self.columns):
                raise errors.InvalidArgumentError(
                    f'Row {index} has {len(row)} cells, the table has '
                    f'{len(self.columns)} columns.')


def provenance(config: config_lib.ScenarioConfig) -> Mapping[str, Any]:
    """Returns the metadata identifying the run of a scenario."""
    return frozendict.frozendict(
        config_token=config_lib.config_token(config),
        experiment=config.experiment.value,
        seed=config.seed,
        tool_version=dysco_sim.__version__,
    )


def with_metadata(table: ResultTable,
                  metadata: Mapping[str, Any]) -> ResultTable:
    """Returns the table with metadata added, replacing equal keys."""
    return dataclasses.replace(table,
                               metadata=frozendict.frozendict({
                                   **table.metadata,
                                   **metadata,
                               }))


def from_columns(columns: Mapping[str, Sequence[Any]],
                 metadata: Optional[Mapping[str, Any]] = None) -> ResultTable:
    """Builds a table from equally long columns, in mapping order."""
    lengths = {len(values) for values in columns.values()}
    if len(lengths) > 1:
        raise errors.InvalidArgumentError(
            f'Columns differ in length: {sorted(lengths)}')
    return ResultTable(
        columns=tuple(columns),
        rows=tuple(zip(*columns.values())),
        metadata=frozendict.frozendict(metadata or {}),
    )


def from_sweep(result: sweep.SweepResult,
               metadata: Optional[Mapping[str, Any]] = None) -> ResultTable:
    """Flattens a sweep into one row per cell, axis2 varying fastest."""
    columns = (result.axis1.name, result.axis2.name, 'p0')
    if result.stderr is not None:
        columns += ('p0_stderr',)
    rows = []
    for i, first in enumerate(result.axis1.values):
        for j, second in enumerate(result.axis2.values):
            row = (first, second, result.p0[i, j])
            if result.stderr is not None:
                row += (result.stderr[i, j],)
            rows.append(row)
    return ResultTable(
        columns=columns,
        rows=tuple(rows),
        metadata=frozendict.frozendict({
            **result.metadata,
            **(metadata or {}),
        }),
    )


def format_table(table: ResultTable) -> str:
    lines = [
        f'#{key}={formatting.format_value(value)}'
        for key, value in sorted(table.metadata.items())
    ]
    lines.append('\t'.join(table.columns))
    lines.extend('\t'.join(map(formatting.format_value, row))
                 for row in table.rows)
    return '\n'.join(lines) + '\n'


def _parse_cell(text: str) -> Any:
    try:
        return float(text)
    except ValueError:
        return text


def parse_table(text: str) -> ResultTable:
    """Parses format_table() output; numeric cells become floats.

    Raises:
        InvalidArgumentError: No header, or malformed metadata.
    """
    lines = text.splitlines()
    metadata = {}
    while lines and lines[0].startswith('#'):
        key, separator, value = lines.pop(0)[1:].partition('=')
        if not separator:
            raise errors.InvalidArgumentError(
                f'Metadata line without "=": {key!r}')
        metadata[key] = value
    if not lines:
        raise errors.InvalidArgumentError('Table has no header.')
    columns = tuple(lines[0].split('\t'))
    return ResultTable(
        columns=columns,
        rows=tuple(
            tuple(map(_parse_cell, line.split('\t'))) for line in lines[1:]),
        metadata=frozendict.frozendict(metadata),
    )


def format_records(table: ResultTable) -> str:
    """Returns a table in the record layout.

    Raises:
        InvalidArgumentError: A metadata value contains ';' or a cell contains
            ','.
    """
    pairs = []
    for key, value in sorted(table.metadata.items()):
        text = formatting.format_value(value)
        if ';' in text:
            raise errors.InvalidArgumentError(
                f'Metadata {key!r} contains ";": {text!r}')
        pairs.append(f'{key}={text}')
    lines = ['#' + ';'.join(pairs), ','.join(table.columns)]
    for row in table.rows:
        cells = [formatting.format_value(cell) for cell in row]
        if any(',' in cell for cell in cells):
            raise errors.InvalidArgumentError(f'Cell contains ",": {cells!r}')
        lines.append(','.join(cells))
    return '\n'.join(lines) + '\n'


def parse_records(text: str) -> ResultTable:
    """Parses format_records() output; numeric cells become floats.

    Raises:
        InvalidArgumentError: Missing metadata or header line.
    """
    lines = text.splitlines()
    if len(lines) < 2 or not lines[0].startswith('#'):
        raise errors.InvalidArgumentError(
            'Records need a metadata line and a header.')
    metadata = {}
    for pair in filter(None, lines[0][1:].split(';')):
        key, separator, value = pair.partition('=')
        if not separator:
            raise errors.InvalidArgumentError(
                f'Metadata pair without "=": {key!r}')
        metadata[key] = value
    return ResultTable(
        columns=tuple(lines[1].split(',')),
        rows=tuple(
            tuple(map(_parse_cell, line.split(','))) for line in lines[2:]),
        metadata=frozendict.frozendict(metadata),
    )


def emit_table(
        table: ResultTable,
        path: str,
        *,
        formatter: Callable[[ResultTable], str] = format_table,
) -> None:
    with open(path, 'w', encoding='utf-8', newline='\n') as file:
        file.write(formatter(table))


def read_table(path: str) -> ResultTable:
    with open(path, encoding='utf-8') as file:
        return parse_table(file.read())
