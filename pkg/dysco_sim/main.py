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
"""Command line interface.

Every experiment is a subcommand reading an optional JSON scenario, e.g.

    python -m dysco_sim.main spectrogram --config scan.json --out scan.tsv
    python -m dysco_sim.main filter-function --sequence xy8 --reps 4 \
        --tau 1.156e-6

Flags override the scenario; the subcommand overrides its experiment. Exit
status is 0 on success, 2 for invalid usage or configuration and 1 when an
experiment fails.
"""

import argparse
import logging
import math
import os
import sys
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from dysco_sim import errors
from dysco_sim import progress
from dysco_sim import selftest
from dysco_sim.analysis import filter_function
from dysco_sim.experiments import monte_carlo
from dysco_sim.experiments import spectrogram
from dysco_sim.experiments import sweep
from dysco_sim.io import config as config_lib
from dysco_sim.io import table as table_lib
from dysco_sim.sequence import export

# Span of the default filter-function grid, in multiples of 1/t.
_DEFAULT_FREQUENCY_SPAN = 64
_DEFAULT_FREQUENCY_POINTS = 2049

_LOG_LEVELS = ('DEBUG', 'INFO', 'WARNING', 'ERROR')

# Flags, config key and type of every override.
_OVERRIDES = (
    (('--out',), 'output', str),
    (('--seed',), 'seed', int),
    (('--threads',), 'threads', int),
    (('--shots',), 'shots', int),
    (('--substeps',), 'substeps', int),
    (('--rabi-rad-s',), 'spin.rabi_rad_s', float),
    (('--sequence',), 'sequence.kind', str),
    (('--n-units',), 'sequence.n_units', int),
    (('--phi-rad',), 'sequence.phi_rad', float),
    (('--f-s-hz',), 'sequence.f_s_hz', float),
    (('--beta-k',), 'sequence.beta_k', float),
    (('--beta-k-steps',), 'sequence.beta_k_steps', int),
    (('--window',), 'sequence.window', str),
    (('--tau-s', '--tau'), 'sequence.tau_s', float),
    (('--repetitions', '--reps'), 'sequence.repetitions', int),
)

Tables = List[Tuple[str, table_lib.ResultTable]]
Runner = Callable[[config_lib.ScenarioConfig, monte_carlo.RunOptions], Tables]
Formatter = Callable[[table_lib.ResultTable], str]


def _run_map(config: config_lib.ScenarioConfig,
             options: monte_carlo.RunOptions) -> Tables:
    result = sweep.run_p0_map(config.sequence.phi_grid_rad,
                              config.field.b_rf_grid_t,
                              config.sequence.n_units,
                              config.spin.rabi_rad_s,
                              options=options)
    return [('', table_lib.from_sweep(result))]


def _run_sensitivity(config: config_lib.ScenarioConfig,
                     options: monte_carlo.RunOptions) -> Tables:
    scan = sweep.run_sensitivity_scan(config.sequence.phi_grid_rad,
                                      config.field.b_rf_grid_t,
                                      config.sequence.n_units,
                                      config.spin.rabi_rad_s,
                                      options=options)
    phis = np.array(scan.result.axis1.values)
    curve = scan.curve
    return [
        ('', table_lib.from_sweep(scan.result)),
        ('spectrum',
         table_lib.from_columns({
             'phi_rad': np.repeat(phis, len(scan.zeta)),
             'zeta_per_t': np.tile(scan.zeta, len(phis)),
             's': scan.s_map.ravel(),
         })),
        ('curve',
         table_lib.from_columns(
             {
                 'phi_rad': curve.phis,
                 'beta': curve.betas,
                 'zeta_per_t': curve.frequencies,
                 'residual': curve.residuals,
             }, {
                 'scale': curve.scale,
                 'r_squared': curve.r_squared,
             })),
    ]


def _run_dr_ramp(config: config_lib.ScenarioConfig,
                 options: monte_carlo.RunOptions) -> Tables:
    fields = config.field.b_rf_grid_t or (config.field.b_rf_t,)
    beta_ks = np.linspace(0, 1, config.sequence.beta_k_steps + 1)
    result = sweep.run_dr_ramp(beta_ks,
                               fields,
                               config.sequence.n_units,
                               config.spin.rabi_rad_s,
                               options=options)
    return [
        ('', table_lib.from_sweep(result)),
        ('counts',
         table_lib.from_columns({
             'b_rf_t': result.axis1.values,
             'oscillations': sweep.oscillation_counts(result),
         })),
    ]


def _run_dynamic_range(config: config_lib.ScenarioConfig,
                       options: monte_carlo.RunOptions) -> Tables:
    run = sweep.run_dynamic_range(config.sequence.n_units,
                                  config.spin.rabi_rad_s,
                                  max_fraction=config.field.max_fraction,
                                  samples=config.field.samples,
                                  options=options)
    metadata = {
        'beta_min': run.beta_min,
        'dynamic_range': run.dynamic_range.ratio,
        'high_slope_per_t': run.dynamic_range.high_slope,
        'low_slope_per_t': run.dynamic_range.low_slope,
    }
    if run.dynamic_range.theoretical_bound is not None:
        metadata['theoretical_bound_reconstructed'] = (
            run.dynamic_range.theoretical_bound)
    return [
        ('', table_lib.from_sweep(run.result, metadata)),
        ('fields',
         table_lib.from_columns({
             'linear_angle_rad': run.result.axis2.values,
             'low_b_rf_t': run.low_fields,
             'high_b_rf_t': run.high_fields,
         })),
    ]


def _spectrogram_tables(result: spectrogram.Spectrogram) -> Tables:
    columns = {
        'f_s_hz': result.f_s,
        'response': result.response(),
        'detected': result.detected(),
    }
    strength = result.field_strength()
    if strength is not None:
        columns['field_strength'] = strength
    return [
        ('', table_lib.from_sweep(result.as_sweep_result())),
        ('response',
         table_lib.from_columns(
             columns, {'detection_threshold': result.detection_threshold})),
    ]


def _run_spectrogram(config: config_lib.ScenarioConfig,
                     options: monte_carlo.RunOptions) -> Tables:
    sequence = config.sequence
    return _spectrogram_tables(
        spectrogram.run_spectrogram(
            sequence.f_s_grid_hz,
            sequence.beta_k_steps,
            config.waveform.build(),
            sequence.n_units,
            config.spin.rabi_rad_s,
            window=sequence.window,
            shots=config.shots,
            seed=config.seed,
            strict_bandwidth=sequence.strict_bandwidth,
            options=options,
        ))


def _run_noise_spectrum(config: config_lib.ScenarioConfig,
                        options: monte_carlo.RunOptions) -> Tables:
    sequence = config.sequence
    waveform = config.waveform.build()
    return _spectrogram_tables(
        spectrogram.run_noise_spectrum(
            sequence.f_s_grid_hz,
            sequence.beta_k_steps,
            waveform.bath,
            sequence.n_units,
            config.spin.rabi_rad_s,
            tones=waveform.tones,
            window=sequence.window,
            shots=config.shots or spectrogram.DEFAULT_ASYNCHRONOUS_SHOTS,
            seed=config.seed,
            strict_bandwidth=sequence.strict_bandwidth,
            options=options,
        ))


def _run_filter_function(config: config_lib.ScenarioConfig,
                         options: monte_carlo.RunOptions) -> Tables:
    del options  # Unused.
    program = config_lib.build_program(config)
    frequencies = np.array(
        config.frequency_grid_hz or
        np.linspace(0, _DEFAULT_FREQUENCY_SPAN / program.total_time,
                    _DEFAULT_FREQUENCY_POINTS))
    result = filter_function.program_filter_function(
        program, 2 * math.pi * frequencies)
    return [('',
             table_lib.from_columns(
                 {
                     'frequency_hz': frequencies,
                     'omega_rad_s': result.omega_grid,
                     'filter': result.values,
                 }, export.header(program)))]


def _run_trace(config: config_lib.ScenarioConfig,
               options: monte_carlo.RunOptions) -> Tables:
    program = config_lib.build_program(config)
    trajectory = sweep.run_trace(program,
                                 config.waveform.build(),
                                 seed=config.seed,
                                 options=options)
    return [('',
             table_lib.from_columns(
                 {
                     'time_s': trajectory.times,
                     'x': trajectory.bloch[:, 0],
                     'y': trajectory.bloch[:, 1],
                     'z': trajectory.bloch[:, 2],
                     'pulse_index': trajectory.pulse_index,
                 }, export.header(program)))]


def _run_baseline(config: config_lib.ScenarioConfig,
                  options: monte_carlo.RunOptions) -> Tables:
    sequence = config.sequence
    waveform = config.waveform.build()
    result = sweep.run_baseline_comparison(
        sequence.baseline_kinds,
        sequence.tau_grid_s,
        waveform,
        config.spin.rabi_rad_s,
        repetitions=sequence.repetitions,
        phi=sequence.phi_rad,
        shots=config.shots or spectrogram.default_shots(waveform),
        seed=config.seed,
        options=options,
    )
    return [('', table_lib.from_sweep(result))]


def _run_export_program(config: config_lib.ScenarioConfig,
                        options: monte_carlo.RunOptions) -> Tables:
    del options  # Unused.
    program = config_lib.build_program(config)
    return [('',
             table_lib.ResultTable(
                 columns=export.COLUMNS,
                 rows=tuple(record.as_row()
                            for record in export.export(program)),
                 metadata=export.header(program),
             ))]


_RUNNERS: Dict[config_lib.Experiment, Runner] = {
    config_lib.Experiment.MAP: _run_map,
    config_lib.Experiment.SENSITIVITY: _run_sensitivity,
    config_lib.Experiment.DR_RAMP: _run_dr_ramp,
    config_lib.Experiment.DYNAMIC_RANGE: _run_dynamic_range,
    config_lib.Experiment.SPECTROGRAM: _run_spectrogram,
    config_lib.Experiment.NOISE_SPECTRUM: _run_noise_spectrum,
    config_lib.Experiment.FILTER_FUNCTION: _run_filter_function,
    config_lib.Experiment.TRACE: _run_trace,
    config_lib.Experiment.BASELINE: _run_baseline,
    config_lib.Experiment.EXPORT_PROGRAM: _run_export_program,
}

_FORMATTERS: Dict[config_lib.Experiment, Formatter] = {
    config_lib.Experiment.EXPORT_PROGRAM: table_lib.format_records,
}


def _parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog='dysco_sim',
        description='Simulates DYSCO sensing sequences on an NV spin.')
    subparsers = parser.add_subparsers(dest='command', required=True)
    for experiment in config_lib.Experiment:
        subparser = subparsers.add_parser(experiment.value)
        subparser.add_argument('--config', help='JSON scenario file.')
        for flags, key, type_ in _OVERRIDES:
            subparser.add_argument(*flags,
                                   dest=key,
                                   type=type_,
                                   help=f'Overrides {key}.')
        subparser.add_argument('--log-level',
                               choices=_LOG_LEVELS,
                               default='WARNING')
    selftest_parser = subparsers.add_parser(
        'selftest', help='Runs fast invariant checks.')
    selftest_parser.add_argument('--log-level',
                                 choices=_LOG_LEVELS,
                                 default='WARNING')
    return parser


def _load_config(args: argparse.Namespace) -> config_lib.ScenarioConfig:
    if args.config is None:
        text = '{}'
    else:
        with open(args.config, encoding='utf-8') as file:
            text = file.read()
    overrides = {'experiment': args.command}
    for _, key, _ in _OVERRIDES:
        value = getattr(args, key)
        if value is not None:
            overrides[key] = value
    return config_lib.parse_config(text, overrides=overrides)


def _write(
        tables: Tables,
        output: Optional[str],
        formatter: Formatter,
) -> None:
    """Writes the main table to output and the others next to it.

    Table 'curve' of output 'scan.tsv' goes to 'scan.curve.tsv'. Without an
    output every table goes to stdout, separated by empty lines.
    """
    if output in (None, '-'):
        sys.stdout.write('\n'.join(formatter(table) for _, table in tables))
        return
    root, extension = os.path.splitext(output)
    for name, table in tables:
        path = f'{root}.{name}{extension}' if name else output
        table_lib.emit_table(table, path, formatter=formatter)
        logging.info('Wrote %s', path)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=args.log_level,
                        format='%(levelname)s %(name)s: %(message)s')
    if args.command == 'selftest':
        return selftest.run()
    try:
        config = _load_config(args)
    except (config_lib.ConfigError, OSError) as error:
        logging.error('Invalid configuration: %s', error)
        return 2
    bus = progress.ProgressBus()
    progress.log_progress(bus)
    try:
        runner = _RUNNERS[config.experiment]
        tables = runner(config, config_lib.run_options(config, bus))
        metadata = table_lib.provenance(config)
        _write([(name, table_lib.with_metadata(table, metadata))
                for name, table in tables], config.output,
               _FORMATTERS.get(config.experiment, table_lib.format_table))
    except config_lib.ConfigError as error:
        logging.error('Invalid configuration: %s', error)
        return 2
    except (errors.Error, OSError) as error:
        logging.error('%s failed: %s', config.experiment.value, error)
        return 1
    finally:
        bus.join()
    return 0


if __name__ == '__main__':
    sys.exit(main())
