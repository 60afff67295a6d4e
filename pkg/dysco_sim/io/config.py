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
"""Scenario configuration.

A scenario is one JSON object, e.g.

    {
      "experiment": "map",
      "sequence": {
        "n_units": 40,
        "phi_grid_rad": {"start": 0, "stop": 3.141592653589793, "count": 19}
      },
      "field": {"b_rf_grid_t": {"start": 0, "stop": 1e-4, "count": 256}}
    }

Grids are either explicit lists or {start, stop, count} ranges. Parsing
collects every problem before failing, so one ConfigError names all of them.
"""

import copy
import dataclasses
import enum
import hashlib
import json
import math
from typing import Any, List, Mapping, Optional, Sequence, Tuple, Type, TypeVar

import numpy as np

from dysco_sim import errors
from dysco_sim import progress
from dysco_sim.experiments import monte_carlo
from dysco_sim.experiments import spectrogram
from dysco_sim.experiments import sweep
from dysco_sim.sequence import baseline
from dysco_sim.sequence import dysco
from dysco_sim.sequence import pulse
from dysco_sim.signal import waveform as waveform_lib
from dysco_sim.spin import propagator
from dysco_sim.spin import rotation
from dysco_sim.spin import state as state_lib

TOKEN_TYPE = 'config'
TOKEN_VERSION = 'v1'

DEFAULT_RABI = 2 * math.pi * 8.33e6

BASELINE_KINDS = (
    pulse.SequenceKind.HAHN_ECHO,
    pulse.SequenceKind.XY8,
    pulse.SequenceKind.DYSCO,
)

_MAX_SEED = 2**64 - 1

_E = TypeVar('_E', bound=enum.Enum)


class ConfigError(errors.Error):
    """Invalid scenario configuration.

    Attributes:
        problems: Every problem found, each prefixed with the dotted key or
            the line and column it concerns.
    """

    def __init__(self, problems: Sequence[str]) -> None:
        super().__init__('; '.join(problems))
        self.problems = tuple(problems)


class Experiment(enum.Enum):
    """What a scenario runs."""
    MAP = 'map'
    SENSITIVITY = 'sensitivity'
    DR_RAMP = 'dr-ramp'
    DYNAMIC_RANGE = 'dynamic-range'
    SPECTROGRAM = 'spectrogram'
    NOISE_SPECTRUM = 'noise-spectrum'
    FILTER_FUNCTION = 'filter-function'
    TRACE = 'trace'
    BASELINE = 'baseline'
    EXPORT_PROGRAM = 'export-program'


@dataclasses.dataclass(frozen=True)
class SpinConfig:
    """Drive and spin parameters.

    Attributes:
        rabi_rad_s: Rabi rate Ω₋, in rad/s.
        detuning_rad_s: Drive detuning δ₋ of programs built by
            build_program(), in rad/s.
        gamma_nv_rad_s_t: Gyromagnetic ratio, in rad/s/T.
    """
    rabi_rad_s: float = DEFAULT_RABI
    detuning_rad_s: float = 0.0
    gamma_nv_rad_s_t: float = rotation.GAMMA_NV


@dataclasses.dataclass(frozen=True)
class SequenceConfig:
    """Pulse program parameters and the grids swept over them.

    Attributes:
        kind: Family of the program built by build_program().
        n_units: Number N of units per half.
        phi_rad: Unit phase φ.
        phi_grid_rad: Unit phases of map and sensitivity sweeps.
        f_s_hz: Modulation frequency of a single modulated program.
        f_s_grid_hz: Modulation frequencies of spectrogram columns.
        beta_k: Sensitivity amplitude of a single modulated program.
        beta_k_steps: Number K of β_k steps of ramps and spectrograms.
        window: Envelope of the sensitivity schedule.
        strict_bandwidth: Whether out-of-band modulation frequencies are
            rejected rather than only logged.
        tau_s: Hahn echo free evolution time, or XY8 spacing.
        tau_grid_s: Spacings of baseline comparison columns.
        repetitions: Number M of XY8 blocks.
        final_pi_half: Whether a Hahn echo closes with a π/2 pulse.
        baseline_kinds: Sequence of every baseline comparison row.
    """
    kind: pulse.SequenceKind = pulse.SequenceKind.DYSCO
    n_units: int = 40
    phi_rad: float = math.pi / 2
    phi_grid_rad: Tuple[float, ...] = ()
    f_s_hz: float = 0.0
    f_s_grid_hz: Tuple[float, ...] = ()
    beta_k: float = 1.0
    beta_k_steps: int = 20
    window: pulse.Window = pulse.Window.RECTANGULAR
    strict_bandwidth: bool = True
    tau_s: float = 1e-6
    tau_grid_s: Tuple[float, ...] = ()
    repetitions: int = 4
    final_pi_half: bool = True
    baseline_kinds: Tuple[pulse.SequenceKind, ...] = BASELINE_KINDS


@dataclasses.dataclass(frozen=True)
class FieldConfig:
    """Tone amplitudes swept by map, sensitivity and ramp experiments.

    Attributes:
        b_rf_t: Single field, used by dr-ramp when b_rf_grid_t is empty.
        b_rf_grid_t: Field grid.
        max_fraction: Largest |γ_NV·B|/Ω₋ of the dynamic-range experiment.
        samples: Fields per row of the dynamic-range experiment.
    """
    b_rf_t: float = 0.0
    b_rf_grid_t: Tuple[float, ...] = ()
    max_fraction: float = sweep.HARMONIC_FRACTION
    samples: int = 256


@dataclasses.dataclass(frozen=True)
class ToneConfig:
    amplitude_t: float
    frequency_hz: float
    phase_rad: float = 0.0

    def build(self) -> waveform_lib.Tone:
        return waveform_lib.Tone(self.amplitude_t, self.frequency_hz,
                                 self.phase_rad)


@dataclasses.dataclass(frozen=True)
class CoupledSpinConfig:
    offset_hz: float
    amplitude_t: float

    def build(self) -> waveform_lib.CoupledSpin:
        return waveform_lib.CoupledSpin(self.offset_hz, self.amplitude_t)


@dataclasses.dataclass(frozen=True)
class BathConfig:
    """See waveform.BathSurrogate."""
    larmor_center_hz: float
    larmor_spread_hz: float = 10e3
    n_oscillators: int = 32
    rms_amplitude_t: float = 0.0
    coupled_spins: Tuple[CoupledSpinConfig, ...] = ()

    def build(self) -> waveform_lib.BathSurrogate:
        return waveform_lib.BathSurrogate(
            larmor_center=self.larmor_center_hz,
            larmor_spread=self.larmor_spread_hz,
            n_oscillators=self.n_oscillators,
            rms_amplitude=self.rms_amplitude_t,
            coupled_spins=tuple(spin.build() for spin in self.coupled_spins),
        )


@dataclasses.dataclass(frozen=True)
class WaveformConfig:
    tones: Tuple[ToneConfig, ...] = ()
    bath: Optional[BathConfig] = None
    shot_phase_mode: waveform_lib.ShotPhaseMode = (
        waveform_lib.ShotPhaseMode.FIXED)

    def build(self) -> waveform_lib.Waveform:
        return waveform_lib.Waveform(
            tones=tuple(tone.build() for tone in self.tones),
            bath=None if self.bath is None else self.bath.build(),
            shot_phase_mode=self.shot_phase_mode,
        )


@dataclasses.dataclass(frozen=True)
class EnvelopeConfig:
    tau_s: float = state_lib.T_DYSCO
    exponent: float = 1.0

    def build(self) -> state_lib.Envelope:
        return state_lib.Envelope(tau=self.tau_s, exponent=self.exponent)


@dataclasses.dataclass(frozen=True)
class ScenarioConfig:
    """A complete, validated scenario.

    Attributes:
        experiment: What to run.
        spin: Drive and spin parameters.
        sequence: Program parameters and grids.
        field: Field grids.
        waveform: External field of tone, trace, spectrogram and baseline
            experiments.
        initial_state: State every run starts in.
        shots: Shots per cell, or None for the experiment's default.
        seed: Base seed of all random draws.
        substeps: Substeps per pulse.
        threads: Worker threads for independent cells.
        envelope: Contrast envelope, or None for ideal contrast.
        frequency_grid_hz: Frequencies of the filter-function experiment;
            empty for a grid derived from the program length.
        output: Where results go; None or '-' for stdout.
    """
    experiment: Experiment
    spin: SpinConfig = SpinConfig()
    sequence: SequenceConfig = SequenceConfig()
    field: FieldConfig = FieldConfig()
    waveform: WaveformConfig = WaveformConfig()
    initial_state: state_lib.InitialState = state_lib.InitialState.GROUND
    shots: Optional[int] = None
    seed: int = 0
    substeps: int = propagator.DEFAULT_SUBSTEPS
    threads: int = 1
    envelope: Optional[EnvelopeConfig] = None
    frequency_grid_hz: Tuple[float, ...] = ()
    output: Optional[str] = None


class _Reader:
    """Typed access to one JSON object that collects problems."""

    def __init__(self, data: Any, path: str, problems: List[str]) -> None:
        self._path = path
        self._problems = problems
        self._read = set()
        if isinstance(data, dict):
            self._data = data
        else:
            self._data = {}
            problems.append(f'{path or "config"}: must be an object')

    def key(self, name: str) -> str:
        return f'{self._path}.{name}' if self._path else name

    def fail(self, name: str, message: str) -> None:
        self._problems.append(f'{self.key(name)}: {message}')

    def has(self, name: str) -> bool:
        return name in self._data

    def _get(self, name: str) -> Any:
        self._read.add(name)
        return self._data.get(name)

    def _number(self, name: str, value: Any, *, integer: bool) -> Any:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            self.fail(name, f'must be a number, got {value!r}')
            return None
        if not math.isfinite(value):
            self.fail(name, f'must be finite, got {value!r}')
            return None
        if integer:
            if isinstance(value, float) and not value.is_integer():
                self.fail(name, f'must be an integer, got {value!r}')
                return None
            return int(value)
        return float(value)

    def _in_range(self,
                  name: str,
                  value: Any,
                  *,
                  minimum: Any = None,
                  maximum: Any = None,
                  positive: bool = False) -> bool:
        if positive and not value > 0:
            self.fail(name, f'must be positive, got {value!r}')
        elif minimum is not None and value < minimum:
            self.fail(name, f'must be at least {minimum!r}, got {value!r}')
        elif maximum is not None and value > maximum:
            self.fail(name, f'must be at most {maximum!r}, got {value!r}')
        else:
            return True
        return False

    def number(self,
               name: str,
               default: Any,
               *,
               integer: bool = False,
               **limits: Any) -> Any:
        if not self.has(name):
            self._read.add(name)
            return default
        value = self._number(name, self._get(name), integer=integer)
        if value is None or not self._in_range(name, value, **limits):
            return default
        return value

    def required(self, name: str, **limits: Any) -> float:
        if not self.has(name):
            self._read.add(name)
            self.fail(name, 'is required')
            return 0.0
        return self.number(name, 0.0, **limits)

    def boolean(self, name: str, default: bool) -> bool:
        if not self.has(name):
            self._read.add(name)
            return default
        value = self._get(name)
        if not isinstance(value, bool):
            self.fail(name, f'must be true or false, got {value!r}')
            return default
        return value

    def string(self, name: str, default: Optional[str]) -> Optional[str]:
        if not self.has(name):
            self._read.add(name)
            return default
        value = self._get(name)
        if not isinstance(value, str):
            self.fail(name, f'must be a string, got {value!r}')
            return default
        return value

    def _enum(self, name: str, value: Any, enum_type: Type[_E]) -> Optional[_E]:
        options = [member.value for member in enum_type]
        if value not in options:
            self.fail(
                name,
                f'must be one of {", ".join(options)}, got {value!r}')
            return None
        return enum_type(value)

    def choice(self, name: str, enum_type: Type[_E], default: Any) -> Any:
        if not self.has(name):
            self._read.add(name)
            return default
        value = self._enum(name, self._get(name), enum_type)
        return default if value is None else value

    def choices(self, name: str, enum_type: Type[_E],
                default: Tuple[_E, ...]) -> Tuple[_E, ...]:
        if not self.has(name):
            self._read.add(name)
            return default
        values = self._get(name)
        if not isinstance(values, list):
            self.fail(name, f'must be a list, got {values!r}')
            return default
        members = [
            self._enum(f'{name}[{index}]', value, enum_type)
            for index, value in enumerate(values)
        ]
        if None in members:
            return default
        return tuple(members)

    def grid(self, name: str, **limits: Any) -> Tuple[float, ...]:
        """Reads a list of numbers or a {start, stop, count} range."""
        if not self.has(name):
            self._read.add(name)
            return ()
        value = self._get(name)
        if isinstance(value, dict):
            spec = _Reader(value, self.key(name), self._problems)
            start = spec.required('start')
            stop = spec.required('stop')
            count = spec.number('count', None, integer=True, minimum=1)
            if not spec.has('count'):
                spec.fail('count', 'is required')
            spec.finish()
            if count is None:
                return ()
            values = np.linspace(start, stop, count).tolist()
        elif isinstance(value, list):
            values = [
                self._number(f'{name}[{index}]', item, integer=False)
                for index, item in enumerate(value)
            ]
            if None in values:
                return ()
        else:
            self.fail(
                name, 'must be a list or an object with start, stop and count')
            return ()
        for index, item in enumerate(values):
            if not self._in_range(f'{name}[{index}]', item, **limits):
                return ()
        return tuple(float(item) for item in values)

    def block(self, name: str) -> Optional['_Reader']:
        if not self.has(name):
            self._read.add(name)
            return None
        return _Reader(self._get(name), self.key(name), self._problems)

    def blocks(self, name: str) -> List['_Reader']:
        if not self.has(name):
            self._read.add(name)
            return []
        values = self._get(name)
        if not isinstance(values, list):
            self.fail(name, f'must be a list, got {values!r}')
            return []
        return [
            _Reader(value, f'{self.key(name)}[{index}]', self._problems)
            for index, value in enumerate(values)
        ]

    def finish(self) -> None:
        """Reports every key nothing read."""
        for name in sorted(set(self._data) - self._read):
            self.fail(name, 'unknown key')


def _read_spin(reader: Optional[_Reader]) -> SpinConfig:
    default = SpinConfig()
    if reader is None:
        return default
    config = SpinConfig(
        rabi_rad_s=reader.number('rabi_rad_s',
                                 default.rabi_rad_s,
                                 positive=True),
        detuning_rad_s=reader.number('detuning_rad_s',
                                     default.detuning_rad_s),
        gamma_nv_rad_s_t=reader.number('gamma_nv_rad_s_t',
                                       default.gamma_nv_rad_s_t),
    )
    reader.finish()
    return config


def _read_sequence(reader: Optional[_Reader]) -> SequenceConfig:
    default = SequenceConfig()
    if reader is None:
        return default
    config = SequenceConfig(
        kind=reader.choice('kind', pulse.SequenceKind, default.kind),
        n_units=reader.number('n_units',
                              default.n_units,
                              integer=True,
                              minimum=1),
        phi_rad=reader.number('phi_rad', default.phi_rad),
        phi_grid_rad=reader.grid('phi_grid_rad'),
        f_s_hz=reader.number('f_s_hz', default.f_s_hz, minimum=0),
        f_s_grid_hz=reader.grid('f_s_grid_hz', minimum=0),
        beta_k=reader.number('beta_k', default.beta_k, minimum=0, maximum=1),
        beta_k_steps=reader.number('beta_k_steps',
                                   default.beta_k_steps,
                                   integer=True,
                                   minimum=1),
        window=reader.choice('window', pulse.Window, default.window),
        strict_bandwidth=reader.boolean('strict_bandwidth',
                                        default.strict_bandwidth),
        tau_s=reader.number('tau_s', default.tau_s, positive=True),
        tau_grid_s=reader.grid('tau_grid_s', positive=True),
        repetitions=reader.number('repetitions',
                                  default.repetitions,
                                  integer=True,
                                  minimum=1),
        final_pi_half=reader.boolean('final_pi_half', default.final_pi_half),
        baseline_kinds=reader.choices('baseline_kinds', pulse.SequenceKind,
                                      default.baseline_kinds),
    )
    reader.finish()
    return config


def _read_field(reader: Optional[_Reader]) -> FieldConfig:
    default = FieldConfig()
    if reader is None:
        return default
    config = FieldConfig(
        b_rf_t=reader.number('b_rf_t', default.b_rf_t),
        b_rf_grid_t=reader.grid('b_rf_grid_t'),
        max_fraction=reader.number('max_fraction',
                                   default.max_fraction,
                                   positive=True),
        samples=reader.number('samples',
                              default.samples,
                              integer=True,
                              minimum=2),
    )
    reader.finish()
    return config


def _read_tone(reader: _Reader) -> ToneConfig:
    config = ToneConfig(
        amplitude_t=reader.required('amplitude_t', minimum=0),
        frequency_hz=reader.required('frequency_hz', minimum=0),
        phase_rad=reader.number('phase_rad', 0.0),
    )
    reader.finish()
    return config


def _read_coupled_spin(reader: _Reader) -> CoupledSpinConfig:
    config = CoupledSpinConfig(
        offset_hz=reader.required('offset_hz'),
        amplitude_t=reader.required('amplitude_t', minimum=0),
    )
    reader.finish()
    return config


def _read_bath(reader: Optional[_Reader]) -> Optional[BathConfig]:
    if reader is None:
        return None
    config = BathConfig(
        larmor_center_hz=reader.required('larmor_center_hz', minimum=0),
        larmor_spread_hz=reader.number('larmor_spread_hz', 10e3, minimum=0),
        n_oscillators=reader.number('n_oscillators',
                                    32,
                                    integer=True,
                                    minimum=1),
        rms_amplitude_t=reader.number('rms_amplitude_t', 0.0, minimum=0),
        coupled_spins=tuple(
            map(_read_coupled_spin, reader.blocks('coupled_spins'))),
    )
    reader.finish()
    return config


def _read_waveform(reader: Optional[_Reader]) -> WaveformConfig:
    default = WaveformConfig()
    if reader is None:
        return default
    config = WaveformConfig(
        tones=tuple(map(_read_tone, reader.blocks('tones'))),
        bath=_read_bath(reader.block('bath')),
        shot_phase_mode=reader.choice('shot_phase_mode',
                                      waveform_lib.ShotPhaseMode,
                                      default.shot_phase_mode),
    )
    reader.finish()
    return config


def _read_envelope(reader: Optional[_Reader]) -> Optional[EnvelopeConfig]:
    if reader is None:
        return None
    default = EnvelopeConfig()
    config = EnvelopeConfig(
        tau_s=reader.number('tau_s', default.tau_s, positive=True),
        exponent=reader.number('exponent', default.exponent, positive=True),
    )
    reader.finish()
    return config


def _read_scenario(reader: _Reader) -> ScenarioConfig:
    default = ScenarioConfig(Experiment.MAP)
    if not reader.has('experiment'):
        reader.fail('experiment', 'is required')
    config = ScenarioConfig(
        experiment=reader.choice('experiment', Experiment, Experiment.MAP),
        spin=_read_spin(reader.block('spin')),
        sequence=_read_sequence(reader.block('sequence')),
        field=_read_field(reader.block('field')),
        waveform=_read_waveform(reader.block('waveform')),
        initial_state=reader.choice('initial_state', state_lib.InitialState,
                                    default.initial_state),
        shots=reader.number('shots', None, integer=True, minimum=1),
        seed=reader.number('seed',
                           default.seed,
                           integer=True,
                           minimum=0,
                           maximum=_MAX_SEED),
        substeps=reader.number('substeps',
                               default.substeps,
                               integer=True,
                               minimum=1),
        threads=reader.number('threads',
                              default.threads,
                              integer=True,
                              minimum=1),
        envelope=_read_envelope(reader.block('envelope')),
        frequency_grid_hz=reader.grid('frequency_grid_hz', minimum=0),
        output=reader.string('output', None),
    )
    reader.finish()
    return config


def _check_bandwidth(key: str, frequencies: Sequence[float],
                     sequence: SequenceConfig, rabi: float,
                     problems: List[str]) -> None:
    lower, upper = dysco.bandwidth_limits(sequence.n_units, rabi)
    for frequency in frequencies:
        if frequency > upper:
            problems.append(f'{key}: {frequency!r} Hz exceeds the bandwidth '
                            f'limit Ω₋/9π = {upper:.6g} Hz')
        elif 0 < frequency < lower:
            problems.append(f'{key}: {frequency!r} Hz is below the resolution '
                            f'limit 1/t_N = {lower:.6g} Hz')


def _check_scenario(config: ScenarioConfig, problems: List[str]) -> None:
    """Checks constraints between keys and per-experiment requirements."""
    experiment = config.experiment
    sequence = config.sequence
    rabi = config.spin.rabi_rad_s

    def require(key: str, values: Sequence[Any]) -> None:
        if not values:
            problems.append(f'{key}: is required for {experiment.value}')

    if experiment in (Experiment.MAP, Experiment.SENSITIVITY):
        require('sequence.phi_grid_rad', sequence.phi_grid_rad)
        require('field.b_rf_grid_t', config.field.b_rf_grid_t)
    if experiment is Experiment.SENSITIVITY and config.field.b_rf_grid_t:
        limit = sweep.HARMONIC_FRACTION * rabi / abs(
            config.spin.gamma_nv_rad_s_t)
        if max(map(abs, config.field.b_rf_grid_t)) > limit:
            problems.append(f'field.b_rf_grid_t: |γ·B| must stay within '
                            f'Ω₋/4, i.e. |B| ≤ {limit:.6g} T')
    if experiment is Experiment.DYNAMIC_RANGE and sequence.n_units < 2:
        problems.append('sequence.n_units: must be at least 2 for '
                        'dynamic-range')
    if experiment in (Experiment.SPECTROGRAM, Experiment.NOISE_SPECTRUM):
        require('sequence.f_s_grid_hz', sequence.f_s_grid_hz)
        if sequence.strict_bandwidth:
            _check_bandwidth('sequence.f_s_grid_hz', sequence.f_s_grid_hz,
                             sequence, rabi, problems)
        random_shots = (experiment is Experiment.NOISE_SPECTRUM or
                        not config.waveform.build().is_deterministic)
        if (random_shots and config.shots is not None and
                config.shots < spectrogram.MIN_ASYNCHRONOUS_SHOTS):
            problems.append(
                f'shots: random waveforms need at least '
                f'{spectrogram.MIN_ASYNCHRONOUS_SHOTS}, got {config.shots}')
    if experiment is Experiment.NOISE_SPECTRUM and config.waveform.bath is None:
        problems.append('waveform.bath: is required for noise-spectrum')
    if experiment is Experiment.BASELINE:
        require('sequence.tau_grid_s', sequence.tau_grid_s)
        require('sequence.baseline_kinds', sequence.baseline_kinds)
        for kind in sequence.baseline_kinds:
            if kind not in BASELINE_KINDS:
                problems.append(f'sequence.baseline_kinds: {kind.value!r} is '
                                f'not a baseline sequence')
    if experiment in (Experiment.TRACE, Experiment.FILTER_FUNCTION,
                      Experiment.EXPORT_PROGRAM):
        if sequence.kind is pulse.SequenceKind.CUSTOM:
            problems.append('sequence.kind: custom programs cannot be built '
                            'from a config')
        if (sequence.kind is pulse.SequenceKind.DYSCO_MODULATED and
                sequence.strict_bandwidth):
            _check_bandwidth('sequence.f_s_hz', (sequence.f_s_hz,), sequence,
                             rabi, problems)


def _apply_overrides(data: Any, overrides: Mapping[str, Any]) -> Any:
    if not isinstance(data, dict):
        return data
    data = copy.deepcopy(data)
    for dotted, value in overrides.items():
        *parents, name = dotted.split('.')
        target = data
        for parent in parents:
            target = target.setdefault(parent, {})
            if not isinstance(target, dict):
                break
        else:
            target[name] = value
    return data


def parse_config(
        text: str,
        *,
        overrides: Optional[Mapping[str, Any]] = None,
) -> ScenarioConfig:
    """Parses and validates a scenario.

    Args:
        text: JSON text of the scenario.
        overrides: Values replacing those of the text, keyed by dotted path,
            e.g. {'sequence.n_units': 50}.

    Raises:
        ConfigError: Malformed JSON, with its line and column, or every
            invalid, missing or unknown key.
    """
    try:
        data = json.loads(text)
    except json.JSONDecodeError as error:
        raise ConfigError([
            f'line {error.lineno}, column {error.colno}: {error.msg}'
        ]) from error
    data = _apply_overrides(data, overrides or {})
    problems = []
    config = _read_scenario(_Reader(data, '', problems))
    if not problems:
        _check_scenario(config, problems)
    if problems:
        raise ConfigError(problems)
    return config


def _to_json(value: Any) -> Any:
    if dataclasses.is_dataclass(value):
        return {
            field.name: _to_json(getattr(value, field.name))
            for field in dataclasses.fields(value)
            if getattr(value, field.name) is not None
        }
    if isinstance(value, enum.Enum):
        return value.value
    if isinstance(value, tuple):
        return [_to_json(item) for item in value]
    return value


def emit_config(config: ScenarioConfig) -> str:
    """Returns canonical JSON that parse_config() reads back unchanged."""
    return json.dumps(_to_json(config),
                      ensure_ascii=False,
                      indent=2,
                      sort_keys=True) + '\n'


def config_token(config: ScenarioConfig) -> str:
    """Returns a token identifying the canonical form of a scenario.

    Where the results are written and how many threads compute them do not
    change the results, so neither is part of the token.
    """
    scenario = dataclasses.replace(config, output=None, threads=1)
    digest = hashlib.sha256(emit_config(scenario).encode('utf-8')).hexdigest()
    return f'{TOKEN_TYPE}/{TOKEN_VERSION}:{digest}'


def build_program(config: ScenarioConfig) -> pulse.PulseProgram:
    """Builds the single program a scenario's sequence describes.

    Raises:
        ConfigError: The sequence kind cannot be built from parameters.
        InvalidArgumentError: Parameters the builders reject.
    """
    sequence = config.sequence
    rabi = config.spin.rabi_rad_s
    if sequence.kind is pulse.SequenceKind.DYSCO:
        program = dysco.build_dysco(sequence.n_units, sequence.phi_rad, rabi)
    elif sequence.kind is pulse.SequenceKind.DYSCO_MODULATED:
        program = dysco.build_dysco_modulated(
            sequence.n_units,
            sequence.f_s_hz,
            sequence.beta_k,
            sequence.window,
            rabi,
            strict_bandwidth=sequence.strict_bandwidth)
    elif sequence.kind is pulse.SequenceKind.HAHN_ECHO:
        program = baseline.build_hahn_echo(
            sequence.tau_s, rabi, final_pi_half=sequence.final_pi_half)
    elif sequence.kind is pulse.SequenceKind.XY8:
        program = baseline.build_xy8(sequence.repetitions, sequence.tau_s,
                                     rabi)
    else:
        raise ConfigError([
            f'sequence.kind: {sequence.kind.value!r} programs cannot be built '
            f'from a config'
        ])
    detuning = config.spin.detuning_rad_s
    if detuning:
        program = dataclasses.replace(program,
                                      pulses=tuple(
                                          dataclasses.replace(
                                              segment, detuning=detuning)
                                          for segment in program.pulses))
    return program


def run_options(
        config: ScenarioConfig,
        bus: Optional[progress.ProgressBus] = None) -> monte_carlo.RunOptions:
    return monte_carlo.RunOptions(
        substeps=config.substeps,
        gamma_nv=config.spin.gamma_nv_rad_s_t,
        initial=config.initial_state,
        envelope=(None if config.envelope is None else
                  config.envelope.build()),
        threads=config.threads,
        bus=bus,
    )
