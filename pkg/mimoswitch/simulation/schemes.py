"""
schemes.py

Registry of relaying schemes that a sweep can compare. Every scheme maps a
channel, a switch pattern and noise parameters to a SchemeOutcome, so the
sweep treats closed forms, heuristics, relaxation solvers and bounds alike.

Scheme specs are written as a registered name with an optional parameter
suffix, e.g. "random_phase:trials=100,bins=8".
"""

import dataclasses
import numpy as np
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Tuple
import logging

from mimoswitch.core.model import (
    ChannelRealization,
    NoiseParams,
    SolveOutcome,
    SwitchSpec,
    compute_S,
    make_outcome,
)
from mimoswitch.errors import ConfigError, NumericalError, PairingError, UnknownSchemeError
from mimoswitch.optimization import eqsnr, maxmin

# Set up logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverSettings:
    """Solver configuration shared by every scheme in a sweep."""

    phase_search: eqsnr.PhaseSearchConfig = field(default_factory=eqsnr.PhaseSearchConfig)
    eps_search: eqsnr.EpsSearchConfig = field(default_factory=eqsnr.EpsSearchConfig)
    sdr: maxmin.SdrConfig = field(default_factory=maxmin.SdrConfig)
    iterative: maxmin.IterativeConfig = field(default_factory=maxmin.IterativeConfig)
    b_grid: Tuple[float, ...] = tuple(float(x) for x in eqsnr.DEFAULT_B_GRID)
    per_element_phase: bool = False
    magnitude_points: int = 200
    phase_points: int = 64

    def with_seed(self, seed: int) -> 'SolverSettings':
        """Same settings with every randomized solver seeded by seed."""
        return dataclasses.replace(
            self,
            phase_search=dataclasses.replace(self.phase_search, seed=seed),
            sdr=dataclasses.replace(self.sdr, seed=seed),
        )


@dataclass(frozen=True)
class SchemeOutcome:
    """What a sweep records for one scheme on one channel."""

    worst_throughput: float
    mean_throughput: float
    worst_epsilon: float
    power_used: float
    outcome: Optional[SolveOutcome] = None

    @classmethod
    def from_outcome(cls, outcome: SolveOutcome) -> 'SchemeOutcome':
        return cls(
            worst_throughput=outcome.worst_throughput,
            mean_throughput=outcome.mean_throughput,
            worst_epsilon=outcome.worst_epsilon,
            power_used=outcome.power_used,
            outcome=outcome,
        )

    @classmethod
    def from_bound(cls, bound: float) -> 'SchemeOutcome':
        return cls(worst_throughput=bound, mean_throughput=bound,
                   worst_epsilon=float('nan'), power_used=float('nan'))


def basic_scheme(ch: ChannelRealization, sw: SwitchSpec, np_: NoiseParams) -> SolveOutcome:
    """
    Benchmark design A = β·I with β chosen so the relay uses power p.

    Raises:
        NumericalError: If the all-ones gain vector carries no relay power
    """
    ones = np.ones(sw.n)
    total = float(np.real(ones @ compute_S(ch, sw.with_pnc(False), np_) @ ones))
    if not total > 0:
        raise NumericalError(f"All-ones gain vector has relay power {total}")
    beta = np.sqrt(np_.p / total)
    return make_outcome(ch, sw.with_pnc(False), np_, beta * ones, None, {'beta': beta})


SchemeFunction = Callable[[ChannelRealization, SwitchSpec, NoiseParams, SolverSettings], SchemeOutcome]


@dataclass(frozen=True)
class SchemeEntry:
    """A registered scheme and the constraints it places on the setup."""

    name: str
    run: SchemeFunction
    description: str
    pnc: bool = False
    needs_pairs: bool = False
    stations: Optional[int] = None
    params: Tuple[str, ...] = ()


def _run_basic(ch, sw, np_, settings):
    return SchemeOutcome.from_outcome(basic_scheme(ch, sw, np_))


def _run_closed_form(ch, sw, np_, settings):
    return SchemeOutcome.from_outcome(eqsnr.closed_form_two_station(ch, sw, np_, settings.eps_search))


def _run_opposite_phase(ch, sw, np_, settings):
    return SchemeOutcome.from_outcome(eqsnr.opposite_phase(ch, sw, np_, settings.eps_search))


def _run_random_phase(ch, sw, np_, settings):
    return SchemeOutcome.from_outcome(
        eqsnr.random_phase(ch, sw, np_, settings.phase_search, None, settings.eps_search))


def _run_pnc_phase_aligned(ch, sw, np_, settings):
    return SchemeOutcome.from_outcome(eqsnr.pnc_phase_aligned(ch, sw, np_, settings.eps_search))


def _run_pnc_identical_b(ch, sw, np_, settings):
    return SchemeOutcome.from_outcome(eqsnr.pnc_identical_b(
        ch, sw, np_, settings.phase_search, settings.b_grid, settings.per_element_phase, settings.eps_search))


def _run_maxmin_sdr(ch, sw, np_, settings):
    return SchemeOutcome.from_outcome(maxmin.maxmin_solve(ch, sw, np_, settings.sdr))


def _run_maxmin_exhaustive(ch, sw, np_, settings):
    return SchemeOutcome.from_outcome(
        maxmin.maxmin_exhaustive_2(ch, sw, np_, settings.magnitude_points, settings.phase_points))


def _run_sdr_upper(ch, sw, np_, settings):
    return SchemeOutcome.from_bound(maxmin.sdr_upper_bound(ch, sw, np_, settings.sdr))


def _run_pnc_maxmin_sdr(ch, sw, np_, settings):
    return SchemeOutcome.from_outcome(maxmin.pnc_maxmin_iterate(ch, sw, np_, settings.iterative, settings.sdr))


_PHASE_PARAMS = ('trials', 'bins')
_SDR_PARAMS = ('samples', 'eps_tolerance')

SCHEMES: Dict[str, SchemeEntry] = {entry.name: entry for entry in (
    SchemeEntry('basic', _run_basic, 'Scalar gain A = β·I'),
    SchemeEntry('closed_form', _run_closed_form, 'Two-station equal-SNR optimum', needs_pairs=True, stations=2),
    SchemeEntry('opposite_phase', _run_opposite_phase, 'Equal-SNR, opposite signs per pair', needs_pairs=True),
    SchemeEntry('random_phase', _run_random_phase, 'Equal-SNR, best of L random phase vectors',
                params=_PHASE_PARAMS),
    SchemeEntry('pnc_phase_aligned', _run_pnc_phase_aligned, 'Network-coded equal-SNR, aligned phases',
                pnc=True, needs_pairs=True),
    SchemeEntry('pnc_identical_b', _run_pnc_identical_b, 'Network-coded equal-SNR, B = bI with random phases',
                pnc=True, params=_PHASE_PARAMS + ('per_element_phase',)),
    SchemeEntry('maxmin_sdr', _run_maxmin_sdr, 'Maxmin by relaxation and randomization', params=_SDR_PARAMS),
    SchemeEntry('maxmin_exhaustive', _run_maxmin_exhaustive, 'Maxmin grid reference', stations=2,
                params=('magnitude_points', 'phase_points')),
    SchemeEntry('sdr_upper', _run_sdr_upper, 'Relaxation bound on maxmin throughput', params=('eps_tolerance',)),
    SchemeEntry('pnc_maxmin_sdr', _run_pnc_maxmin_sdr, 'Network-coded maxmin by alternating a and b',
                pnc=True, params=_SDR_PARAMS + ('init', 'max_alternations')),
)}


@dataclass(frozen=True)
class SchemeSpec:
    """A registered scheme name with parameter overrides."""

    name: str
    params: Tuple[Tuple[str, str], ...] = ()

    @property
    def label(self) -> str:
        if not self.params:
            return self.name
        return self.name + ':' + ','.join(f"{key}={value}" for key, value in self.params)

    @property
    def entry(self) -> SchemeEntry:
        return SCHEMES[self.name]


def parse_scheme_spec(text: str) -> SchemeSpec:
    """
    Parse "name" or "name:key=value,key=value".

    Raises:
        UnknownSchemeError: If the name is not registered
        ConfigError: If a parameter is malformed or not accepted by the scheme
    """
    name, _, suffix = text.strip().partition(':')
    name = name.strip()
    if name not in SCHEMES:
        raise UnknownSchemeError(name, list(SCHEMES))

    params = []
    for item in filter(None, (part.strip() for part in suffix.split(','))):
        key, sep, value = item.partition('=')
        key, value = key.strip(), value.strip()
        if not sep or not key or not value:
            raise ConfigError(f"Malformed scheme parameter '{item}' in '{text}'")
        if key not in SCHEMES[name].params:
            raise ConfigError(
                f"Scheme '{name}' does not accept '{key}'; accepted: {list(SCHEMES[name].params) or 'none'}")
        params.append((key, value))

    spec = SchemeSpec(name, tuple(params))
    _apply_params(spec, SolverSettings())
    return spec


def _parse_bool(value: str) -> bool:
    lowered = value.lower()
    if lowered in ('1', 'true', 'yes'):
        return True
    if lowered in ('0', 'false', 'no'):
        return False
    raise ValueError(f"not a boolean: {value}")


def _apply_params(spec: SchemeSpec, settings: SolverSettings) -> SolverSettings:
    """Settings with the scheme parameters applied."""
    phase, sdr, iterative = {}, {}, {}
    top = {}
    try:
        for key, value in spec.params:
            if key in ('trials', 'bins'):
                phase[key] = int(value)
            elif key == 'samples':
                sdr[key] = int(value)
            elif key == 'eps_tolerance':
                sdr[key] = float(value)
            elif key == 'max_alternations':
                iterative[key] = int(value)
            elif key == 'init':
                iterative[key] = value
            elif key == 'per_element_phase':
                top[key] = _parse_bool(value)
            elif key in ('magnitude_points', 'phase_points'):
                top[key] = int(value)
        return dataclasses.replace(
            settings,
            phase_search=dataclasses.replace(settings.phase_search, **phase),
            sdr=dataclasses.replace(settings.sdr, **sdr),
            iterative=dataclasses.replace(settings.iterative, **iterative),
            **top,
        )
    except ValueError as e:
        raise ConfigError(f"Invalid parameters for scheme '{spec.label}': {str(e)}") from e


def check_compatible(spec: SchemeSpec, sw: SwitchSpec) -> None:
    """
    Reject scheme/pattern combinations that cannot run.

    Raises:
        PairingError: If the scheme needs a pairwise pattern and sw is not one
        ConfigError: If the scheme is tied to another number of stations
    """
    entry = spec.entry
    if entry.stations is not None and entry.stations != sw.n:
        raise ConfigError(f"Scheme '{spec.name}' needs N = {entry.stations}, got N = {sw.n}")
    if entry.needs_pairs and not sw.is_pairwise:
        raise PairingError(
            f"Scheme '{spec.name}' needs a pairwise switch pattern (stations exchanging in pairs)")


def run_scheme(spec: SchemeSpec, ch: ChannelRealization, sw: SwitchSpec, np_: NoiseParams,
               settings: SolverSettings, seed: int) -> SchemeOutcome:
    """
    Run one scheme on one channel.

    Args:
        spec (SchemeSpec): Scheme and overrides
        ch (ChannelRealization): Channel
        sw (SwitchSpec): Switch pattern (the network-coding flag is set per scheme)
        np_ (NoiseParams): Noise parameters
        settings (SolverSettings): Base solver settings
        seed (int): Seed for randomized solvers

    Returns:
        SchemeOutcome: Throughput, noise and power of the design
    """
    check_compatible(spec, sw)
    effective = _apply_params(spec, settings.with_seed(seed))
    return spec.entry.run(ch, sw.with_pnc(spec.entry.pnc), np_, effective)
