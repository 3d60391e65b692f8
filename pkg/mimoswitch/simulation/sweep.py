"""
sweep.py

Monte Carlo SNR sweeps:
1. Draw channel realizations from seeds derived from the master seed
2. Run every scheme at every SNR point on the same channels
3. Aggregate per-channel samples into mean worst-station throughput with
   standard errors, counting rejected channels and failed solves

Channel c is drawn from derive_seed(master, CHANNEL_STREAM, c) and reused
across schemes and SNR points. Randomized solvers get
derive_seed(master, SOLVER_STREAM, crc32(scheme), snr index, c).
"""

import dataclasses
import hashlib
import json
import os
import zlib
import numpy as np
import pandas as pd
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple
import logging

from mimoswitch.core.model import NoiseParams, SwitchSpec, sample_channel
from mimoswitch.core.numerics import DEFAULT_CONDITION_CAP
from mimoswitch.errors import ConfigError, NumericalError
from mimoswitch.simulation.schemes import (
    SchemeSpec,
    SolverSettings,
    check_compatible,
    parse_scheme_spec,
    run_scheme,
)

# Set up logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

CHANNEL_STREAM = 0
SOLVER_STREAM = 1

PATTERN_ALIASES = {
    'pairwise': 'pairwise',
    'pairwise_symmetric': 'pairwise',
    'nonpairwise': 'nonpairwise',
    'non_pairwise': 'nonpairwise',
    'non_pairwise_asymmetric': 'nonpairwise',
}

SAMPLE_COLUMNS = ['scheme', 'snr_db', 'snr_index', 'channel', 'worst_tput', 'mean_tput',
                  'worst_eps', 'power', 'rejections', 'failed']
SUMMARY_COLUMNS = ['scheme', 'snr_db', 'mean_tput', 'stderr', 'channels', 'rejected']


@dataclass(frozen=True)
class SimConfig:
    """
    One Monte Carlo experiment.

    Attributes:
        n (int): Number of stations
        pattern (str): 'pairwise' or 'nonpairwise'
        snr_points_db (tuple): SNR grid in dB
        channels (int): Channel realizations per SNR point
        schemes (tuple): Scheme specs, e.g. 'random_phase:trials=100'
        seed (int): Master seed
        settings (SolverSettings): Solver configuration
        cond_cap (float): Condition-number cap for channel draws
        threads (Optional[int]): Worker processes (None: all cores)
        p (float): Relay power budget
    """

    n: int = 2
    pattern: str = 'pairwise'
    snr_points_db: Tuple[float, ...] = (0.0, 10.0, 20.0, 30.0)
    channels: int = 100
    schemes: Tuple[str, ...] = ('opposite_phase',)
    seed: int = 0
    settings: SolverSettings = field(default_factory=SolverSettings)
    cond_cap: float = DEFAULT_CONDITION_CAP
    threads: Optional[int] = None
    p: float = 1.0

    def __post_init__(self):
        if self.n < 2:
            raise ConfigError(f"n must be >= 2, got {self.n}")
        if self.pattern not in PATTERN_ALIASES:
            raise ConfigError(f"pattern must be one of {sorted(set(PATTERN_ALIASES.values()))}, got '{self.pattern}'")
        object.__setattr__(self, 'pattern', PATTERN_ALIASES[self.pattern])
        object.__setattr__(self, 'snr_points_db', tuple(float(s) for s in self.snr_points_db))
        object.__setattr__(self, 'schemes', tuple(self.schemes))
        if not self.snr_points_db or not np.all(np.isfinite(self.snr_points_db)):
            raise ConfigError(f"snr_points_db must be a non-empty list of finite values, got {self.snr_points_db}")
        if self.channels < 1:
            raise ConfigError(f"channels must be >= 1, got {self.channels}")
        if not self.schemes:
            raise ConfigError("At least one scheme is required")
        if len(set(self.schemes)) != len(self.schemes):
            raise ConfigError(f"Duplicate schemes in {list(self.schemes)}")
        if self.threads is not None and self.threads < 1:
            raise ConfigError(f"threads must be >= 1, got {self.threads}")
        if self.p <= 0:
            raise ConfigError(f"p must be > 0, got {self.p}")

    def switch(self) -> SwitchSpec:
        if self.pattern == 'pairwise':
            return SwitchSpec.pairwise(self.n)
        return SwitchSpec.non_pairwise(self.n)

    def scheme_specs(self) -> List[SchemeSpec]:
        return [parse_scheme_spec(text) for text in self.schemes]

    def to_dict(self) -> dict:
        """Plain JSON-compatible form (complex values as [re, im])."""
        return _jsonable(dataclasses.asdict(self))

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON form, without the worker count."""
        content = self.to_dict()
        content.pop('threads', None)
        canonical = json.dumps(content, sort_keys=True, separators=(',', ':'))
        return hashlib.sha256(canonical.encode('utf-8')).hexdigest()


def _jsonable(value):
    if isinstance(value, dict):
        return {key: _jsonable(item) for key, item in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(item) for item in value]
    if isinstance(value, complex):
        return [value.real, value.imag]
    if isinstance(value, np.generic):
        return value.item()
    return value


@dataclass
class SimResult:
    """
    Output of run_sweep.

    Attributes:
        config (SimConfig): The experiment
        samples (pd.DataFrame): One row per (scheme, SNR, channel)
        summary (pd.DataFrame): One row per (scheme, SNR) with SUMMARY_COLUMNS
            followed by mean_station_tput
        config_hash (str): Provenance hash of the config
    """

    config: SimConfig
    samples: pd.DataFrame
    summary: pd.DataFrame
    config_hash: str

    @property
    def seed(self) -> int:
        return self.config.seed

    @property
    def schemes(self) -> List[str]:
        return list(dict.fromkeys(self.summary['scheme']))

    def curve(self, scheme: str) -> pd.Series:
        """Mean worst-station throughput of one scheme indexed by SNR."""
        rows = self.summary[self.summary['scheme'] == scheme]
        return rows.set_index('snr_db')['mean_tput']


def derive_seed(master: int, *keys: int) -> int:
    """Independent 32-bit seed for a (master, key...) tuple."""
    return int(np.random.SeedSequence([int(master)] + [int(k) for k in keys]).generate_state(1)[0])


def scheme_key(label: str) -> int:
    return zlib.crc32(label.encode('utf-8'))


def _solve_channel(task: Tuple[SimConfig, int]) -> List[dict]:
    """All schemes at all SNR points on channel c."""
    cfg, c = task
    specs = cfg.scheme_specs()
    sw = cfg.switch()
    ch = sample_channel(cfg.n, derive_seed(cfg.seed, CHANNEL_STREAM, c), cfg.cond_cap)

    rows = []
    for snr_index, snr_db in enumerate(cfg.snr_points_db):
        np_ = NoiseParams.from_snr_db(snr_db, cfg.p)
        for spec in specs:
            seed = derive_seed(cfg.seed, SOLVER_STREAM, scheme_key(spec.label), snr_index, c)
            row = {'scheme': spec.label, 'snr_db': snr_db, 'snr_index': snr_index, 'channel': c,
                   'rejections': ch.rejections, 'failed': False}
            try:
                result = run_scheme(spec, ch, sw, np_, cfg.settings, seed)
                row.update(worst_tput=result.worst_throughput, mean_tput=result.mean_throughput,
                           worst_eps=result.worst_epsilon, power=result.power_used)
            except ConfigError:
                raise
            except (NumericalError, ValueError, np.linalg.LinAlgError) as e:
                logger.warning(f"{spec.label} failed on channel {c} at {snr_db} dB: {str(e)}")
                row.update(worst_tput=np.nan, mean_tput=np.nan, worst_eps=np.nan, power=np.nan, failed=True)
            rows.append(row)
    return rows


def aggregate(samples: pd.DataFrame) -> pd.DataFrame:
    """
    Reduce per-channel samples to per (scheme, SNR) statistics.

    Args:
        samples (pd.DataFrame): Rows with SAMPLE_COLUMNS

    Returns:
        pd.DataFrame: SUMMARY_COLUMNS plus mean_station_tput, in the order
            schemes and SNR points first appear
    """
    records = []
    for (scheme, snr_db), group in samples.groupby(['scheme', 'snr_db'], sort=False):
        ok = group[~group['failed']]
        count = len(ok)
        values = ok['worst_tput'].to_numpy(dtype=float)
        stderr = float(np.std(values, ddof=1) / np.sqrt(count)) if count > 1 else 0.0
        records.append({
            'scheme': scheme,
            'snr_db': snr_db,
            'mean_tput': float(np.mean(values)) if count else np.nan,
            'stderr': stderr,
            'channels': count,
            'rejected': int(group['rejections'].sum() + group['failed'].sum()),
            'mean_station_tput': float(ok['mean_tput'].mean()) if count else np.nan,
        })
    return pd.DataFrame.from_records(records, columns=SUMMARY_COLUMNS + ['mean_station_tput'])


def validate_results(result: SimResult, sigmas: float = 3.0) -> List[str]:
    """
    Flag schemes whose mean throughput drops with SNR beyond sigmas standard errors.

    Returns:
        List[str]: One message per drop found (also logged as warnings)
    """
    problems = []
    for scheme, group in result.summary.groupby('scheme', sort=False):
        group = group.sort_values('snr_db')
        means = group['mean_tput'].to_numpy()
        errors = group['stderr'].to_numpy()
        snrs = group['snr_db'].to_numpy()
        for k in range(1, len(means)):
            drop = means[k - 1] - means[k]
            if drop > sigmas * np.hypot(errors[k - 1], errors[k]) and drop > 0:
                message = f"{scheme}: mean throughput falls from {means[k - 1]:.4f} at {snrs[k - 1]} dB to {means[k]:.4f} at {snrs[k]} dB"
                logger.warning(message)
                problems.append(message)
    return problems


def run_sweep(cfg: SimConfig) -> SimResult:
    """
    Run every scheme at every SNR point over cfg.channels shared channels.

    Args:
        cfg (SimConfig): Experiment

    Returns:
        SimResult: Per-channel samples, summary and provenance

    Raises:
        ConfigError: If a scheme is unknown or does not fit the pattern
    """
    logger.info(f"Running sweep: N={cfg.n} {cfg.pattern}, {len(cfg.schemes)} schemes, "
                f"{len(cfg.snr_points_db)} SNR points, {cfg.channels} channels")

    try:
        sw = cfg.switch()
        for spec in cfg.scheme_specs():
            check_compatible(spec, sw)

        tasks = [(cfg, c) for c in range(cfg.channels)]
        workers = cfg.threads or os.cpu_count() or 1
        if workers == 1 or cfg.channels == 1:
            chunks = [_solve_channel(task) for task in tasks]
        else:
            with ProcessPoolExecutor(max_workers=min(workers, cfg.channels)) as executor:
                chunks = list(executor.map(_solve_channel, tasks, chunksize=max(1, cfg.channels // (4 * workers))))

        samples = pd.DataFrame.from_records([row for chunk in chunks for row in chunk], columns=SAMPLE_COLUMNS)
        # Order by scheme as configured, then SNR, then channel
        order = {spec.label: k for k, spec in enumerate(cfg.scheme_specs())}
        samples = samples.assign(_scheme_order=samples['scheme'].map(order))
        samples = samples.sort_values(['_scheme_order', 'snr_index', 'channel'], kind='stable')
        samples = samples.drop(columns='_scheme_order').reset_index(drop=True)

        summary = aggregate(samples)
        failures = int(samples['failed'].sum())
        if failures:
            logger.warning(f"{failures} solves failed and were excluded from the averages")

        result = SimResult(config=cfg, samples=samples, summary=summary, config_hash=cfg.config_hash())
        validate_results(result)
        logger.info("Sweep completed successfully")
        return result

    except Exception as e:
        logger.error(f"Error running sweep: {str(e)}")
        raise
