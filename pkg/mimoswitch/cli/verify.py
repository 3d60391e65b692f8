"""
verify.py

Property suites behind `mimoswitch verify`. Each suite draws its own random
instances from the given seed and checks one family of invariants:

    precoder_identity     HᵀGH = A(P+B) for zero-forcing and network-coded designs
    power_psd             the relay power matrix S' is Hermitian PSD
    full_power            solver outputs use the whole relay power budget
    equal_snr_contract    equal-SNR outputs give every station the same noise
    relaxation_ordering   relaxation power <= rounded power; bound >= achieved throughput
    quartic_oracle        the two-station closed form beats a phase grid
"""

import numpy as np
from dataclasses import dataclass, field
from typing import Callable, Dict, List
import logging

from mimoswitch.core.model import (
    NoiseParams,
    SwitchSpec,
    assemble_precoder,
    compute_S,
    sample_channel,
)
from mimoswitch.core.numerics import psd_check
from mimoswitch.optimization import eqsnr, maxmin
from mimoswitch.simulation.schemes import basic_scheme

# Set up logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

QUICK_SDR = maxmin.SdrConfig(samples=50, eps_tolerance=1e-5)


@dataclass
class SuiteResult:
    """Outcome of one property suite."""

    name: str
    checks: int = 0
    failures: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def check(self, condition: bool, message: str) -> None:
        self.checks += 1
        if not condition:
            self.failures.append(message)


def _instances(rng: np.random.Generator, trials: int):
    """Random (channel, switch, noise) triples over N ∈ {2, 4}, both patterns and both modes."""
    setups = [(2, SwitchSpec.pairwise(2)), (4, SwitchSpec.pairwise(4)), (4, SwitchSpec.non_pairwise(4))]
    for t in range(trials):
        n, sw = setups[t % len(setups)]
        ch = sample_channel(n, int(rng.integers(2 ** 31)))
        np_ = NoiseParams.from_snr_db(float(rng.choice([0.0, 10.0, 20.0, 30.0])))
        yield ch, sw, np_


def _random_b(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def suite_precoder_identity(rng: np.random.Generator, trials: int) -> SuiteResult:
    result = SuiteResult('precoder_identity')
    for ch, sw, _ in _instances(rng, trials):
        for pnc in (False, True):
            spec = sw.with_pnc(pnc)
            a = _random_b(rng, sw.n)
            b = _random_b(rng, sw.n) if pnc else np.zeros(sw.n)
            G = assemble_precoder(ch, spec, a, b)
            target = a[:, None] * (spec.P + np.diag(b))
            error = np.linalg.norm(ch.H.T @ G @ ch.H - target) / np.linalg.norm(target)
            result.check(error <= 1e-9, f"N={sw.n} pnc={pnc}: relative error {error:.3e}")
    return result


def suite_power_psd(rng: np.random.Generator, trials: int) -> SuiteResult:
    result = SuiteResult('power_psd')
    for ch, sw, np_ in _instances(rng, trials):
        spec = sw.with_pnc(True)
        S = compute_S(ch, spec, np_, _random_b(rng, sw.n))
        try:
            is_psd, smallest = psd_check(S)
            result.check(is_psd, f"N={sw.n}: smallest eigenvalue {smallest:.3e}")
        except ValueError as e:
            result.check(False, f"N={sw.n}: {str(e)}")
    return result


def _equal_snr_outcomes(ch, sw, np_):
    outcomes = {'random_phase': eqsnr.random_phase(ch, sw, np_, eqsnr.PhaseSearchConfig(trials=3))}
    if sw.is_pairwise:
        outcomes['opposite_phase'] = eqsnr.opposite_phase(ch, sw, np_)
        outcomes['pnc_phase_aligned'] = eqsnr.pnc_phase_aligned(ch, sw.with_pnc(True), np_)
    if sw.n == 2:
        outcomes['closed_form'] = eqsnr.closed_form_two_station(ch, sw, np_)
    return outcomes


def suite_full_power(rng: np.random.Generator, trials: int) -> SuiteResult:
    result = SuiteResult('full_power')
    for k, (ch, sw, np_) in enumerate(_instances(rng, trials)):
        outcomes = _equal_snr_outcomes(ch, sw, np_)
        outcomes['basic'] = basic_scheme(ch, sw, np_)
        if k % 3 == 0:
            outcomes['maxmin_sdr'] = maxmin.maxmin_solve(ch, sw, np_, QUICK_SDR)
        for name, outcome in outcomes.items():
            relative = abs(outcome.power_used - np_.p) / np_.p
            result.check(relative <= 1e-6, f"{name} N={sw.n}: power off by {relative:.3e}")
    return result


def suite_equal_snr_contract(rng: np.random.Generator, trials: int) -> SuiteResult:
    result = SuiteResult('equal_snr_contract')
    for ch, sw, np_ in _instances(rng, trials):
        for name, outcome in _equal_snr_outcomes(ch, sw, np_).items():
            spread = outcome.epsilon_spread
            bound = 1e-8 * float(np.mean(outcome.epsilon))
            result.check(spread <= bound, f"{name} N={sw.n}: spread {spread:.3e} > {bound:.3e}")
    return result


def suite_relaxation_ordering(rng: np.random.Generator, trials: int) -> SuiteResult:
    result = SuiteResult('relaxation_ordering')
    for k, (ch, sw, np_) in enumerate(_instances(rng, trials)):
        if k % 3:
            continue
        outcome = maxmin.maxmin_solve(ch, sw, np_, QUICK_SDR)
        relaxation = outcome.diagnostics['relaxation_power']
        rounded = outcome.diagnostics['rounded_power']
        result.check(relaxation <= rounded * (1 + 1e-7),
                     f"N={sw.n}: relaxation power {relaxation:.10g} above rounded {rounded:.10g}")

        bound = maxmin.sdr_upper_bound(ch, sw, np_, QUICK_SDR)
        # network-coded designs are outside the zero-forcing bound
        zero_forcing = [o for name, o in _equal_snr_outcomes(ch, sw, np_).items() if not name.startswith('pnc')]
        designs = [outcome, basic_scheme(ch, sw, np_)] + zero_forcing
        for design in designs:
            result.check(bound >= design.worst_throughput - 1e-7,
                         f"N={sw.n}: bound {bound:.10g} below achieved {design.worst_throughput:.10g}")
    return result


def suite_quartic_oracle(rng: np.random.Generator, trials: int) -> SuiteResult:
    result = SuiteResult('quartic_oracle')
    sw = SwitchSpec.pairwise(2)
    grid = 2 * np.pi * np.arange(16) / 16
    for _ in range(trials):
        ch = sample_channel(2, int(rng.integers(2 ** 31)))
        np_ = NoiseParams.from_snr_db(float(rng.choice([0.0, 10.0, 20.0])))
        closed = eqsnr.closed_form_two_station(ch, sw, np_).worst_epsilon
        best = min(eqsnr.solve_eps_given_phases(ch, sw, np_, [0.0, delta]).worst_epsilon for delta in grid)
        result.check(closed <= best * 1.005, f"closed form {closed:.10g} above grid optimum {best:.10g}")
    return result


SUITES: Dict[str, Callable[[np.random.Generator, int], SuiteResult]] = {
    'precoder_identity': suite_precoder_identity,
    'power_psd': suite_power_psd,
    'full_power': suite_full_power,
    'equal_snr_contract': suite_equal_snr_contract,
    'relaxation_ordering': suite_relaxation_ordering,
    'quartic_oracle': suite_quartic_oracle,
}


def run_verification(seed: int = 0, trials: int = 12) -> List[SuiteResult]:
    """
    Run every suite with its own generator spawned from seed.

    Args:
        seed (int): Master seed
        trials (int): Random instances per suite

    Returns:
        List[SuiteResult]: One result per suite, in SUITES order
    """
    logger.info(f"Running {len(SUITES)} property suites (seed {seed}, {trials} trials each)")
    streams = np.random.SeedSequence(seed).spawn(len(SUITES))
    results = []
    for (name, suite), stream in zip(SUITES.items(), streams):
        try:
            result = suite(np.random.default_rng(stream), trials)
        except Exception as e:
            logger.error(f"Suite {name} raised: {str(e)}")
            result = SuiteResult(name, checks=1, failures=[f"raised {type(e).__name__}: {str(e)}"])
        results.append(result)
        level = logging.INFO if result.passed else logging.ERROR
        logger.log(level, f"{name}: {result.checks - len(result.failures)}/{result.checks} checks passed")
    return results
