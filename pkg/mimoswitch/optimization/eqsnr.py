"""
eqsnr.py

Equal-SNR relay designs: every station ends up with the same post-processing
noise ε and the relay uses its full power budget.

Zero-forcing relaying:
    - closed_form_two_station: exact optimum for N = 2 via a quartic in |a₁|²
    - opposite_phase: opposite signs inside each exchanging pair
    - random_phase: best of L random phase vectors drawn from M bins
Network-coded relaying:
    - pnc_phase_aligned: self-interference gains that minimize each pair's noise
    - pnc_identical_b: random phases over a grid of common real gains B = bI

For fixed phases θ (and fixed b) the gains are |a_i| = σ/√(ε + 1 − q_i) and ε
is the first root of power(ε) = p above max_i q_i − 1.
"""

import numpy as np
from dataclasses import dataclass
from scipy.optimize import brentq
from typing import Optional, Sequence, Tuple
import logging

from mimoswitch.core.model import (
    ChannelRealization,
    NoiseParams,
    SolveOutcome,
    SwitchSpec,
    compute_Q,
    compute_R,
    compute_S,
    make_outcome,
    pair_coefficients,
)
from mimoswitch.core.numerics import QuarticCoefficients, real_roots
from mimoswitch.errors import BracketError, ConfigError, PairingError

# Set up logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

DEFAULT_B_GRID = np.linspace(-2.0, 2.0, 41)


@dataclass(frozen=True)
class EpsSearchConfig:
    """
    Bracketed root search for power(ε) = p.

    The bracket starts initial_step above max_i q_i − 1 and its upper end moves
    away geometrically by expansion until power drops below p; brentq then
    refines to tolerance.
    """

    expansion: float = 2.0
    initial_step: float = 1e-9
    tolerance: float = 1e-14
    max_iterations: int = 200

    def __post_init__(self):
        if self.expansion <= 1:
            raise ValueError(f"expansion must be > 1, got {self.expansion}")
        if self.initial_step <= 0:
            raise ValueError(f"initial_step must be > 0, got {self.initial_step}")
        if self.tolerance <= 0:
            raise ValueError(f"tolerance must be > 0, got {self.tolerance}")
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")


@dataclass(frozen=True)
class PhaseSearchConfig:
    """Random-phase search: M phase bins, L trials, generator seed."""

    bins: int = 8
    trials: int = 10
    seed: int = 0

    def __post_init__(self):
        if self.bins < 2:
            raise ValueError(f"bins must be >= 2, got {self.bins}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")


def gain_magnitudes(eps: float, q: np.ndarray, sigma2: float) -> np.ndarray:
    """|a_i| = σ/√(ε + 1 − q_i)."""
    return np.sqrt(sigma2 / (eps + 1.0 - q))


def _solve_budget(q: np.ndarray, S: np.ndarray, sigma2: float, p: float,
                  unit: np.ndarray, cfg: EpsSearchConfig) -> Tuple[float, dict]:
    """First ε above max q_i − 1 at which the relay power equals p."""
    eps0 = float(np.max(q)) - 1.0

    def excess(eps: float) -> float:
        a = gain_magnitudes(eps, q, sigma2) * unit
        return float(np.real(np.vdot(a, S @ a))) - p

    step = cfg.initial_step * max(1.0, abs(eps0))
    while excess(eps0 + step) <= 0:
        step /= cfg.expansion
        if step < 1e-300:
            raise BracketError("Relay power stays below budget next to the feasibility edge", (eps0, eps0))

    lo, hi = eps0 + step, None
    for k in range(1, cfg.max_iterations + 1):
        candidate = eps0 + step * cfg.expansion ** k
        if excess(candidate) <= 0:
            hi = candidate
            break
        lo = candidate
    if hi is None:
        raise BracketError(f"Relay power never reached {p} while growing the bracket", (eps0 + step, lo))

    if excess(hi) == 0:
        eps = hi
    else:
        eps = brentq(excess, lo, hi, xtol=cfg.tolerance, rtol=4 * np.finfo(float).eps,
                     maxiter=cfg.max_iterations)
    return float(eps), {'bracket': (lo, hi)}


def solve_eps_given_phases(ch: ChannelRealization, sw: SwitchSpec, np_: NoiseParams,
                           phases: Sequence[float], b: Optional[np.ndarray] = None,
                           cfg: Optional[EpsSearchConfig] = None) -> SolveOutcome:
    """
    Equal-SNR design for fixed gain phases (and fixed b for network coding).

    Args:
        ch (ChannelRealization): Channel
        sw (SwitchSpec): Switch pattern
        np_ (NoiseParams): Noise parameters
        phases (Sequence[float]): Phase θ_i of each gain a_i
        b (Optional[np.ndarray]): Self-interference gains, zero when omitted
        cfg (Optional[EpsSearchConfig]): Root search settings

    Returns:
        SolveOutcome: Design with equal ε at every station and power p

    Raises:
        BracketError: If the power never crosses p in the search range
    """
    cfg = cfg or EpsSearchConfig()
    phases = np.asarray(phases, dtype=float)
    if phases.shape != (sw.n,) or not np.all(np.isfinite(phases)):
        raise ValueError(f"phases must be {sw.n} finite values, got {phases}")

    q = np.real(np.diag(compute_R(ch, sw, np_, b)))
    S = compute_S(ch, sw, np_, b)
    unit = np.exp(1j * phases)

    eps, diagnostics = _solve_budget(q, S, np_.sigma2, np_.p, unit, cfg)
    a = gain_magnitudes(eps, q, np_.sigma2) * unit
    diagnostics['epsilon_target'] = eps
    return make_outcome(ch, sw, np_, a, b, diagnostics)


def _require_pairs(sw: SwitchSpec, scheme: str) -> Tuple[Tuple[int, int], ...]:
    if not sw.is_pairwise:
        raise PairingError(f"{scheme} needs a pairwise switch pattern (involutive derangement)")
    return sw.pairs


def _require_pnc(sw: SwitchSpec, scheme: str) -> None:
    if not sw.pnc:
        raise ConfigError(f"{scheme} needs a network-coded (pnc) switch pattern")


def two_station_quartic(s11: float, s22: float, s12: float, q_delta: float,
                        sigma2: float, p: float) -> QuarticCoefficients:
    """
    Quartic in z = a₁² whose admissible roots give the two-station equal-SNR designs.

    It comes from eliminating a₂ = −σ/√(q₁ − q₂ + σ²/a₁²) from the power
    equation s11·a₁² + 2·s12·a₁a₂ + s22·a₂² = p and squaring.
    """
    return QuarticCoefficients(
        c4=s11 ** 2 * q_delta ** 2,
        c3=2 * q_delta * (s11 ** 2 * sigma2 + s11 * s22 * sigma2 - s11 * p * q_delta
                          - 2 * s12 ** 2 * sigma2),
        c2=(sigma2 ** 2 * (s11 + s22) ** 2 + p ** 2 * q_delta ** 2
            - 2 * p * sigma2 * q_delta * (2 * s11 + s22) - 4 * s12 ** 2 * sigma2 ** 2),
        c1=2 * p ** 2 * sigma2 * q_delta - 2 * p * sigma2 ** 2 * (s11 + s22),
        c0=p ** 2 * sigma2 ** 2,
    )


def closed_form_two_station(ch: ChannelRealization, sw: SwitchSpec, np_: NoiseParams,
                            cfg: Optional[EpsSearchConfig] = None) -> SolveOutcome:
    """
    Exact equal-SNR optimum for two stations.

    The optimum has real gains of opposite sign, a₁ ≥ 0 ≥ a₂.

    Raises:
        ConfigError: If N is not 2
        NoRealRootError: If the quartic has no real root
    """
    if sw.n != 2:
        raise ConfigError(f"closed_form_two_station needs N = 2, got N = {sw.n}")
    _require_pairs(sw, "closed_form_two_station")

    q = np.real(np.diag(compute_Q(ch, sw, np_)))
    S = compute_S(ch, sw, np_)
    s11, s22, s12 = float(np.real(S[0, 0])), float(np.real(S[1, 1])), float(np.real(S[0, 1]))
    q_delta = float(q[0] - q[1])
    sigma2, p = np_.sigma2, np_.p

    quartic = two_station_quartic(s11, s22, s12, q_delta, sigma2, p)
    roots = real_roots(quartic)

    # Squaring adds spurious roots; keep those that satisfy the unsquared equations
    best = None
    for z in roots:
        denominator = q_delta * z + sigma2
        if z <= 0 or denominator <= 0:
            continue
        a1 = np.sqrt(z)
        a2 = -np.sqrt(sigma2 * z / denominator)
        power = s11 * a1 ** 2 + s22 * a2 ** 2 + 2 * s12 * a1 * a2
        if abs(power - p) > 1e-8 * p:
            continue
        eps = sigma2 / z - 1.0 + q[0]
        if best is None or eps < best[0]:
            best = (eps, z, a1, a2)

    if best is not None:
        _, z, a1, a2 = best
        return make_outcome(ch, sw, np_, np.array([a1, a2]), None,
                            {'quartic': quartic.as_array().tolist(), 'root': z})

    logger.warning(f"No quartic root among {roots} meets the power budget; using the phase solver")
    outcome = solve_eps_given_phases(ch, sw, np_, [0.0, np.pi], cfg=cfg)
    outcome.diagnostics['fallback'] = 'opposite_phase_search'
    return outcome


def opposite_phase(ch: ChannelRealization, sw: SwitchSpec, np_: NoiseParams,
                   cfg: Optional[EpsSearchConfig] = None) -> SolveOutcome:
    """
    Opposite signs within every exchanging pair, zero phase across pairs.

    Raises:
        PairingError: If the pattern is not pairwise
    """
    pairs = _require_pairs(sw, "opposite_phase")
    phases = np.zeros(sw.n)
    for _, kappa in pairs:
        phases[kappa] = np.pi
    outcome = solve_eps_given_phases(ch, sw, np_, phases, cfg=cfg)
    outcome.diagnostics['pairs'] = pairs
    return outcome


def random_phase(ch: ChannelRealization, sw: SwitchSpec, np_: NoiseParams,
                 cfg: Optional[PhaseSearchConfig] = None, b: Optional[np.ndarray] = None,
                 eps_cfg: Optional[EpsSearchConfig] = None) -> SolveOutcome:
    """
    Best of L equal-SNR designs with phases drawn uniformly from M bins.

    Args:
        ch (ChannelRealization): Channel
        sw (SwitchSpec): Switch pattern
        np_ (NoiseParams): Noise parameters
        cfg (Optional[PhaseSearchConfig]): Bins, trials and seed
        b (Optional[np.ndarray]): Fixed self-interference gains
        eps_cfg (Optional[EpsSearchConfig]): Root search settings

    Returns:
        SolveOutcome: The trial with the smallest ε (earliest trial on ties)
    """
    cfg = cfg or PhaseSearchConfig()
    rng = np.random.default_rng(cfg.seed)
    best, best_trial = None, -1

    for trial in range(cfg.trials):
        phases = 2 * np.pi / cfg.bins * rng.integers(0, cfg.bins, size=sw.n)
        outcome = solve_eps_given_phases(ch, sw, np_, phases, b, eps_cfg)
        if best is None or outcome.worst_epsilon < best.worst_epsilon:
            best, best_trial = outcome, trial

    best.diagnostics.update({'trials': cfg.trials, 'bins': cfg.bins, 'best_trial': best_trial})
    return best


def phase_aligned_gains(ch: ChannelRealization, sw: SwitchSpec) -> np.ndarray:
    """b_π = −conj(h2)/h1 and b_κ = −h2/h3 for every pair (π, κ)."""
    pairs = _require_pairs(sw, "phase-aligned network coding")
    b = np.zeros(sw.n, dtype=complex)
    for pi, kappa in pairs:
        h1, h2, h3 = pair_coefficients(ch, (pi, kappa))
        b[pi] = -np.conj(h2) / h1
        b[kappa] = -h2 / h3
    return b


def pair_cross_gain(ch: ChannelRealization, np_: NoiseParams, pair: Tuple[int, int]) -> float:
    """λ = |h2|²·[γ²(|h2|²/(h1·h3) − 1) − 1/h1 − 1/h3], never positive."""
    h1, h2, h3 = pair_coefficients(ch, pair)
    m2 = abs(h2) ** 2
    return m2 * (np_.gamma2 * (m2 / (h1 * h3) - 1.0) - 1.0 / h1 - 1.0 / h3)


def pnc_phase_aligned(ch: ChannelRealization, sw: SwitchSpec, np_: NoiseParams,
                      cfg: Optional[EpsSearchConfig] = None) -> SolveOutcome:
    """
    Network-coded equal-SNR design with noise-minimizing b and aligned phases.

    The cross term of each pair in the power form is λ·Re(conj(a_π)a_κ) with
    λ ≤ 0, so equal phases inside a pair are optimal.

    Raises:
        PairingError: If the pattern is not pairwise
        ConfigError: If the pattern is not network-coded
    """
    _require_pnc(sw, "pnc_phase_aligned")
    b = phase_aligned_gains(ch, sw)
    outcome = solve_eps_given_phases(ch, sw, np_, np.zeros(sw.n), b, cfg)
    outcome.diagnostics['lambda'] = [pair_cross_gain(ch, np_, pair) for pair in sw.pairs]
    return outcome


def pnc_identical_b(ch: ChannelRealization, sw: SwitchSpec, np_: NoiseParams,
                    cfg: Optional[PhaseSearchConfig] = None,
                    b_grid: Optional[Sequence[float]] = None,
                    per_element_phase: bool = False,
                    eps_cfg: Optional[EpsSearchConfig] = None) -> SolveOutcome:
    """
    Random-phase search over a grid of common self-interference gains.

    With per_element_phase the gains become b·e^{jφ_j}, φ_j drawn from the same
    M bins on a separate stream, so the θ draws match random_phase.

    Args:
        ch (ChannelRealization): Channel
        sw (SwitchSpec): Network-coded switch pattern
        np_ (NoiseParams): Noise parameters
        cfg (Optional[PhaseSearchConfig]): Bins, trials and seed
        b_grid (Optional[Sequence[float]]): Real gains to try; must contain 0
        per_element_phase (bool): Draw a phase per element of B
        eps_cfg (Optional[EpsSearchConfig]): Root search settings

    Returns:
        SolveOutcome: Best outcome over the grid (first grid value on ties)
    """
    _require_pnc(sw, "pnc_identical_b")
    cfg = cfg or PhaseSearchConfig()
    grid = np.array(DEFAULT_B_GRID if b_grid is None else b_grid, dtype=float)
    if grid.ndim != 1 or grid.size == 0 or not np.all(np.isfinite(grid)):
        raise ValueError("b_grid must be a non-empty finite vector")
    zero = np.abs(grid) <= 1e-12
    if not np.any(zero):
        raise ValueError("b_grid must contain 0")
    grid[zero] = 0.0

    best, best_b = None, None
    for b_value in grid:
        if per_element_phase:
            outcome = _per_element_search(ch, sw, np_, cfg, b_value, eps_cfg)
        else:
            outcome = random_phase(ch, sw, np_, cfg, b_value * np.ones(sw.n), eps_cfg)
        if best is None or outcome.worst_epsilon < best.worst_epsilon:
            best, best_b = outcome, float(b_value)

    best.diagnostics.update({'b': best_b, 'grid_size': int(grid.size), 'per_element_phase': per_element_phase})
    return best


def _per_element_search(ch: ChannelRealization, sw: SwitchSpec, np_: NoiseParams,
                        cfg: PhaseSearchConfig, b_value: float,
                        eps_cfg: Optional[EpsSearchConfig]) -> SolveOutcome:
    theta_rng = np.random.default_rng(cfg.seed)
    phi_rng = np.random.default_rng(np.random.SeedSequence(cfg.seed).spawn(1)[0])
    best, best_trial = None, -1
    for trial in range(cfg.trials):
        phases = 2 * np.pi / cfg.bins * theta_rng.integers(0, cfg.bins, size=sw.n)
        b = b_value * np.exp(2j * np.pi / cfg.bins * phi_rng.integers(0, cfg.bins, size=sw.n))
        outcome = solve_eps_given_phases(ch, sw, np_, phases, b, eps_cfg)
        if best is None or outcome.worst_epsilon < best.worst_epsilon:
            best, best_trial = outcome, trial
    best.diagnostics.update({'trials': cfg.trials, 'bins': cfg.bins, 'best_trial': best_trial})
    return best
