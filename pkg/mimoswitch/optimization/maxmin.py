"""
maxmin.py

Maxmin-SNR relay designs: minimize the worst post-processing noise max_i ε_i
under the relay power budget.

1. qcqp_min_power: for a target ε̃, the least relay power meeting every
   station's noise target, by SDP relaxation and Gaussian randomization
2. maxmin_solve: bisection on ε̃ against the rounded min-power
3. maxmin_exhaustive_2: grid reference for two stations
4. sdr_upper_bound: the same search against the relaxation value, giving an
   upper bound on the worst-station throughput
5. pnc_fix_b_step / pnc_fix_a_step / pnc_maxmin_iterate: block-coordinate
   descent over gains a and self-interference gains b for network coding
"""

import numpy as np
from dataclasses import dataclass, field
from scipy.optimize import minimize
from typing import Callable, Dict, List, Optional, Tuple
import logging

from mimoswitch.core.model import (
    ChannelRealization,
    NoiseParams,
    SolveOutcome,
    SwitchSpec,
    compute_R,
    compute_S,
    make_outcome,
    relay_power,
    throughput,
)
from mimoswitch.core.numerics import CMatrix
from mimoswitch.errors import BracketError, ConfigError, InfeasibleCapsError, NumericalError
from mimoswitch.optimization import sdp
from mimoswitch.optimization.eqsnr import closed_form_two_station, phase_aligned_gains

# Set up logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

INIT_CHOICES = ('auto', 'zero', 'phase_aligned', 'noise_min')
INFEASIBLE_PENALTY = 1e30


@dataclass(frozen=True)
class SdrConfig:
    """
    Settings of the relaxation-based maxmin solver.

    Attributes:
        samples (int): Gaussian randomization draws per relaxation
        eps_tolerance (float): Relative width at which the ε̃ bisection stops
        max_outer_iterations (int): Cap on bracket moves and bisection steps
        seed (int): Seed of the randomization draws
        sdp_settings (sdp.SdpSettings): Interior-point settings
    """

    samples: int = 1000
    eps_tolerance: float = 1e-5
    max_outer_iterations: int = 80
    seed: int = 0
    sdp_settings: sdp.SdpSettings = field(default_factory=sdp.SdpSettings)

    def __post_init__(self):
        if self.samples < 1:
            raise ValueError(f"samples must be >= 1, got {self.samples}")
        if not 0 < self.eps_tolerance < 1:
            raise ValueError(f"eps_tolerance must be in (0, 1), got {self.eps_tolerance}")
        if self.max_outer_iterations < 1:
            raise ValueError(f"max_outer_iterations must be >= 1, got {self.max_outer_iterations}")


@dataclass(frozen=True)
class IterativeConfig:
    """
    Settings of the alternating a/b optimization.

    Attributes:
        max_alternations (int): Cap on a/b alternations
        tolerance (float): Stop when |Δε| <= tolerance·(1 + ε)
        init (str): Starting b unless initial_b is set: 'zero', 'phase_aligned',
            'noise_min', or 'auto' for the better of zero and noise_min
        initial_b (Optional[tuple]): Explicit starting b
    """

    max_alternations: int = 20
    tolerance: float = 1e-4
    init: str = 'auto'
    initial_b: Optional[Tuple[complex, ...]] = None

    def __post_init__(self):
        if self.max_alternations < 1:
            raise ValueError(f"max_alternations must be >= 1, got {self.max_alternations}")
        if self.tolerance <= 0:
            raise ValueError(f"tolerance must be > 0, got {self.tolerance}")
        if self.init not in INIT_CHOICES:
            raise ValueError(f"init must be one of {INIT_CHOICES}, got '{self.init}'")


@dataclass
class MinPowerSolution:
    """
    Rounded solution of the min-power problem at a fixed noise target.

    Attributes:
        power (float): aᴴSa of the returned gains
        a (np.ndarray): Gains with |a_i|² >= σ²/(ε̃ + 1 − q_i)
        lower_bound (float): Relaxation value, a lower bound on any feasible power
        rank_residual (float): Relative distance of the relaxed solution from rank one
        candidate (str): Which rounding produced a
        iterations (int): Interior-point iterations
    """

    power: float
    a: np.ndarray
    lower_bound: float
    rank_residual: float
    candidate: str
    iterations: int


def gaussian_draws(n: int, samples: int, seed: int) -> np.ndarray:
    """n × samples matrix of CN(0, 1) draws."""
    rng = np.random.default_rng(seed)
    return (rng.standard_normal((n, samples)) + 1j * rng.standard_normal((n, samples))) / np.sqrt(2.0)


def _selector(n: int, i: int, j: int) -> CMatrix:
    E = np.zeros((n, n), dtype=complex)
    E[i, j] = 1.0
    return E


def _covariance_draws(X: CMatrix, draws: np.ndarray) -> np.ndarray:
    """ξ = V·Λ^{1/2}·z, so that E[ξξᴴ] = X."""
    eigenvalues, eigenvectors = np.linalg.eigh(0.5 * (X + X.conj().T))
    return (eigenvectors * np.sqrt(np.clip(eigenvalues, 0.0, None))) @ draws


def _unit_modulus(v: np.ndarray) -> np.ndarray:
    magnitude = np.abs(v)
    return np.where(magnitude > 0, v / np.where(magnitude > 0, magnitude, 1.0), 1.0)


def qcqp_min_power(ch: ChannelRealization, sw: SwitchSpec, np_: NoiseParams, eps_target: float,
                   q: np.ndarray, S: CMatrix, cfg: Optional[SdrConfig] = None,
                   draws: Optional[np.ndarray] = None) -> MinPowerSolution:
    """
    Least relay power aᴴSa subject to |a_i|² >= σ²/(ε̃ + 1 − q_i).

    The variable is scaled as a = D·y with D = diag(√r_i), turning the
    constraints into |y_i| >= 1. The relaxation min Tr(DSD·Y) s.t. Y_ii >= 1,
    Y ⪰ 0 is solved, then candidates are rounded from its top eigenvector and
    from Gaussian draws with covariance Y, each projected onto the constraint
    set in two ways (unit modulus per entry, or one common scale). The
    candidate with least power wins; ties go to the lower worst noise, then to
    the earlier candidate.

    Args:
        ch (ChannelRealization): Channel
        sw (SwitchSpec): Switch pattern
        np_ (NoiseParams): Noise parameters
        eps_target (float): Noise target ε̃, above max_i q_i − 1
        q (np.ndarray): Diagonal of R (Q for zero-forcing)
        S (CMatrix): Power matrix for the same b
        cfg (Optional[SdrConfig]): Relaxation settings
        draws (Optional[np.ndarray]): CN(0, 1) draws, n × samples; drawn from cfg.seed if omitted

    Returns:
        MinPowerSolution: Rounded gains with their power and the relaxation bound

    Raises:
        SdpError: If the relaxation does not solve to optimality
    """
    cfg = cfg or SdrConfig()
    n = sw.n
    q = np.asarray(q, dtype=float)
    if eps_target <= float(np.max(q)) - 1.0:
        raise ValueError(f"eps_target {eps_target} must exceed max_i q_i - 1 = {np.max(q) - 1.0}")
    if draws is None:
        draws = gaussian_draws(n, cfg.samples, cfg.seed)

    r = np_.sigma2 / (eps_target + 1.0 - q)
    d = np.sqrt(r)
    T = d[:, None] * S * d[None, :]
    T = 0.5 * (T + T.conj().T)
    scale = float(np.max(np.abs(T))) or 1.0

    prob = sdp.SdpProblem(C=T / scale)
    for i in range(n):
        prob.add_constraint(_selector(n, i, i), sdp.GREATER_EQUAL, 1.0)
    solution = sdp.solve(prob, cfg.sdp_settings)
    solution.raise_for_status()

    Y = solution.X
    top, rank_residual = sdp.rank_one_extract(Y)
    xi = np.column_stack([top, _covariance_draws(Y, draws)])

    unit = _unit_modulus(xi)
    magnitude = np.abs(xi)
    smallest = np.min(magnitude, axis=0)
    scaled = np.where(smallest > 0, xi / np.where(smallest > 0, smallest, 1.0), unit)

    candidates = np.column_stack([unit, scaled])
    labels = ['eigenvector'] + ['random_unit'] * draws.shape[1] + ['eigenvector_scaled'] + ['random_scaled'] * draws.shape[1]

    powers = np.real(np.einsum('ik,ij,jk->k', candidates.conj(), T, candidates))
    worst = np.max(q[:, None] - 1.0 + (eps_target + 1.0 - q)[:, None] / np.abs(candidates) ** 2, axis=0)
    order = np.lexsort((np.arange(candidates.shape[1]), worst, powers))
    best = int(order[0])

    lower_bound = scale * min(solution.objective, solution.dual_objective)
    return MinPowerSolution(
        power=float(powers[best]),
        a=d * candidates[:, best],
        lower_bound=float(lower_bound),
        rank_residual=rank_residual,
        candidate=labels[best],
        iterations=solution.iterations,
    )


def _uniform_gain_epsilon(q: np.ndarray, S: CMatrix, np_: NoiseParams) -> float:
    """Worst noise of the design a = β·1 that uses the full budget."""
    ones = np.ones(len(q))
    total = float(np.real(ones @ S @ ones))
    if total <= 0:
        return float(np.max(q)) - 1.0 + 1.0
    beta2 = np_.p / total
    return float(np.max(q - 1.0 + np_.sigma2 / beta2))


def _outer_search(feasible: Callable[[float], bool], eps0: float, hi: float,
                  tolerance: float, max_iterations: int) -> Tuple[float, float, int]:
    """
    Smallest feasible ε̃ above eps0 to relative tolerance.

    The upper end grows away from eps0 until feasible, then halves toward eps0
    while feasible, then the bracket is bisected.

    Returns:
        Tuple[float, float, int]: (infeasible lo, feasible hi, evaluations)
    """
    evaluations = 0

    # Grow until feasible
    for _ in range(max_iterations):
        evaluations += 1
        if feasible(hi):
            break
        hi = eps0 + 2.0 * (hi - eps0)
    else:
        raise BracketError(f"No feasible noise target found up to {hi:.6g}", (eps0, hi))

    # Shrink while feasible
    lo = eps0
    for _ in range(max_iterations):
        candidate = eps0 + 0.5 * (hi - eps0)
        evaluations += 1
        if not feasible(candidate):
            lo = candidate
            break
        hi = candidate
    else:
        lo = eps0 + 0.5 * (hi - eps0)

    for _ in range(max_iterations):
        if hi - lo <= tolerance * hi:
            break
        mid = 0.5 * (lo + hi)
        evaluations += 1
        if feasible(mid):
            hi = mid
        else:
            lo = mid

    return lo, hi, evaluations


def _initial_upper(q: np.ndarray, S: CMatrix, np_: NoiseParams, eps_hint: Optional[float]) -> float:
    eps0 = float(np.max(q)) - 1.0
    start = _uniform_gain_epsilon(q, S, np_)
    if eps_hint is not None and eps_hint > eps0:
        start = min(start, float(eps_hint))
    return max(start, eps0 + 1e-12 * max(1.0, abs(eps0)))


def maxmin_solve(ch: ChannelRealization, sw: SwitchSpec, np_: NoiseParams,
                 cfg: Optional[SdrConfig] = None, b: Optional[np.ndarray] = None,
                 eps_hint: Optional[float] = None) -> SolveOutcome:
    """
    Maxmin-SNR design by bisection on the noise target.

    A target ε̃ counts as feasible when the rounded min-power is within the
    budget. The design found at the final feasible target is scaled up to use
    the whole budget, which can only lower every ε_i.

    Args:
        ch (ChannelRealization): Channel
        sw (SwitchSpec): Switch pattern
        np_ (NoiseParams): Noise parameters
        cfg (Optional[SdrConfig]): Relaxation settings
        b (Optional[np.ndarray]): Fixed self-interference gains (network coding)
        eps_hint (Optional[float]): Noise target expected to be feasible

    Returns:
        SolveOutcome: Design with power p; diagnostics hold the bracket and
            the relaxation bound at the final target

    Raises:
        BracketError: If no feasible target is found
        SdpError: If a relaxation fails
    """
    cfg = cfg or SdrConfig()
    q = np.real(np.diag(compute_R(ch, sw, np_, b)))
    S = compute_S(ch, sw, np_, b)
    eps0 = float(np.max(q)) - 1.0
    draws = gaussian_draws(sw.n, cfg.samples, cfg.seed)
    cache: Dict[float, MinPowerSolution] = {}

    def feasible(eps: float) -> bool:
        cache[eps] = qcqp_min_power(ch, sw, np_, eps, q, S, cfg, draws)
        return cache[eps].power <= np_.p

    hi0 = _initial_upper(q, S, np_, eps_hint)
    lo, hi, evaluations = _outer_search(feasible, eps0, hi0, cfg.eps_tolerance, cfg.max_outer_iterations)

    solution = cache[hi]
    a = solution.a * np.sqrt(np_.p / solution.power)
    outcome = make_outcome(ch, sw, np_, a, b, {
        'eps_bracket': (lo, hi),
        'evaluations': evaluations,
        'relaxation_power': solution.lower_bound,
        'rounded_power': solution.power,
        'rank_residual': solution.rank_residual,
        'candidate': solution.candidate,
    })
    logger.debug(f"maxmin_solve: ε={outcome.worst_epsilon:.8g} after {evaluations} relaxations")
    return outcome


def sdr_upper_bound(ch: ChannelRealization, sw: SwitchSpec, np_: NoiseParams,
                    cfg: Optional[SdrConfig] = None, b: Optional[np.ndarray] = None) -> float:
    """
    Upper bound on the worst-station throughput of any maxmin design.

    The bisection runs against the relaxation value instead of the rounded
    power. The infeasible end of the final bracket lies below the smallest
    achievable noise, so its throughput is a bound.

    Returns:
        float: ½·log₂(1 + 1/ε_lo)
    """
    cfg = cfg or SdrConfig(samples=1)
    q = np.real(np.diag(compute_R(ch, sw, np_, b)))
    S = compute_S(ch, sw, np_, b)
    eps0 = float(np.max(q)) - 1.0
    draws = gaussian_draws(sw.n, 1, cfg.seed)

    def feasible(eps: float) -> bool:
        return qcqp_min_power(ch, sw, np_, eps, q, S, cfg, draws).lower_bound <= np_.p

    lo, _, _ = _outer_search(feasible, eps0, _initial_upper(q, S, np_, None),
                             cfg.eps_tolerance, cfg.max_outer_iterations)
    return throughput(lo)


def pnc_fix_b_step(ch: ChannelRealization, sw: SwitchSpec, np_: NoiseParams, b: np.ndarray,
                   cfg: Optional[SdrConfig] = None, eps_hint: Optional[float] = None) -> SolveOutcome:
    """Maxmin over a with b held fixed (q_i = R_ii and S' in place of Q and S)."""
    return maxmin_solve(ch, sw, np_, cfg, b=b, eps_hint=eps_hint)


@dataclass(frozen=True)
class PowerQuadratic:
    """Ω(b) = c0 + 2·Re(bᴴf) + bᴴ·S_t·b for fixed gains a."""

    S_t: CMatrix
    f: np.ndarray
    c0: float

    def __call__(self, b: np.ndarray) -> np.ndarray:
        """Ω for one b (vector) or many (columns)."""
        linear = np.real(np.einsum('i...,i->...', b.conj(), self.f))
        quadratic = np.real(np.einsum('i...,ij,j...->...', b.conj(), self.S_t, b))
        return self.c0 + 2.0 * linear + quadratic


def power_quadratic(ch: ChannelRealization, sw: SwitchSpec, np_: NoiseParams, a: np.ndarray) -> PowerQuadratic:
    """
    Relay power as a quadratic in b with a fixed.

    With M = diag(ā)·Wstar·diag(a) and N = I + γ²W, the power
    Tr((P+B)·N·(P+B)ᴴ·M) has S_t = Nᵀ⊙M, f = diag(M·P·N) and c0 = Tr(P·N·Pᵀ·M).
    """
    a = np.asarray(a, dtype=complex)
    M = a.conj()[:, None] * ch.Wstar * a[None, :]
    N = np.eye(sw.n) + np_.gamma2 * ch.W
    S_t = N.T * M
    return PowerQuadratic(
        S_t=0.5 * (S_t + S_t.conj().T),
        f=np.diag(M @ sw.P @ N).copy(),
        c0=float(np.real(np.trace(sw.P @ N @ sw.P.T @ M))),
    )


@dataclass(frozen=True)
class NoiseCaps:
    """
    Disks |b_i − center_i| <= radius_i equivalent to ε_i(b) <= ε.

    A station with active=False places no limit on b_i (noiseless relay).
    """

    center: np.ndarray
    radius: np.ndarray
    active: bool
    coupling: np.ndarray
    rhs: np.ndarray

    def project(self, b: np.ndarray) -> np.ndarray:
        """Closest point of the disks, column-wise."""
        if not self.active:
            return b
        center = self.center.reshape((-1,) + (1,) * (b.ndim - 1))
        radius = self.radius.reshape(center.shape)
        offset = b - center
        distance = np.abs(offset)
        outside = distance > radius
        shrink = np.where(outside, radius / np.where(outside, distance, 1.0), 1.0)
        return center + offset * shrink


def noise_caps(ch: ChannelRealization, sw: SwitchSpec, np_: NoiseParams,
               a: np.ndarray, eps_target: float) -> NoiseCaps:
    """
    Per-station caps W_ii|b_i|² + 2·Re(conj(b_i)·c_i) <= rhs_i.

    Here c_i = W[s_i, i] with s_i the source of station i and
    rhs_i = (ε − σ²/|a_i|²)/γ² − W[s_i, s_i].

    Raises:
        InfeasibleCapsError: If some disk is empty
    """
    n = sw.n
    a = np.asarray(a, dtype=complex)
    src = sw.source
    w_diag = np.real(np.diag(ch.W))
    coupling = ch.W[src, np.arange(n)]
    if np_.gamma2 == 0:
        return NoiseCaps(np.zeros(n, dtype=complex), np.full(n, np.inf), False, coupling, np.full(n, np.inf))

    rhs = (eps_target - np_.sigma2 / np.abs(a) ** 2) / np_.gamma2 - np.real(ch.W[src, src])
    center = -coupling / w_diag
    radius2 = (rhs + np.abs(coupling) ** 2 / w_diag) / w_diag

    slack = 1e-9 * (1.0 + np.abs(center) ** 2)
    empty = np.flatnonzero(radius2 < -slack)
    if empty.size:
        raise InfeasibleCapsError(empty)
    return NoiseCaps(center, np.sqrt(np.clip(radius2, 0.0, None)), True, coupling, rhs)


def pnc_fix_a_step(ch: ChannelRealization, sw: SwitchSpec, np_: NoiseParams, a: np.ndarray,
                   eps_target: float, cfg: Optional[SdrConfig] = None,
                   incumbent_b: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Self-interference gains b minimizing relay power under per-station noise caps.

    The problem over b is homogenized with t, |t| = 1, and relaxed to an SDP
    in X = [b; t][b; t]ᴴ with the caps as linear constraints. Stations whose
    disk has collapsed to a point are fixed at its center. Candidates from the
    top eigenvector and Gaussian draws are normalized by their t entry,
    projected onto the disks and compared with the incumbent and with b = 0.

    Args:
        ch (ChannelRealization): Channel
        sw (SwitchSpec): Network-coded switch pattern
        np_ (NoiseParams): Noise parameters
        a (np.ndarray): Fixed gains
        eps_target (float): Noise cap ε for every station
        cfg (Optional[SdrConfig]): Relaxation settings
        incumbent_b (Optional[np.ndarray]): Current b, kept if nothing beats it

    Returns:
        np.ndarray: b meeting every cap

    Raises:
        InfeasibleCapsError: If the caps cannot be met for this a
    """
    if not sw.pnc:
        raise ConfigError("pnc_fix_a_step needs a network-coded (pnc) switch pattern")
    cfg = cfg or SdrConfig()
    n = sw.n
    omega = power_quadratic(ch, sw, np_, a)
    caps = noise_caps(ch, sw, np_, a, eps_target)

    fixed = caps.radius <= 1e-12 * (1.0 + np.abs(caps.center)) if caps.active else np.zeros(n, dtype=bool)
    free = np.flatnonzero(~fixed)
    base = np.where(fixed, caps.center, 0.0).astype(complex)

    candidates = [np.zeros(n, dtype=complex)]
    if incumbent_b is not None:
        candidates.append(np.asarray(incumbent_b, dtype=complex))

    if free.size:
        f_free = omega.f[free] + omega.S_t[np.ix_(free, np.flatnonzero(fixed))] @ base[fixed]
        C = np.zeros((free.size + 1, free.size + 1), dtype=complex)
        C[:-1, :-1] = omega.S_t[np.ix_(free, free)]
        C[:-1, -1] = f_free
        C[-1, :-1] = f_free.conj()
        scale = float(np.max(np.abs(C))) or 1.0

        prob = sdp.SdpProblem(C=C / scale)
        prob.add_constraint(_selector(free.size + 1, free.size, free.size), sdp.EQUAL, 1.0)
        if caps.active:
            w_diag = np.real(np.diag(ch.W))
            for k, i in enumerate(free):
                A = np.zeros_like(C)
                A[k, k] = -w_diag[i]
                A[k, -1] = -caps.coupling[i]
                A[-1, k] = -np.conj(caps.coupling[i])
                A[-1, -1] = caps.rhs[i]
                prob.add_constraint(A, sdp.GREATER_EQUAL, 0.0)

        solution = sdp.solve(prob, cfg.sdp_settings)
        if solution.is_optimal:
            top, _ = sdp.rank_one_extract(solution.X)
            xi = np.column_stack([top, _covariance_draws(solution.X, gaussian_draws(free.size + 1, cfg.samples, cfg.seed))])
            t = xi[-1, :]
            usable = np.abs(t) > 1e-12
            relaxed = np.zeros((n, int(np.sum(usable))), dtype=complex)
            relaxed[fixed, :] = base[fixed, None]
            relaxed[free, :] = xi[:-1, usable] / t[usable]
            candidates.extend(relaxed.T)
        else:
            logger.warning(f"b-step relaxation ended '{solution.status}'; keeping incumbent candidates")

    stacked = caps.project(np.column_stack(candidates))
    stacked[fixed, :] = base[fixed, None]
    powers = omega(stacked)
    best = int(np.argmin(powers))
    logger.debug(f"pnc_fix_a_step: power {powers[best]:.8g} from candidate {best} of {len(powers)}")
    return stacked[:, best]


def noise_minimizing_b(ch: ChannelRealization, sw: SwitchSpec) -> np.ndarray:
    """
    b_i = −W[s_i, i]/W_ii, the center of every noise cap.

    Each ε_i is smallest there for any a. On pairwise patterns this is the
    phase-aligned choice.
    """
    src = sw.source
    return -ch.W[src, np.arange(sw.n)] / np.real(np.diag(ch.W))


def _starting_points(ch: ChannelRealization, sw: SwitchSpec, cfg: IterativeConfig) -> List[Tuple[str, np.ndarray]]:
    if cfg.initial_b is not None:
        b = np.asarray(cfg.initial_b, dtype=complex)
        if b.shape != (sw.n,):
            raise ConfigError(f"initial_b must have {sw.n} entries, got {b.shape}")
        return [('explicit', b)]
    zero = ('zero', np.zeros(sw.n, dtype=complex))
    if cfg.init == 'zero':
        return [zero]
    if cfg.init == 'phase_aligned':
        return [('phase_aligned', phase_aligned_gains(ch, sw))]
    if cfg.init == 'noise_min':
        return [('noise_min', noise_minimizing_b(ch, sw))]
    return [zero, ('noise_min', noise_minimizing_b(ch, sw))]


def pnc_maxmin_iterate(ch: ChannelRealization, sw: SwitchSpec, np_: NoiseParams,
                       cfg: Optional[IterativeConfig] = None,
                       sdr: Optional[SdrConfig] = None) -> SolveOutcome:
    """
    Network-coded maxmin design by alternating between a and b.

    Each alternation re-optimizes b for the incumbent a at the incumbent ε,
    then compares the incumbent a rescaled to the budget against a fresh
    a-step at the new b. The first time progress stalls, an a-step at the
    noise-minimizing b is tried before stopping, so a start at b = 0 is not
    a fixed point. Only improvements are accepted, so the recorded ε
    sequence never increases.

    With init 'auto' the starts b = 0 and the noise-minimizing b are both
    solved and the better one is kept.

    Args:
        ch (ChannelRealization): Channel
        sw (SwitchSpec): Network-coded switch pattern
        np_ (NoiseParams): Noise parameters
        cfg (Optional[IterativeConfig]): Alternation settings
        sdr (Optional[SdrConfig]): Relaxation settings for both steps

    Returns:
        SolveOutcome: Best design; diagnostics['history'] holds ε per alternation
    """
    if not sw.pnc:
        raise ConfigError("pnc_maxmin_iterate needs a network-coded (pnc) switch pattern")
    cfg = cfg or IterativeConfig()
    sdr = sdr or SdrConfig()

    starts = _starting_points(ch, sw, cfg)
    best, start = None, None
    for label, b0 in starts:
        outcome = pnc_fix_b_step(ch, sw, np_, b0, sdr)
        if best is None or outcome.worst_epsilon < best.worst_epsilon:
            best, start = outcome, label
    history = [best.worst_epsilon]
    noise_min = noise_minimizing_b(ch, sw)
    jumped = any(np.allclose(b0, noise_min) for _, b0 in starts)
    converged = False

    for alternation in range(1, cfg.max_alternations + 1):
        previous = best.worst_epsilon
        try:
            b_new = pnc_fix_a_step(ch, sw, np_, best.design.a, previous, sdr, best.design.b)
        except InfeasibleCapsError as e:
            logger.warning(f"Alternation {alternation}: {str(e)}")
            break

        a = best.design.a * np.sqrt(np_.p / relay_power(ch, sw, np_, best.design.a, b_new))
        rescaled = make_outcome(ch, sw, np_, a, b_new)
        refit = pnc_fix_b_step(ch, sw, np_, b_new, sdr, eps_hint=rescaled.worst_epsilon)
        candidate = min((rescaled, refit), key=lambda o: o.worst_epsilon)
        if candidate.worst_epsilon < best.worst_epsilon:
            best = candidate

        stalled = abs(previous - best.worst_epsilon) <= cfg.tolerance * (1.0 + best.worst_epsilon)
        if stalled and not jumped:
            # One jump to the cap centers
            jumped = True
            jump = pnc_fix_b_step(ch, sw, np_, noise_min, sdr)
            if jump.worst_epsilon < best.worst_epsilon:
                best = jump
                stalled = abs(previous - best.worst_epsilon) <= cfg.tolerance * (1.0 + best.worst_epsilon)
        history.append(best.worst_epsilon)

        if stalled:
            converged = True
            break

    best.diagnostics.update({
        'history': history,
        'alternations': len(history) - 1,
        'converged': converged,
        'init': start,
    })
    return best


def maxmin_exhaustive_2(ch: ChannelRealization, sw: SwitchSpec, np_: NoiseParams,
                        magnitude_points: int = 200, phase_points: int = 64) -> SolveOutcome:
    """
    Grid reference for two stations.

    The grid runs over |a₁| and the phase difference δ; for each point |a₂| is
    the larger root of the full-budget power equation, so every design uses
    power p. One refinement grid around the best point is followed by a joint
    Nelder-Mead polish over (|a₁|, δ), started from the grid incumbent, from
    the same |a₁| at the phase that makes the cross term most negative, and
    from the equal-SNR closed form at δ = π. The closed-form design itself is
    kept when nothing beats it.

    Args:
        ch (ChannelRealization): Two-station channel
        sw (SwitchSpec): Zero-forcing switch pattern
        np_ (NoiseParams): Noise parameters
        magnitude_points (int): Grid size in |a₁|
        phase_points (int): Grid size in the phase difference

    Returns:
        SolveOutcome: Best design found, never worse than the closed form
    """
    if sw.n != 2:
        raise ConfigError(f"maxmin_exhaustive_2 needs N = 2, got N = {sw.n}")
    if magnitude_points < 2 or phase_points < 2:
        raise ValueError("Grid needs at least 2 points per dimension")

    q = np.real(np.diag(compute_R(ch, sw, np_)))
    S = compute_S(ch, sw, np_)
    s11, s22, s12 = float(np.real(S[0, 0])), float(np.real(S[1, 1])), complex(S[0, 1])
    sigma2, p = np_.sigma2, np_.p
    amax = np.sqrt(p / (s11 - abs(s12) ** 2 / s22))
    penalty = INFEASIBLE_PENALTY * (1.0 + float(np.max(np.abs(q))) + sigma2)

    def evaluate(m1: np.ndarray, delta: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
        beta = m1 * np.real(s12 * np.exp(1j * delta))
        disc = beta ** 2 - s22 * (s11 * m1 ** 2 - p)
        with np.errstate(invalid='ignore', divide='ignore'):
            m2 = (-beta + np.sqrt(np.clip(disc, 0.0, None))) / s22
            eps = np.maximum(q[0] - 1.0 + sigma2 / m1 ** 2, q[1] - 1.0 + sigma2 / m2 ** 2)
        ok = (disc >= 0) & (m2 > 0) & (m1 > 0) & (m1 <= amax) & np.isfinite(eps)
        return np.where(ok, eps, penalty), m2

    def objective(x: np.ndarray) -> float:
        return float(evaluate(np.array(x[0]), np.array(x[1]))[0])

    m1 = np.linspace(amax / magnitude_points, amax, magnitude_points)
    delta = 2 * np.pi * np.arange(phase_points) / phase_points
    M1, D = np.meshgrid(m1, delta, indexing='ij')
    eps, _ = evaluate(M1, D)
    i, j = np.unravel_index(np.argmin(eps), eps.shape)
    best_m1, best_delta = M1[i, j], D[i, j]

    # Refinement grid around the incumbent
    step_m, step_d = amax / magnitude_points, 2 * np.pi / phase_points
    m1_fine = np.clip(np.linspace(best_m1 - step_m, best_m1 + step_m, magnitude_points), amax * 1e-6, amax)
    delta_fine = best_delta + np.linspace(-step_d, step_d, phase_points + 1)
    M1, D = np.meshgrid(m1_fine, delta_fine, indexing='ij')
    eps_fine, _ = evaluate(M1, D)
    i, j = np.unravel_index(np.argmin(eps_fine), eps_fine.shape)

    seeds = [np.array([M1[i, j], D[i, j]]), np.array([M1[i, j], np.pi - np.angle(s12)])]
    closed = None
    try:
        closed = closed_form_two_station(ch, sw, np_)
        seeds.append(np.array([abs(closed.design.a[0]), np.pi]))
    except NumericalError as e:
        logger.warning(f"maxmin_exhaustive_2: closed-form seed unavailable: {str(e)}")

    best_x, best_eps = seeds[0], objective(seeds[0])
    for seed in seeds:
        for x in (seed, minimize(objective, seed, method='Nelder-Mead',
                                 options={'xatol': 1e-12 * amax, 'fatol': 1e-15, 'maxiter': 2000}).x):
            value = objective(x)
            if value < best_eps:
                best_x, best_eps = np.asarray(x, dtype=float), value

    _, m2 = evaluate(np.array(best_x[0]), np.array(best_x[1]))
    a = np.array([best_x[0], float(m2) * np.exp(1j * best_x[1])])
    outcome = make_outcome(ch, sw, np_, a, None, {
        'grid': (magnitude_points, phase_points),
        'phase_difference': float(np.mod(best_x[1], 2 * np.pi)),
        'start': 'search',
    })
    if closed is not None and closed.worst_epsilon < outcome.worst_epsilon:
        closed.diagnostics.update({
            'grid': (magnitude_points, phase_points),
            'phase_difference': float(np.pi),
            'start': 'closed_form',
        })
        return closed
    return outcome
