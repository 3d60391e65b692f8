"""
model.py

System model of a MIMO switch built from a precode-and-forward relay:
1. Channel realizations (uplink H, downlink Hᵀ) with cached inverse products
2. Switch patterns (permutation P, optional pairing, network-coding flag)
3. Precoder assembly G = H⁻ᵀA(P+B)H⁻¹
4. Noise and relay power functionals (Q, R, S, post-processing noise, power)
5. A symbol-level simulator used as an empirical check of the closed forms

Notation: W = (HᴴH)⁻¹ and Wstar = conj(W). Station i receives the signal of the
station j with P[i, j] = 1.
"""

import numpy as np
from dataclasses import dataclass, field
from typing import Optional, Sequence, Tuple
import logging

from mimoswitch.core.numerics import CMatrix, DEFAULT_CONDITION_CAP, invert
from mimoswitch.errors import IllConditionedError, PairingError, ZeroGainError

# Set up logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    """Uplink channel H with H⁻¹, W = (HᴴH)⁻¹ and Wstar = conj(W) cached."""

    H: CMatrix
    H_inv: CMatrix
    W: CMatrix
    Wstar: CMatrix
    rejections: int = 0
    seed: Optional[int] = None

    @property
    def n(self) -> int:
        return self.H.shape[0]

    @classmethod
    def from_matrix(cls, H: CMatrix, cond_cap: float = DEFAULT_CONDITION_CAP,
                    rejections: int = 0, seed: Optional[int] = None) -> 'ChannelRealization':
        """
        Build a realization from an uplink matrix.

        Args:
            H (CMatrix): Square uplink channel
            cond_cap (float): Condition-number cap for the inversion
            rejections (int): Number of resampled draws that preceded this one
            seed (Optional[int]): Seed the matrix was drawn from, if any

        Returns:
            ChannelRealization: The realization

        Raises:
            IllConditionedError: If H is singular or too ill-conditioned
        """
        H = np.array(H, dtype=complex)
        if H.ndim != 2 or H.shape[0] != H.shape[1] or H.shape[0] < 2:
            raise ValueError(f"Channel must be square with N >= 2, got shape {H.shape}")
        H_inv = invert(H, cond_cap)
        W = H_inv @ H_inv.conj().T
        W = 0.5 * (W + W.conj().T)
        return cls(H=H, H_inv=H_inv, W=W, Wstar=W.conj(), rejections=rejections, seed=seed)


@dataclass(frozen=True)
class NoiseParams:
    """Relay noise γ², station noise σ² and relay power budget p."""

    gamma2: float
    sigma2: float
    p: float = 1.0

    def __post_init__(self):
        if not all(np.isfinite([self.gamma2, self.sigma2, self.p])):
            raise ValueError(f"Noise parameters must be finite: {self}")
        if self.gamma2 < 0:
            raise ValueError(f"gamma2 must be >= 0, got {self.gamma2}")
        if self.sigma2 <= 0:
            raise ValueError(f"sigma2 must be > 0, got {self.sigma2}")
        if self.p <= 0:
            raise ValueError(f"p must be > 0, got {self.p}")

    @classmethod
    def from_snr_db(cls, snr_db: float, p: float = 1.0) -> 'NoiseParams':
        """Equal relay and station noise with SNR = p/σ²."""
        noise = p * 10.0 ** (-snr_db / 10.0)
        return cls(gamma2=noise, sigma2=noise, p=p)


def detect_pairs(P: np.ndarray) -> Optional[Tuple[Tuple[int, int], ...]]:
    """Pairs (π, κ) with π < κ if P is an involutive derangement, else None."""
    P = np.asarray(P)
    if np.any(np.diag(P) != 0) or not np.array_equal(P, P.T):
        return None
    partner = np.argmax(P, axis=1)
    return tuple((int(i), int(partner[i])) for i in range(P.shape[0]) if i < partner[i])


@dataclass(frozen=True, eq=False)
class SwitchSpec:
    """
    Switch pattern.

    Attributes:
        P (np.ndarray): 0/1 permutation matrix
        pnc (bool): Whether network-coded relaying (nonzero B) is allowed
        pairs (Optional[tuple]): (π, κ) index pairs for involutive derangements
    """

    P: np.ndarray
    pnc: bool = False
    pairs: Optional[Tuple[Tuple[int, int], ...]] = field(default=None)

    def __post_init__(self):
        P = np.asarray(self.P)
        if P.ndim != 2 or P.shape[0] != P.shape[1]:
            raise ValueError(f"Switch matrix must be square, got shape {P.shape}")
        if not np.all((P == 0) | (P == 1)):
            raise ValueError("Switch matrix entries must be 0 or 1")
        if not (np.all(P.sum(axis=0) == 1) and np.all(P.sum(axis=1) == 1)):
            raise ValueError("Switch matrix must have exactly one 1 per row and column")
        object.__setattr__(self, 'P', P.astype(float))

        if self.pairs is None:
            object.__setattr__(self, 'pairs', detect_pairs(P))
        else:
            pairs = tuple((int(i), int(j)) for i, j in self.pairs)
            if detect_pairs(P) is None:
                raise PairingError("Pairs given for a pattern that is not an involutive derangement")
            for i, j in pairs:
                if P[i, j] != 1 or P[j, i] != 1:
                    raise PairingError(f"Pair ({i}, {j}) is not exchanged by the switch matrix")
            object.__setattr__(self, 'pairs', pairs)

    @property
    def n(self) -> int:
        return self.P.shape[0]

    @property
    def is_pairwise(self) -> bool:
        return self.pairs is not None

    @property
    def source(self) -> np.ndarray:
        """source[i] is the station whose signal station i receives."""
        return np.argmax(self.P, axis=1)

    @classmethod
    def from_permutation(cls, perm: Sequence[int], pnc: bool = False) -> 'SwitchSpec':
        """Station i receives from station perm[i]."""
        n = len(perm)
        P = np.zeros((n, n))
        P[np.arange(n), np.asarray(perm, dtype=int)] = 1
        return cls(P=P, pnc=pnc)

    @classmethod
    def pairwise(cls, n: int, pnc: bool = False) -> 'SwitchSpec':
        """Symmetric pattern exchanging stations i and n-1-i."""
        if n < 2 or n % 2:
            raise PairingError(f"Pairwise pattern needs an even number of stations, got {n}")
        return cls.from_permutation([n - 1 - i for i in range(n)], pnc=pnc)

    @classmethod
    def non_pairwise(cls, n: int, pnc: bool = False) -> 'SwitchSpec':
        """Asymmetric pattern: the 4-station cycle 1→2→4→3→1, a cyclic shift otherwise."""
        if n < 3:
            raise PairingError(f"A non-pairwise derangement needs at least 3 stations, got {n}")
        if n == 4:
            return cls.from_permutation([2, 0, 3, 1], pnc=pnc)
        return cls.from_permutation([(i - 1) % n for i in range(n)], pnc=pnc)

    def with_pnc(self, pnc: bool) -> 'SwitchSpec':
        return SwitchSpec(P=self.P, pnc=pnc, pairs=self.pairs)


@dataclass(frozen=True, eq=False)
class RelayDesign:
    """Gains a (diag A), self-interference gains b (diag B) and precoder G."""

    a: np.ndarray
    b: np.ndarray
    G: CMatrix

    @classmethod
    def build(cls, ch: ChannelRealization, sw: SwitchSpec, a: np.ndarray,
              b: Optional[np.ndarray] = None) -> 'RelayDesign':
        a = np.asarray(a, dtype=complex)
        b = np.zeros(sw.n, dtype=complex) if b is None else np.asarray(b, dtype=complex)
        return cls(a=a, b=b, G=assemble_precoder(ch, sw, a, b))


def throughput(epsilon):
    """
    Gaussian-signalling throughput ½·log₂(1 + 1/ε) in bits per symbol.

    Args:
        epsilon: Post-processing noise power (scalar or array)

    Returns:
        Throughput with the same shape as epsilon

    Raises:
        ValueError: If any epsilon is not positive
    """
    eps = np.asarray(epsilon, dtype=float)
    if np.any(~(eps > 0)):
        raise ValueError(f"Noise power must be positive, got {epsilon}")
    result = 0.5 * np.log2(1.0 + 1.0 / eps)
    return float(result) if result.ndim == 0 else result


@dataclass(eq=False)
class SolveOutcome:
    """Per-station noise, relay power used, throughput and solver diagnostics."""

    epsilon: np.ndarray
    power_used: float
    throughput: np.ndarray
    design: Optional[RelayDesign]
    diagnostics: dict = field(default_factory=dict)

    @property
    def worst_epsilon(self) -> float:
        return float(np.max(self.epsilon))

    @property
    def worst_throughput(self) -> float:
        return float(np.min(self.throughput))

    @property
    def mean_throughput(self) -> float:
        return float(np.mean(self.throughput))

    @property
    def epsilon_spread(self) -> float:
        return float(np.max(self.epsilon) - np.min(self.epsilon))


def _check_dims(ch: ChannelRealization, sw: SwitchSpec) -> None:
    if ch.n != sw.n:
        raise ValueError(f"Channel has {ch.n} stations but switch pattern has {sw.n}")


def _as_b(sw: SwitchSpec, b: Optional[np.ndarray]) -> np.ndarray:
    if b is None:
        return np.zeros(sw.n, dtype=complex)
    b = np.asarray(b, dtype=complex)
    if b.shape != (sw.n,):
        raise ValueError(f"b must have length {sw.n}, got shape {b.shape}")
    if not np.all(np.isfinite(b)):
        raise ValueError("b must be finite")
    if not sw.pnc and np.any(b != 0):
        raise ValueError("Nonzero self-interference gains b need a network-coded (pnc) switch pattern")
    return b


def sample_channel(n: int, rng_seed: int, cond_cap: float = DEFAULT_CONDITION_CAP) -> ChannelRealization:
    """
    Draw an i.i.d. CN(0, 1) channel, redrawing while it is too ill-conditioned.

    Args:
        n (int): Number of stations (relay antennas)
        rng_seed (int): Seed for the generator
        cond_cap (float): Condition-number cap

    Returns:
        ChannelRealization: Channel with the number of redraws recorded
    """
    if n < 2:
        raise ValueError(f"Need at least 2 stations, got {n}")

    rng = np.random.default_rng(rng_seed)
    rejections = 0
    while True:
        H = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / np.sqrt(2.0)
        try:
            return ChannelRealization.from_matrix(H, cond_cap, rejections=rejections, seed=rng_seed)
        except IllConditionedError as e:
            rejections += 1
            logger.debug(f"Resampling channel (seed {rng_seed}): condition {e.condition:.3e}")


def compute_Q(ch: ChannelRealization, sw: SwitchSpec, np_: NoiseParams) -> CMatrix:
    """Q = I + γ²·P·W·Pᵀ."""
    _check_dims(ch, sw)
    return np.eye(ch.n) + np_.gamma2 * (sw.P @ ch.W @ sw.P.T)


def compute_R(ch: ChannelRealization, sw: SwitchSpec, np_: NoiseParams,
              b: Optional[np.ndarray] = None) -> CMatrix:
    """R = I + γ²·(P+B)·W·(P+B)ᴴ; equals Q when b = 0."""
    _check_dims(ch, sw)
    PB = sw.P + np.diag(_as_b(sw, b))
    return np.eye(ch.n) + np_.gamma2 * (PB @ ch.W @ PB.conj().T)


def compute_S(ch: ChannelRealization, sw: SwitchSpec, np_: NoiseParams,
              b: Optional[np.ndarray] = None) -> CMatrix:
    """
    Matrix of the relay power quadratic form aᴴSa.

    With b = 0 this is S = Qᵀ ⊙ Wstar. For network-coded relaying the same
    construction applies to K = (P+B)(I + γ²W)(P+B)ᴴ = R + BPᵀ + PBᴴ + BBᴴ,
    giving S' = Kᵀ ⊙ Wstar.

    Args:
        ch (ChannelRealization): Channel
        sw (SwitchSpec): Switch pattern
        np_ (NoiseParams): Noise parameters
        b (Optional[np.ndarray]): Self-interference gains (default zero)

    Returns:
        CMatrix: Hermitian PSD matrix S (or S')
    """
    _check_dims(ch, sw)
    PB = sw.P + np.diag(_as_b(sw, b))
    N = np.eye(ch.n) + np_.gamma2 * ch.W
    K = PB @ N @ PB.conj().T
    S = K.T * ch.Wstar
    return 0.5 * (S + S.conj().T)


def relay_power(ch: ChannelRealization, sw: SwitchSpec, np_: NoiseParams,
                a: np.ndarray, b: Optional[np.ndarray] = None) -> float:
    """Relay transmit power Ω(A, B) = aᴴS'(b)a."""
    a = np.asarray(a, dtype=complex)
    if not np.any(a != 0):
        raise ZeroGainError("Relay power needs a nonzero gain vector")
    S = compute_S(ch, sw, np_, b)
    return float(np.real(np.vdot(a, S @ a)))


def assemble_precoder(ch: ChannelRealization, sw: SwitchSpec, a: np.ndarray,
                      b: Optional[np.ndarray] = None) -> CMatrix:
    """G = H⁻ᵀ·A·(P+B)·H⁻¹, so that HᵀGH = A(P+B)."""
    _check_dims(ch, sw)
    a = np.asarray(a, dtype=complex)
    if not np.any(a != 0):
        raise ZeroGainError("Precoder needs a nonzero gain vector")
    PB = sw.P + np.diag(_as_b(sw, b))
    return ch.H_inv.T @ (a[:, None] * PB) @ ch.H_inv


def post_noise(ch: ChannelRealization, sw: SwitchSpec, np_: NoiseParams,
               a: np.ndarray, b: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Post-processing noise ε_i = R_ii − 1 + σ²/|a_i|² per station.

    Raises:
        ZeroGainError: If any a_i is zero
    """
    a = np.asarray(a, dtype=complex)
    gains = np.abs(a) ** 2
    if np.any(gains == 0):
        raise ZeroGainError(f"Zero amplification gain at stations {np.flatnonzero(gains == 0).tolist()}")
    R = compute_R(ch, sw, np_, b)
    return np.real(np.diag(R)) - 1.0 + np_.sigma2 / gains


def pair_coefficients(ch: ChannelRealization, pair: Tuple[int, int]) -> Tuple[float, complex, float]:
    """(h1, h2, h3) = (W[π,π], W[π,κ], W[κ,κ]) for a station pair (π, κ)."""
    pi, kappa = pair
    return float(np.real(ch.W[pi, pi])), complex(ch.W[pi, kappa]), float(np.real(ch.W[kappa, kappa]))


def make_outcome(ch: ChannelRealization, sw: SwitchSpec, np_: NoiseParams,
                 a: np.ndarray, b: Optional[np.ndarray] = None,
                 diagnostics: Optional[dict] = None) -> SolveOutcome:
    """Assemble a design and evaluate its noise, power and throughput."""
    design = RelayDesign.build(ch, sw, a, b)
    epsilon = post_noise(ch, sw, np_, design.a, design.b)
    power = relay_power(ch, sw, np_, design.a, design.b)
    return SolveOutcome(
        epsilon=epsilon,
        power_used=power,
        throughput=throughput(epsilon),
        design=design,
        diagnostics=dict(diagnostics or {}),
    )


@dataclass(frozen=True)
class RoundStatistics:
    """Empirical per-station noise, SNR and relay power from simulate_round."""

    epsilon: np.ndarray
    snr: np.ndarray
    relay_power: float


def simulate_round(ch: ChannelRealization, sw: SwitchSpec, np_: NoiseParams,
                   design: RelayDesign, n_symbols: int, rng_seed: int,
                   cancel_self_interference: bool = True) -> RoundStatistics:
    """
    Push random Gaussian symbols through uplink, relay and downlink.

    Each receiver divides by its gain a_i, removes its own known symbol b_i·x_i
    and measures the residual against the symbol it is meant to receive.

    Args:
        ch (ChannelRealization): Channel
        sw (SwitchSpec): Switch pattern
        np_ (NoiseParams): Noise parameters
        design (RelayDesign): Assembled design for this channel
        n_symbols (int): Symbols per station
        rng_seed (int): Seed for symbols and noise
        cancel_self_interference (bool): Subtract b_i·x_i at the receivers

    Returns:
        RoundStatistics: Empirical ε, SNR and relay power
    """
    if n_symbols < 1:
        raise ValueError(f"n_symbols must be >= 1, got {n_symbols}")

    rng = np.random.default_rng(rng_seed)
    n = ch.n

    def cn(scale: float) -> np.ndarray:
        return np.sqrt(scale / 2.0) * (rng.standard_normal((n, n_symbols))
                                       + 1j * rng.standard_normal((n, n_symbols)))

    x = cn(1.0)
    u = cn(np_.gamma2) if np_.gamma2 > 0 else np.zeros((n, n_symbols), dtype=complex)
    w = cn(np_.sigma2)

    y = ch.H @ x + u
    t = design.G @ y
    r = ch.H.T @ t + w

    r_hat = r / design.a[:, None]
    if cancel_self_interference:
        r_hat = r_hat - design.b[:, None] * x
    residual = r_hat - sw.P @ x

    epsilon = np.mean(np.abs(residual) ** 2, axis=1)
    power = float(np.mean(np.sum(np.abs(t) ** 2, axis=0)))
    return RoundStatistics(epsilon=epsilon, snr=1.0 / epsilon, relay_power=power)
