"""
numerics.py

Dense complex matrix helpers and scalar root finding used by every other module:
1. Guarded matrix inversion with a condition-number cap
2. Real roots of a quartic via companion-matrix eigenvalues
3. PSD checks on Hermitian matrices

Matrices are plain numpy arrays of dtype complex128.
"""

import numpy as np
from dataclasses import dataclass
from typing import Tuple
import logging

from mimoswitch.errors import IllConditionedError, NoRealRootError, NonHermitianError

# Set up logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

# Type alias for the dense complex matrices passed around the package
CMatrix = np.ndarray

DEFAULT_CONDITION_CAP = 1e12
HERMITIAN_TOLERANCE = 1e-12
REAL_ROOT_TOLERANCE = 1e-8


def invert(m: CMatrix, cond_cap: float = DEFAULT_CONDITION_CAP) -> CMatrix:
    """
    Invert a square matrix, refusing singular or ill-conditioned input.

    Args:
        m (CMatrix): Square matrix
        cond_cap (float): Largest accepted 2-norm condition number

    Returns:
        CMatrix: The inverse of m

    Raises:
        ValueError: If m is not square
        IllConditionedError: If the condition number exceeds cond_cap
    """
    m = np.asarray(m, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"invert expects a square matrix, got shape {m.shape}")

    condition = np.linalg.cond(m)
    if not np.isfinite(condition) or condition > cond_cap:
        raise IllConditionedError(float(condition), cond_cap)

    return np.linalg.inv(m)


def is_hermitian(m: CMatrix, tol: float = HERMITIAN_TOLERANCE) -> bool:
    """Elementwise test of M = Mᴴ, relative to the largest entry."""
    m = np.asarray(m)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    scale = max(1.0, float(np.max(np.abs(m)))) if m.size else 1.0
    return bool(np.max(np.abs(m - m.conj().T), initial=0.0) <= tol * scale)


def hermitian_part(m: CMatrix) -> CMatrix:
    """Return (M + Mᴴ)/2."""
    return 0.5 * (m + m.conj().T)


def quadratic_form(m: CMatrix, v: np.ndarray) -> float:
    """Real part of vᴴ M v."""
    return float(np.real(np.vdot(v, m @ v)))


def psd_check(m: CMatrix, tol: float = 1e-9) -> Tuple[bool, float]:
    """
    Check whether a Hermitian matrix is positive semidefinite.

    Args:
        m (CMatrix): Hermitian matrix
        tol (float): Relative tolerance on the smallest eigenvalue

    Returns:
        Tuple[bool, float]: (is PSD, smallest eigenvalue)

    Raises:
        NonHermitianError: If m is not Hermitian
    """
    m = np.asarray(m, dtype=complex)
    if not is_hermitian(m):
        raise NonHermitianError(f"psd_check expects a Hermitian matrix (shape {m.shape})")

    eigenvalues = np.linalg.eigvalsh(hermitian_part(m))
    smallest = float(eigenvalues[0])
    norm2 = float(np.max(np.abs(eigenvalues)))
    return smallest >= -tol * norm2, smallest


@dataclass(frozen=True)
class QuarticCoefficients:
    """Coefficients of c4·x⁴ + c3·x³ + c2·x² + c1·x + c0."""

    c4: float
    c3: float
    c2: float
    c1: float
    c0: float

    def __post_init__(self):
        if not np.all(np.isfinite(self.as_array())):
            raise ValueError(f"Quartic coefficients must be finite: {self.as_array()}")

    def as_array(self) -> np.ndarray:
        """Coefficients, highest degree first."""
        return np.array([self.c4, self.c3, self.c2, self.c1, self.c0], dtype=float)

    def __call__(self, x: float) -> float:
        return float(np.polyval(self.as_array(), x))


def _companion_roots(coefficients: np.ndarray) -> np.ndarray:
    """Eigenvalues of the companion matrix of a monic-normalized polynomial."""
    degree = len(coefficients) - 1
    if degree == 0:
        return np.array([], dtype=complex)
    companion = np.zeros((degree, degree))
    companion[0, :] = -coefficients[1:] / coefficients[0]
    companion[1:, :-1] = np.eye(degree - 1)
    return np.linalg.eigvals(companion)


def _newton_polish(coefficients: np.ndarray, x: float, steps: int = 3) -> float:
    """A few Newton steps on a real root, kept only while the residual drops."""
    derivative = np.polyder(coefficients)
    best, best_residual = x, abs(np.polyval(coefficients, x))
    for _ in range(steps):
        slope = np.polyval(derivative, x)
        if slope == 0:
            break
        x = x - np.polyval(coefficients, x) / slope
        residual = abs(np.polyval(coefficients, x))
        if residual < best_residual:
            best, best_residual = x, residual
        else:
            break
    return float(best)


def real_roots(q: QuarticCoefficients) -> np.ndarray:
    """
    All real roots of a quartic in ascending order.

    Leading coefficients that are negligible relative to the largest one are
    dropped before the companion eigenvalues are taken. Nearly-real roots
    (double roots split by rounding) are accepted when their polished real
    part meets the residual bound.

    Args:
        q (QuarticCoefficients): Polynomial coefficients

    Returns:
        np.ndarray: Polished real roots, sorted ascending

    Raises:
        NoRealRootError: If no real root meets the acceptance criteria
    """
    coefficients = q.as_array()
    scale = float(np.max(np.abs(coefficients)))
    if scale == 0.0:
        raise NoRealRootError([])

    # Drop vanishing leading terms
    first = 0
    while first < len(coefficients) - 1 and abs(coefficients[first]) <= 1e-14 * scale:
        first += 1
    trimmed = coefficients[first:]

    roots = _companion_roots(trimmed)
    residual_bound = 1e-8 * scale

    accepted = []
    for root in roots:
        x = _newton_polish(trimmed, float(root.real))
        if abs(root.imag) <= REAL_ROOT_TOLERANCE * (1.0 + abs(root.real)):
            accepted.append(x)
        elif abs(np.polyval(trimmed, x)) <= residual_bound:
            # complex pair from a split double root
            accepted.append(x)

    if not accepted:
        raise NoRealRootError(roots)
    return np.sort(np.array(accepted, dtype=float))


def largest_real_root(q: QuarticCoefficients) -> float:
    """
    Largest real root of a quartic.

    Args:
        q (QuarticCoefficients): Polynomial coefficients

    Returns:
        float: The maximum real root

    Raises:
        NoRealRootError: If no real root meets the acceptance criteria
    """
    root = float(real_roots(q)[-1])
    logger.debug(f"Largest real root {root:.12g}")
    return root
