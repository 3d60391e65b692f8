"""
sdp.py

Small dense semidefinite-program solver for Hermitian problems in standard form:

    minimize    Tr(C X)
    subject to  Tr(A_k X) = rhs_k   or   Tr(A_k X) >= rhs_k,   X ⪰ 0

The Hermitian problem is mapped to a real symmetric one through the embedding
X ↦ [[Re X, −Im X], [Im X, Re X]]. Inequalities get a nonnegative slack each,
stored as extra diagonal entries of the (block-diagonal) real variable. The
real problem is solved by an infeasible-start primal-dual path-following method
with Nesterov-Todd scaling and a Mehrotra-style centering parameter. Primal or
dual infeasibility is reported through Farkas-type certificates read off the
diverging iterates.
"""

import numpy as np
import scipy.linalg
from dataclasses import dataclass, field
from typing import List, Optional, Tuple
import logging

from mimoswitch.core.numerics import CMatrix, is_hermitian
from mimoswitch.errors import NonHermitianError, SdpError

# Set up logging
logging.basicConfig(
    level=logging.INFO,
    format='%(asctime)s - %(name)s - %(levelname)s - %(message)s'
)
logger = logging.getLogger(__name__)

EQUAL = '='
GREATER_EQUAL = '>='
SENSES = (EQUAL, GREATER_EQUAL)

OPTIMAL = 'optimal'
INFEASIBLE = 'infeasible'
MAX_ITER = 'max_iter'


@dataclass
class SdpConstraint:
    """Tr(A X) (sense) rhs."""

    A: CMatrix
    sense: str
    rhs: float


@dataclass
class SdpProblem:
    """Standard-form Hermitian SDP."""

    C: CMatrix
    constraints: List[SdpConstraint] = field(default_factory=list)

    def __post_init__(self):
        self.C = np.asarray(self.C, dtype=complex)
        if not is_hermitian(self.C):
            raise NonHermitianError("SDP objective matrix must be Hermitian")
        for constraint in list(self.constraints):
            self._validate(constraint)

    @property
    def n(self) -> int:
        return self.C.shape[0]

    def _validate(self, constraint: SdpConstraint) -> None:
        constraint.A = np.asarray(constraint.A, dtype=complex)
        if constraint.A.shape != self.C.shape:
            raise ValueError(f"Constraint matrix shape {constraint.A.shape} does not match {self.C.shape}")
        if not is_hermitian(constraint.A):
            raise NonHermitianError("SDP constraint matrices must be Hermitian")
        if constraint.sense not in SENSES:
            raise ValueError(f"Constraint sense must be one of {SENSES}, got '{constraint.sense}'")
        if not np.isfinite(constraint.rhs):
            raise ValueError(f"Constraint right-hand side must be finite, got {constraint.rhs}")
        if not np.any(constraint.A != 0):
            raise ValueError("Constraint matrix must not be all zero")

    def add_constraint(self, A: CMatrix, sense: str, rhs: float) -> None:
        constraint = SdpConstraint(A=A, sense=sense, rhs=float(rhs))
        self._validate(constraint)
        self.constraints.append(constraint)


@dataclass(frozen=True)
class SdpSettings:
    """Interior-point settings."""

    max_iterations: int = 200
    tolerance: float = 1e-9
    step_fraction: float = 0.98
    infeasibility_tolerance: float = 1e-8

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError(f"max_iterations must be >= 1, got {self.max_iterations}")
        if not 0 < self.tolerance < 1:
            raise ValueError(f"tolerance must be in (0, 1), got {self.tolerance}")
        if not 0 < self.step_fraction < 1:
            raise ValueError(f"step_fraction must be in (0, 1), got {self.step_fraction}")


@dataclass
class SdpSolution:
    """
    Primal/dual result of an SDP solve.

    Attributes:
        X: Hermitian primal solution
        y: Dual multipliers, one per constraint
        objective: Tr(C X)
        dual_objective: Σ rhs_k y_k
        gap: objective − dual_objective
        status: 'optimal', 'infeasible' or 'max_iter'
        iterations: Interior-point iterations taken
        primal_residual, dual_residual, complementarity: Relative KKT residuals
        slacks: Values of the inequality slacks, in constraint order
        certificate: 'primal_infeasible' or 'dual_infeasible' when status is infeasible
    """

    X: CMatrix
    y: np.ndarray
    objective: float
    dual_objective: float
    gap: float
    status: str
    iterations: int
    primal_residual: float
    dual_residual: float
    complementarity: float
    slacks: np.ndarray
    certificate: Optional[str] = None

    @property
    def is_optimal(self) -> bool:
        return self.status == OPTIMAL

    def raise_for_status(self) -> None:
        """Raise SdpError unless the solve ended optimal."""
        if not self.is_optimal:
            raise SdpError(self)


def _embed(M: CMatrix) -> np.ndarray:
    """Real symmetric 2n×2n embedding of a Hermitian n×n matrix."""
    return np.block([[M.real, -M.imag], [M.imag, M.real]])


def _extract(X_real: np.ndarray, n: int) -> CMatrix:
    """Inverse of the embedding, averaging the duplicated blocks."""
    top, bottom = X_real[:n, :n], X_real[n:2 * n, n:2 * n]
    lower, upper = X_real[n:2 * n, :n], X_real[:n, n:2 * n]
    X = 0.5 * (top + bottom) + 0.5j * (lower - upper)
    return 0.5 * (X + X.conj().T)


def _sym(M: np.ndarray) -> np.ndarray:
    return 0.5 * (M + M.T)


def _compile(prob: SdpProblem) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Real block-diagonal data (A, b, C) and the inequality index list.

    The slack entries of A are left at zero; solve() sets them after the rows
    are normalized.
    """
    n = prob.n
    inequalities = [k for k, c in enumerate(prob.constraints) if c.sense == GREATER_EQUAL]
    size = 2 * n + len(inequalities)
    m = len(prob.constraints)

    A = np.zeros((m, size, size))
    b = np.zeros(m)
    for k, constraint in enumerate(prob.constraints):
        A[k, :2 * n, :2 * n] = 0.5 * _embed(constraint.A)
        b[k] = constraint.rhs

    C = np.zeros((size, size))
    C[:2 * n, :2 * n] = 0.5 * _embed(prob.C)
    return A, b, C, np.array(inequalities, dtype=int)


def _nt_scaling(X: np.ndarray, Z: np.ndarray) -> np.ndarray:
    """Scaling point W with W Z W = X."""
    L = np.linalg.cholesky(X)
    R = np.linalg.cholesky(Z)
    _, s, Vt = np.linalg.svd(R.T @ L)
    G = (L @ Vt.T) / np.sqrt(s)
    return G @ G.T


def _max_step(X: np.ndarray, dX: np.ndarray) -> float:
    """Largest α with X + α·dX ⪰ 0 (inf if dX keeps X PSD)."""
    smallest = scipy.linalg.eigh(dX, X, eigvals_only=True)[0]
    return np.inf if smallest >= 0 else -1.0 / smallest


def _interior_point(A: np.ndarray, b: np.ndarray, C: np.ndarray, settings: SdpSettings):
    """Path-following iterations on the real normalized problem."""
    m, size = A.shape[0], A.shape[1]
    tol = settings.tolerance

    def op(X):
        return np.einsum('kij,ij->k', A, X)

    def adj(y):
        return np.einsum('k,kij->ij', y, A)

    xi = max(10.0, np.sqrt(size), size * float(np.max((1.0 + np.abs(b)) / 2.0, initial=1.0)))
    eta = max(10.0, np.sqrt(size))
    X = xi * np.eye(size)
    Z = eta * np.eye(size)
    y = np.zeros(m)

    b_scale = 1.0 + np.linalg.norm(b)
    c_scale = 1.0 + np.linalg.norm(C)
    status, certificate = MAX_ITER, None
    iteration = 0
    residuals = (np.inf, np.inf, np.inf)

    def assess(X, y, Z, inf_tol):
        rp = b - op(X)
        Rd = C - Z - adj(y)
        pobj, dobj = float(np.sum(C * X)), float(b @ y)
        pres = np.linalg.norm(rp) / b_scale
        dres = np.linalg.norm(Rd) / c_scale
        comp = float(np.sum(X * Z)) / (1.0 + abs(pobj) + abs(dobj))
        cert = None
        if dobj > 0 and pres > np.sqrt(tol) and np.linalg.norm(C - Rd) / dobj <= inf_tol:
            cert = 'primal_infeasible'
        elif pobj < 0 and dres > np.sqrt(tol) and np.linalg.norm(op(X)) / -pobj <= inf_tol:
            cert = 'dual_infeasible'
        return rp, Rd, (pres, dres, comp), cert

    for iteration in range(1, settings.max_iterations + 1):
        rp, Rd, residuals, cert = assess(X, y, Z, settings.infeasibility_tolerance)
        if max(residuals) <= tol:
            status = OPTIMAL
            break
        if cert is not None:
            status, certificate = INFEASIBLE, cert
            break

        try:
            W = _nt_scaling(X, Z)
            Z_inv = np.linalg.inv(Z)
            WAW = np.matmul(np.matmul(W, A), W)
            M = np.einsum('kij,lij->kl', A, WAW)
            mu = float(np.sum(X * Z)) / size
            base = rp + op(W @ Rd @ W)

            def direction(sigma):
                Rc = sigma * mu * Z_inv - X
                dy = np.linalg.solve(M, base - op(Rc))
                dZ = _sym(Rd - adj(dy))
                dX = _sym(Rc - W @ dZ @ W)
                return dX, dy, dZ

            dX, dy, dZ = direction(0.0)
            alpha_p = min(1.0, _max_step(X, dX))
            alpha_d = min(1.0, _max_step(Z, dZ))
            mu_aff = float(np.sum((X + alpha_p * dX) * (Z + alpha_d * dZ))) / size
            sigma = min(1.0, max(0.0, mu_aff / mu) ** 3)

            dX, dy, dZ = direction(sigma)
            alpha_p = min(1.0, settings.step_fraction * _max_step(X, dX))
            alpha_d = min(1.0, settings.step_fraction * _max_step(Z, dZ))
        except (np.linalg.LinAlgError, scipy.linalg.LinAlgError) as e:
            logger.debug(f"Interior point stopped at iteration {iteration}: {str(e)}")
            break

        X = _sym(X + alpha_p * dX)
        y = y + alpha_d * dy
        Z = _sym(Z + alpha_d * dZ)

        if max(alpha_p, alpha_d) < 1e-12:
            logger.debug(f"Interior point stalled at iteration {iteration}")
            break

    if status == MAX_ITER:
        # Accept a near-converged point that stalled on rounding
        _, _, residuals, cert = assess(X, y, Z, 1e2 * settings.infeasibility_tolerance)
        if residuals[0] <= 1e-8 and residuals[1] <= 1e-8 and residuals[2] <= 1e-7:
            status = OPTIMAL
        elif cert is not None:
            status, certificate = INFEASIBLE, cert

    return X, y, Z, status, certificate, iteration, residuals


def solve(prob: SdpProblem, settings: Optional[SdpSettings] = None) -> SdpSolution:
    """
    Solve a Hermitian standard-form SDP.

    Args:
        prob (SdpProblem): The problem
        settings (Optional[SdpSettings]): Interior-point settings

    Returns:
        SdpSolution: Primal/dual solution with status; call raise_for_status()
            when an optimal solution is required
    """
    settings = settings or SdpSettings()
    if not prob.constraints:
        raise ValueError("SDP needs at least one constraint")
    n = prob.n
    A, b, C, inequalities = _compile(prob)

    # Rows normalized on the matrix block only; slacks keep a unit coefficient
    row_norms = np.linalg.norm(A[:, :2 * n, :2 * n].reshape(A.shape[0], -1), axis=1)
    row_norms[row_norms == 0] = 1.0
    c_norm = float(np.linalg.norm(C)) or 1.0
    A_n = A / row_norms[:, None, None]
    for j, k in enumerate(inequalities):
        A_n[k, 2 * n + j, 2 * n + j] = -1.0
    b_n = b / row_norms
    C_n = C / c_norm

    X_real, y_n, _, status, certificate, iterations, residuals = _interior_point(A_n, b_n, C_n, settings)

    X = _extract(X_real, n)
    y = c_norm * y_n / row_norms
    slacks = np.diag(X_real)[2 * n:][:len(inequalities)] * row_norms[inequalities]
    objective = float(np.real(np.trace(prob.C @ X)))
    dual_objective = float(b @ y)

    solution = SdpSolution(
        X=X,
        y=y,
        objective=objective,
        dual_objective=dual_objective,
        gap=objective - dual_objective,
        status=status,
        iterations=iterations,
        primal_residual=float(residuals[0]),
        dual_residual=float(residuals[1]),
        complementarity=float(residuals[2]),
        slacks=slacks,
        certificate=certificate,
    )
    logger.debug(
        f"SDP n={n} m={len(prob.constraints)}: {status} after {iterations} iterations, "
        f"objective {objective:.10g}, gap {solution.gap:.3e}"
    )
    return solution


def rank_one_extract(X: CMatrix) -> Tuple[np.ndarray, float]:
    """
    Best rank-one factor of a Hermitian PSD matrix.

    Args:
        X (CMatrix): Hermitian PSD matrix

    Returns:
        Tuple[np.ndarray, float]: (v, ‖X − vvᴴ‖_F / ‖X‖_F) with v the top
            eigenvector scaled by the square root of the top eigenvalue
    """
    X = np.asarray(X, dtype=complex)
    eigenvalues, eigenvectors = np.linalg.eigh(0.5 * (X + X.conj().T))
    v = np.sqrt(max(eigenvalues[-1], 0.0)) * eigenvectors[:, -1]
    norm = np.linalg.norm(X)
    residual = float(np.linalg.norm(X - np.outer(v, v.conj())) / norm) if norm > 0 else 0.0
    return v, residual
