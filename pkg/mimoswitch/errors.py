"""
errors.py

Exception hierarchy shared by every mimoswitch module.

Configuration problems derive from ConfigError (a ValueError), numerical
failures from NumericalError (an ArithmeticError). The CLI maps the first
family to exit code 1 and the second to exit code 2.
"""

from typing import Any, Optional, Sequence, Tuple


class MimoSwitchError(Exception):
    """Base class for all errors raised by the package."""


class ConfigError(MimoSwitchError, ValueError):
    """Invalid experiment or solver configuration."""


class UnknownSchemeError(ConfigError):
    """A scheme identifier that is not registered."""

    def __init__(self, name: str, valid: Sequence[str]):
        self.name = name
        self.valid = tuple(valid)
        super().__init__(f"Unknown scheme '{name}'. Valid schemes: {', '.join(self.valid)}")


class PairingError(ConfigError):
    """The operation needs a pairwise (involutive derangement) switch pattern."""


class MissingSchemeError(ConfigError):
    """A scheme requested from a result is not present at every SNR point."""


class NonHermitianError(MimoSwitchError, ValueError):
    """A matrix that must be Hermitian is not."""


class NumericalError(MimoSwitchError, ArithmeticError):
    """Base class for numerical failures."""


class IllConditionedError(NumericalError):
    """Matrix is singular or its condition number exceeds the configured cap."""

    def __init__(self, condition: float, cap: float):
        self.condition = condition
        self.cap = cap
        super().__init__(f"Matrix condition number {condition:.3e} exceeds cap {cap:.1e}")


class NoRealRootError(NumericalError):
    """Polynomial has no acceptable real root."""

    def __init__(self, roots: Any):
        self.roots = roots
        super().__init__(f"No real root found among {roots}")


class ZeroGainError(NumericalError, ValueError):
    """An amplification gain a_i is zero."""


class BracketError(NumericalError):
    """Bracketed search failed to find a sign change."""

    def __init__(self, message: str, bracket: Optional[Tuple[float, float]] = None):
        self.bracket = bracket
        super().__init__(message)


class SdpError(NumericalError):
    """SDP solve ended without an optimal solution."""

    def __init__(self, solution: Any):
        self.solution = solution
        super().__init__(
            f"SDP solve ended with status '{solution.status}' after "
            f"{solution.iterations} iterations"
        )


class InfeasibleCapsError(NumericalError):
    """Per-station noise caps cannot be met for the given gains."""

    def __init__(self, stations: Sequence[int]):
        self.stations = tuple(int(i) for i in stations)
        super().__init__(f"Noise caps infeasible for stations {list(self.stations)}")
