"""Custom exceptions for edgekit."""

from __future__ import annotations


class EdgekitError(Exception):
    """Base exception for all edgekit errors."""

    pass


class InvalidParameterError(EdgekitError, ValueError):
    """Raised when an argument violates an operation's precondition."""

    def __init__(self, name: str, value: object, reason: str):
        self.name = name
        self.value = value
        self.reason = reason
        super().__init__(f"Invalid {name}={value!r}: {reason}")


class OutOfSupportError(InvalidParameterError):
    """Raised when an argument lies outside a supported range."""

    def __init__(self, name: str, value: float, lo: float, hi: float):
        self.lo = lo
        self.hi = hi
        super().__init__(name, value, f"supported range is [{lo}, {hi}]")


class ConvergenceError(EdgekitError):
    """Raised when an iterative solver stops before meeting its tolerance."""

    def __init__(self, message: str, iterations: int, residual: float):
        self.iterations = iterations
        self.residual = residual
        super().__init__(f"{message} (iterations: {iterations}, residual: {residual:.3e})")


class UndecidedPathError(EdgekitError):
    """Raised when a Riccati path exhausts its x-budget without a verdict."""

    def __init__(self, lam: float, x_end: float, explosions: int):
        self.lam = lam
        self.x_end = x_end
        self.explosions = explosions
        super().__init__(
            f"Riccati path undecided at lambda={lam:.6g}: budget ended at x={x_end:.3f} "
            f"after {explosions} explosion(s)"
        )


class PainleveBlowupError(EdgekitError):
    """Raised when the Hastings-McLeod integration leaves the admissible region."""

    def __init__(self, s: float, u: float):
        self.s = s
        self.u = u
        super().__init__(f"Painleve II integration blew up at s={s:.4f} (u={u:.4g})")


class ExperimentError(EdgekitError):
    """Raised when an experiment run fails; partial outputs are removed."""

    def __init__(self, method: str, message: str):
        self.method = method
        super().__init__(f"Experiment '{method}' failed: {message}")


class TruncationWarning(UserWarning):
    """Warned when the stochastic Airy truncation point may bias the spectrum."""

    pass
