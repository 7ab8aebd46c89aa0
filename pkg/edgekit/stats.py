"""Statistics for comparing edge-statistic samples with each other and with references.

Examples:
    >>> import numpy as np
    >>> from edgekit.stats import binomial_ci, ks_distance
    >>> ks_distance(np.array([0.1, 0.2]), np.array([0.3, 0.4]))
    1.0
    >>> binomial_ci(50, 100, 0.95)
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import TYPE_CHECKING, Any, Literal

import numpy as np
import pandas as pd
from scipy import stats as sps

from edgekit.exceptions import InvalidParameterError

if TYPE_CHECKING:
    from edgekit.harness import RunManifest

logger = logging.getLogger(__name__)

__all__ = [
    "UNDECIDED_FLAG_FRACTION",
    "CdfEstimate",
    "TailEstimate",
    "empirical_survival",
    "ks_distance",
    "fit_tail_exponent",
    "binomial_ci",
    "sample_moments",
    "tail_prediction",
]

Method = Literal["hermite", "laguerre", "sao", "riccati", "painleve"]
Side = Literal["right", "left"]

# Estimates with more undecided draws than this are flagged
UNDECIDED_FLAG_FRACTION = 0.01


@dataclass(frozen=True)
class CdfEstimate:
    """Estimated survival function ``lambda -> P(Lambda > lambda)`` on a grid.

    Attributes:
        lambda_grid: Ascending evaluation points.
        survival: Survival probabilities, nonincreasing along the grid.
        stderr: Binomial standard errors (zero for reference curves).
        samples: Draws requested.
        method: Route that produced the estimate.
        beta: Inverse temperature.
        undecided: Draws excluded because their path was undecided.
        manifest: Manifest of the run that produced this estimate.
    """

    lambda_grid: np.ndarray
    survival: np.ndarray
    stderr: np.ndarray
    samples: int
    method: Method
    beta: float
    undecided: int = 0
    manifest: RunManifest | None = None

    def __post_init__(self) -> None:
        grid = np.asarray(self.lambda_grid, dtype=float)
        survival = np.asarray(self.survival, dtype=float)
        stderr = np.asarray(self.stderr, dtype=float)
        if grid.ndim != 1 or grid.size < 1:
            raise InvalidParameterError("lambda_grid", grid.shape, "need a non-empty 1-D grid")
        if survival.shape != grid.shape or stderr.shape != grid.shape:
            raise InvalidParameterError("survival", survival.shape, "lengths must match the grid")
        if np.any(np.diff(grid) <= 0):
            raise InvalidParameterError("lambda_grid", grid, "must be strictly ascending")
        if np.any((survival < 0) | (survival > 1)):
            raise InvalidParameterError("survival", survival, "must lie in [0, 1]")
        if np.any(np.diff(survival) > 0):
            raise InvalidParameterError("survival", survival, "must be nonincreasing")
        object.__setattr__(self, "lambda_grid", grid)
        object.__setattr__(self, "survival", survival)
        object.__setattr__(self, "stderr", stderr)

    @property
    def undecided_fraction(self) -> float:
        return self.undecided / self.samples if self.samples else 0.0

    @property
    def flagged(self) -> bool:
        """True when too many draws were undecided to trust the estimate."""
        return self.undecided_fraction > UNDECIDED_FLAG_FRACTION

    def to_frame(self) -> pd.DataFrame:
        """DataFrame with the ``lambda,survival,stderr`` columns."""
        return pd.DataFrame(
            {"lambda": self.lambda_grid, "survival": self.survival, "stderr": self.stderr}
        )


def empirical_survival(draws: np.ndarray, lambda_grid: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Fraction of ``draws`` strictly above each grid point, with binomial errors.

    One set of draws serves the whole grid, so the result is exactly
    nonincreasing.
    """
    values = np.sort(np.asarray(draws, dtype=float))
    if values.size == 0:
        raise InvalidParameterError("draws", values.size, "need at least one draw")
    grid = np.asarray(lambda_grid, dtype=float)
    m = values.size
    above = m - np.searchsorted(values, grid, side="right")
    p = above / m
    return p, np.sqrt(p * (1.0 - p) / m)


def ks_distance(samples_a: np.ndarray, samples_b: np.ndarray) -> float:
    """Two-sample Kolmogorov-Smirnov statistic ``sup |F_a - F_b|``."""
    a = np.sort(np.asarray(samples_a, dtype=float).ravel())
    b = np.sort(np.asarray(samples_b, dtype=float).ravel())
    if a.size == 0 or b.size == 0:
        raise InvalidParameterError("samples", (a.size, b.size), "both samples must be non-empty")
    points = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, points, side="right") / a.size
    cdf_b = np.searchsorted(b, points, side="right") / b.size
    return float(np.max(np.abs(cdf_a - cdf_b)))


def tail_prediction(beta: float, side: Side) -> float:
    """Leading log-tail slope: ``-(2/3) beta`` (right) or ``-beta/24`` (left)."""
    if side == "right":
        return -2.0 * beta / 3.0
    if side == "left":
        return -beta / 24.0
    raise InvalidParameterError("side", side, "must be 'right' or 'left'")


def fit_tail_exponent(
    a_values: np.ndarray, log_probs: np.ndarray, side: Side
) -> tuple[float, float]:
    """Least-squares slope of ``log P`` against ``a^{3/2}`` (right) or ``a^3`` (left).

    Returns:
        (slope, r2) of the fit.
    """
    a = np.asarray(a_values, dtype=float)
    y = np.asarray(log_probs, dtype=float)
    if a.shape != y.shape or a.ndim != 1:
        raise InvalidParameterError("log_probs", y.shape, "must match a_values")
    if a.size < 3:
        raise InvalidParameterError("a_values", a.size, "need at least 3 points")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(y))):
        raise InvalidParameterError("log_probs", y, "inputs must be finite")
    if np.any(a <= 0):
        raise InvalidParameterError("a_values", a, "must be > 0")
    if side == "right":
        x = a**1.5
    elif side == "left":
        x = a**3
    else:
        raise InvalidParameterError("side", side, "must be 'right' or 'left'")
    fit = sps.linregress(x, y)
    return float(fit.slope), float(fit.rvalue**2)


def binomial_ci(successes: int, trials: int, level: float = 0.95) -> tuple[float, float]:
    """Wilson-score interval for a binomial proportion."""
    if trials < 1:
        raise InvalidParameterError("trials", trials, "must be >= 1")
    if not 0 <= successes <= trials:
        raise InvalidParameterError("successes", successes, f"need 0 <= successes <= {trials}")
    if not 0 < level < 1:
        raise InvalidParameterError("level", level, "must lie in (0, 1)")
    z = float(sps.norm.ppf(0.5 + level / 2.0))
    n = float(trials)
    p = successes / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2.0 * n)) / denom
    half = z * math.sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == trials else min(1.0, center + half)
    return lo, hi


@dataclass(frozen=True)
class TailEstimate:
    """Monte Carlo tail probability at one point.

    ``probability`` and ``stderr`` are the plain binomial estimate;
    ``ci_lo``/``ci_hi`` the Wilson interval, whose upper end is the only
    usable figure when no path hit the tail.
    """

    a: float
    probability: float
    stderr: float
    ci_lo: float
    ci_hi: float
    hits: int
    trials: int

    @classmethod
    def from_counts(cls, a: float, hits: int, trials: int, level: float = 0.95) -> TailEstimate:
        lo, hi = binomial_ci(hits, trials, level)
        p = hits / trials
        return cls(float(a), p, math.sqrt(p * (1.0 - p) / trials), lo, hi, int(hits), int(trials))

    @property
    def zero_hits(self) -> bool:
        return self.hits == 0

    def to_row(self) -> dict[str, Any]:
        return {
            "a": self.a,
            "probability": self.probability,
            "stderr": self.stderr,
            "ci_lo": self.ci_lo,
            "ci_hi": self.ci_hi,
            "hits": self.hits,
            "trials": self.trials,
        }


def sample_moments(samples: np.ndarray) -> dict[str, Any]:
    """Mean, standard deviation and skewness of a sample."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size == 0:
        raise InvalidParameterError("samples", 0, "need at least one value")
    sd = float(np.std(x, ddof=1)) if x.size > 1 else 0.0
    skew = float(sps.skew(x)) if x.size > 2 and sd > 0 else 0.0
    return {"count": int(x.size), "mean": float(np.mean(x)), "sd": sd, "skewness": skew}
