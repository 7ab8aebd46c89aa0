"""Riccati diffusion of the stochastic Airy operator.

For a fixed level lambda the log-derivative ``p = psi'/psi`` of the
eigenvalue equation solves

    dp = (x - lambda - p^2) dx - (2/sqrt(beta)) dW,

started at +infinity (the cap ``P0``) and restarted there after every
explosion to -infinity. The number of explosions equals the number of
eigenvalues at most lambda, so bisecting lambda on one fixed Brownian path
samples Lambda_0, Lambda_1, ... directly.

Examples:
    >>> from edgekit.randkit import make_stream
    >>> from edgekit.riccati import RiccatiConfig, sample_lambda0
    >>> sample_lambda0(beta=2.0, config=RiccatiConfig(), stream=make_stream(5, 0))
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from edgekit._kernels import integrate_riccati
from edgekit._kernels.riccati import OVERFLOW, SURVIVED
from edgekit._routes.base import run_draws
from edgekit.exceptions import ConvergenceError, InvalidParameterError, UndecidedPathError
from edgekit.randkit import RngStream
from edgekit.stats import CdfEstimate, Side, TailEstimate, empirical_survival

logger = logging.getLogger(__name__)

__all__ = [
    "DEFAULT_BRACKET",
    "RiccatiConfig",
    "ExplosionRecord",
    "BrownianPath",
    "simulate_path",
    "count_explosions",
    "sample_lambda0",
    "sample_lambda_k",
    "estimate_cdf",
    "tail_counts",
    "tail_probability",
]

DEFAULT_BRACKET = (-6.0, 8.0)
MAX_WIDEN = 12

# Brownian path cells drawn per extension
PATH_CHUNK = 8192


class RiccatiConfig(BaseModel):
    """Truncation and step-control parameters of the Riccati integrator.

    ``blow_threshold`` defaults to ``-cap``.
    """

    model_config = ConfigDict(frozen=True, extra="forbid")

    cap: float = Field(1e3, gt=0)
    blow_threshold: float = -1e3
    dt_max: float = Field(1e-3, gt=0)
    adapt_c: float = Field(0.1, gt=0)
    horizon_margin: float = Field(10.0, gt=0)
    survive_margin: float = Field(1.0, gt=0)
    budget_margin: float = Field(60.0, gt=0)
    bisect_tol: float = Field(1e-3, gt=0)
    max_explosions: int = Field(64, ge=1)

    @model_validator(mode="before")
    @classmethod
    def _default_blow_threshold(cls, data: Any) -> Any:
        if isinstance(data, dict) and data.get("blow_threshold") is None:
            data = {**data, "blow_threshold": -float(data.get("cap", 1e3))}
        return data

    @model_validator(mode="after")
    def _check_threshold(self) -> RiccatiConfig:
        if self.blow_threshold > -self.cap:
            raise ValueError(
                f"blow_threshold={self.blow_threshold} must be <= -cap = {-self.cap}"
            )
        if self.budget_margin <= self.horizon_margin:
            raise ValueError("budget_margin must exceed horizon_margin")
        return self


@dataclass(frozen=True)
class ExplosionRecord:
    """Explosion locations of one path at one level.

    Attributes:
        lam: Level lambda.
        times: Strictly increasing x-locations of the explosions.
        survived: True if the path met the survival criterion after its
            last explosion; False means the hard budget ran out (undecided).
        x_end: Where integration stopped.
    """

    lam: float
    times: np.ndarray
    survived: bool
    x_end: float

    @property
    def count(self) -> int:
        return int(self.times.size)

    @property
    def undecided(self) -> bool:
        return not self.survived


class BrownianPath:
    """One Brownian path on the grid ``k * step``, grown on demand.

    Increments are drawn in fixed-size chunks in grid order, so the value
    at any grid point is the same however far the path was extended
    before. Every level evaluated on the same path sees the same noise.
    """

    def __init__(self, stream: RngStream | None, step: float):
        if not step > 0:
            raise InvalidParameterError("step", step, "must be > 0")
        self._stream = stream
        self.step = float(step)
        self._w = np.zeros(1)

    @property
    def values(self) -> np.ndarray:
        return self._w

    @property
    def x_max(self) -> float:
        return (self._w.size - 1) * self.step

    def ensure(self, x_end: float) -> np.ndarray:
        """Extend the path to cover [0, x_end] and return it."""
        if self._stream is None:
            return self._w
        needed = int(math.ceil(x_end / self.step)) + 2
        while self._w.size < needed:
            dw = math.sqrt(self.step) * np.asarray(self._stream.normal(PATH_CHUNK))
            self._w = np.concatenate([self._w, self._w[-1] + np.cumsum(dw)])
        return self._w


def _sigma(beta: float) -> float:
    if not beta > 0:
        raise InvalidParameterError("beta", beta, "must be > 0")
    return 0.0 if math.isinf(beta) else 2.0 / math.sqrt(beta)


def simulate_path(
    lam: float,
    beta: float,
    config: RiccatiConfig,
    stream: RngStream | None,
    path: BrownianPath | None = None,
) -> ExplosionRecord:
    """Integrate one Riccati path at level ``lam`` and record its explosions.

    Euler-Maruyama with ``dt = min(dt_max, adapt_c / (1 + p^2))`` from
    ``p(0) = cap``; each crossing of ``blow_threshold`` is an explosion and
    restarts p at ``cap`` at the same x. The path survives once
    ``p >= sqrt(max(x - lam, 0)) - survive_margin`` at some
    ``x >= max(last explosion, lam, 0) + horizon_margin``. Integration
    stops undecided at ``x = max(lam, 0) + budget_margin``.

    Args:
        lam: Level.
        beta: Inverse temperature; ``inf`` integrates the noiseless ODE.
        config: Integrator parameters.
        stream: Stream for the Brownian path (ignored when ``path`` is given).
        path: Shared Brownian path, for coupling several levels.
    """
    sigma = _sigma(beta)
    if path is None:
        path = BrownianPath(None if sigma == 0.0 else stream, config.dt_max)
    x_limit = max(lam, 0.0) + config.budget_margin
    w = path.ensure(x_limit)
    capacity = config.max_explosions
    while True:
        times = np.empty(capacity)
        n, status, x_end = integrate_riccati(
            float(lam), sigma, w, path.step, config.cap, config.blow_threshold,
            config.dt_max, config.adapt_c, config.horizon_margin,
            config.survive_margin, x_limit, times,
        )
        if status != OVERFLOW:
            break
        capacity *= 4
    return ExplosionRecord(
        lam=float(lam), times=times[:n].copy(), survived=status == SURVIVED, x_end=float(x_end)
    )


def count_explosions(
    lam: float,
    beta: float,
    config: RiccatiConfig,
    stream: RngStream | None,
    path: BrownianPath | None = None,
) -> int:
    """Number of explosions of the path at level ``lam``.

    Raises:
        UndecidedPathError: If the path ran out of budget.
    """
    record = simulate_path(lam, beta, config, stream, path)
    if record.undecided:
        raise UndecidedPathError(record.lam, record.x_end, record.count)
    return record.count


def _threshold(
    counter,
    j: int,
    lo: float,
    hi: float,
    tol: float,
) -> tuple[float, float]:
    """Bracket ``(lo, hi)`` of width <= tol with count(lo) <= j < count(hi).

    If two eigenvalues share the final bracket, bisection continues until
    count(hi) is exactly j + 1, keeping consecutive thresholds distinct.
    """
    width = hi - lo
    for _ in range(MAX_WIDEN):
        if counter(lo) <= j:
            break
        lo -= width
        width *= 2.0
        logger.debug("widened lower bracket to %.3f", lo)
    else:
        raise ConvergenceError(f"no lower bracket for Lambda_{j}", MAX_WIDEN, float("nan"))
    for _ in range(MAX_WIDEN):
        count_hi = counter(hi)
        if count_hi > j:
            break
        hi += width
        width *= 2.0
        logger.debug("widened upper bracket to %.3f", hi)
    else:
        raise ConvergenceError(f"no upper bracket for Lambda_{j}", MAX_WIDEN, float("nan"))

    floor = 64.0 * np.finfo(float).eps * max(1.0, abs(lo), abs(hi))
    while hi - lo > tol or (count_hi > j + 1 and hi - lo > floor):
        mid = 0.5 * (lo + hi)
        count_mid = counter(mid)
        if count_mid > j:
            hi, count_hi = mid, count_mid
        else:
            lo = mid
    return lo, hi


def _counter(beta: float, config: RiccatiConfig, stream: RngStream | None):
    sigma = _sigma(beta)
    path = BrownianPath(None if sigma == 0.0 else stream, config.dt_max)

    def counter(lam: float) -> int:
        return count_explosions(lam, beta, config, stream, path)

    return counter


def _check_bracket(bracket: tuple[float, float], tol: float) -> None:
    lo, hi = bracket
    if not lo < hi:
        raise InvalidParameterError("bracket", bracket, "need lo < hi")
    if not tol > 0:
        raise InvalidParameterError("tol", tol, "must be > 0")


def sample_lambda0(
    beta: float,
    config: RiccatiConfig,
    stream: RngStream | None,
    bracket: tuple[float, float] = DEFAULT_BRACKET,
    tol: float | None = None,
) -> float:
    """One draw of Lambda_0: the level where the explosion count first reaches 1.

    All levels are evaluated on one Brownian path; the bracket is widened
    if it does not enclose the threshold.
    """
    tol = config.bisect_tol if tol is None else tol
    _check_bracket(bracket, tol)
    lo, hi = _threshold(_counter(beta, config, stream), 0, *bracket, tol)
    return 0.5 * (lo + hi)


def sample_lambda_k(
    beta: float,
    k: int,
    config: RiccatiConfig,
    stream: RngStream | None,
    bracket: tuple[float, float] = DEFAULT_BRACKET,
    tol: float | None = None,
) -> np.ndarray:
    """One joint draw of ``(Lambda_0, ..., Lambda_k)``, strictly increasing.

    Lambda_j is the level where the count on the shared path first
    exceeds j; each search starts above the previous threshold.
    """
    if k < 0:
        raise InvalidParameterError("k", k, "must be >= 0")
    tol = config.bisect_tol if tol is None else tol
    _check_bracket(bracket, tol)
    counter = _counter(beta, config, stream)
    lo, hi = bracket
    values = np.empty(k + 1)
    for j in range(k + 1):
        if hi <= lo:
            hi = lo + (bracket[1] - bracket[0])
        lo_j, hi_j = _threshold(counter, j, lo, hi, tol)
        values[j] = 0.5 * (lo_j + hi_j)
        lo = hi_j
    return values


def estimate_cdf(
    beta: float,
    lambda_grid: np.ndarray,
    samples: int,
    config: RiccatiConfig,
    master_seed: int,
    index: int = 0,
    threads: int | None = None,
) -> CdfEstimate:
    """Estimate ``P(Lambda_index > lambda)`` on a grid from ``samples`` draws.

    Each draw serves the whole grid, so the estimate is nonincreasing.
    Undecided draws are excluded and counted; the estimate is flagged
    when they exceed 1 %.
    """
    grid = np.asarray(lambda_grid, dtype=float)
    if samples < 1:
        raise InvalidParameterError("samples", samples, "must be >= 1")

    def worker(stream: RngStream) -> float | None:
        try:
            if index == 0:
                return sample_lambda0(beta, config, stream)
            return float(sample_lambda_k(beta, index, config, stream)[index])
        except UndecidedPathError:
            return None

    draws = run_draws(worker, samples, master_seed, threads)
    decided = np.array([d for d in draws if d is not None], dtype=float)
    undecided = samples - decided.size
    if decided.size == 0:
        raise UndecidedPathError(float(grid[0]), float("nan"), 0)
    survival, stderr = empirical_survival(decided, grid)
    estimate = CdfEstimate(grid, survival, stderr, samples, "riccati", beta, undecided)
    if estimate.flagged:
        logger.warning(
            "%.2f%% of Riccati draws undecided (beta=%g)", 100 * estimate.undecided_fraction, beta
        )
    return estimate


def _tail_level(a: float, side: Side) -> float:
    if side == "right":
        return -a
    if side == "left":
        return a
    raise InvalidParameterError("side", side, "must be 'right' or 'left'")


def tail_counts(
    beta: float,
    a_values: np.ndarray,
    side: Side,
    samples: int,
    config: RiccatiConfig,
    master_seed: int,
    threads: int | None = None,
) -> tuple[np.ndarray, int]:
    """Tail hits for every ``a`` on shared paths, plus the undecided count.

    Right: the path explodes at level ``-a`` (Lambda_0 <= -a, TW > a).
    Left: the path does not explode at level ``a`` (Lambda_0 > a).
    """
    a = np.asarray(a_values, dtype=float)
    if a.ndim != 1 or a.size < 1 or np.any(~(a > 0)):
        raise InvalidParameterError("a", a_values, "need positive tail points")
    levels = [_tail_level(float(x), side) for x in a]
    sigma = _sigma(beta)

    def worker(stream: RngStream) -> np.ndarray | None:
        path = BrownianPath(None if sigma == 0.0 else stream, config.dt_max)
        hits = np.zeros(a.size, dtype=np.int64)
        for i, lam in enumerate(levels):
            try:
                count = count_explosions(lam, beta, config, stream, path)
            except UndecidedPathError:
                return None
            hits[i] = count >= 1 if side == "right" else count == 0
        return hits

    draws = run_draws(worker, samples, master_seed, threads)
    decided = [d for d in draws if d is not None]
    totals = np.sum(decided, axis=0) if decided else np.zeros(a.size, dtype=np.int64)
    return np.asarray(totals, dtype=np.int64), samples - len(decided)


def tail_probability(
    beta: float,
    a: float,
    side: Side,
    samples: int,
    config: RiccatiConfig,
    master_seed: int = 0,
    threads: int | None = None,
) -> TailEstimate:
    """Estimate ``P(TW > a)`` (right) or ``P(TW < -a)`` (left).

    The result carries the binomial estimate with its standard error and
    the 95 % Wilson interval; with no hits its ``ci_hi`` is the one-sided
    upper bound and ``zero_hits`` is set.
    """
    hits, undecided = tail_counts(beta, np.array([a]), side, samples, config, master_seed, threads)
    trials = samples - undecided
    if trials == 0:
        raise UndecidedPathError(_tail_level(a, side), float("nan"), 0)
    estimate = TailEstimate.from_counts(a, int(hits[0]), trials)
    if estimate.zero_hits:
        logger.warning(
            "no %s-tail hits at a=%g in %d paths (upper bound %.3g)", side, a, trials, estimate.ci_hi
        )
    return estimate
