"""Reference Tracy-Widom laws from the Hastings-McLeod solution of Painleve II.

With u the solution of ``u'' = s u + 2 u^3``, ``u(s) ~ Ai(s)`` as s -> +inf,
and

    I(lam) = int_lam^inf (s - lam) u(s)^2 ds,    J(lam) = int_lam^inf u(s) ds,

the distribution functions are

    F2(lam) = exp(-I(lam))
    F1(lam) = exp(-I(lam)/2) exp(-J(lam)/2)
    F4(lam) = exp(-I(lam')/2) cosh(J(lam')/2),    lam' = 2^{2/3} lam.

``tw_reference`` returns F_beta(lam) = P(TW_beta <= lam). Monte Carlo routes
estimate the survival of Lambda_0 = -TW_beta, which is
``reference_survival(beta, lam) = F_beta(-lam)``.

Examples:
    >>> from edgekit.painleve import get_reference_solution, tw_reference
    >>> sol = get_reference_solution()
    >>> tw_reference(2, 0.0, sol)  # ~0.9694
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np
import pandas as pd
from mpmath import mp
from scipy import special
from scipy.integrate import cumulative_trapezoid, solve_bvp, trapezoid

from edgekit.cache import Cache, get_cache
from edgekit.exceptions import (
    ConvergenceError,
    InvalidParameterError,
    OutOfSupportError,
    PainleveBlowupError,
)

logger = logging.getLogger(__name__)

__all__ = [
    "AIRY_RANGE",
    "PainleveSolution",
    "airy_ai",
    "airy_ai_prime",
    "solve_hastings_mcleod",
    "left_asymptotic",
    "ode_residual",
    "tw_reference",
    "reference_survival",
    "tw_density",
    "tw_moments",
    "get_reference_solution",
    "write_table",
    "read_table",
]

AIRY_RANGE = (-15.0, 15.0)
ASYMPTOTIC_SWITCH = 6.5
SERIES_DIGITS = 50


DEFAULT_S_MAX = 10.0
DEFAULT_S_MIN = -10.0
DEFAULT_STEP = 1e-3
BLOWUP_LIMIT = 1e6
BVP_TOL = 1e-8

# Left end of the collocation domain, below every admissible s_min
LEFT_ANCHOR = -12.0

# Quadrature needs one unit of grid below the evaluation point
SUPPORT_MARGIN = 1.0

BETA4_SHIFT = 2.0 ** (2.0 / 3.0)


# =============================================================================
# Airy function
# =============================================================================


def _airy_series(s: float) -> tuple[float, float]:
    """Ai and Ai' from the Maclaurin series in 50-digit arithmetic."""
    with mp.workdps(SERIES_DIGITS):
        x = mp.mpf(s)
        x3 = x**3
        ai0 = mp.mpf(3) ** (-mp.mpf(2) / 3) / mp.gamma(mp.mpf(2) / 3)
        minus_aip0 = mp.mpf(3) ** (-mp.mpf(1) / 3) / mp.gamma(mp.mpf(1) / 3)
        tiny = mp.mpf(10) ** -(SERIES_DIGITS - 5)
        f_term, g_term = mp.one, x
        df_term, dg_term = x * x / 2, mp.one
        f, g, df, dg = f_term, g_term, df_term, dg_term
        k = 1
        while True:
            f_term = f_term * x3 / ((3 * k - 1) * (3 * k))
            g_term = g_term * x3 / ((3 * k) * (3 * k + 1))
            dg_term = dg_term * x3 / ((3 * k - 2) * (3 * k))
            f += f_term
            g += g_term
            dg += dg_term
            if k >= 2:
                df_term = df_term * x3 / ((3 * k - 1) * (3 * k - 3))
                df += df_term
            largest = max(abs(f_term), abs(g_term), abs(df_term), abs(dg_term))
            if k > 2 and largest < tiny:
                break
            k += 1
        ai = ai0 * f - minus_aip0 * g
        aip = ai0 * df - minus_aip0 * dg
        return float(ai), float(aip)


def _airy_asymptotic(s: float) -> tuple[float, float]:
    """Ai and Ai' from the large-s expansion, truncated at its smallest term."""
    zeta = 2.0 / 3.0 * s**1.5
    sum_ai = sum_aip = 1.0
    u_k = 1.0
    last = math.inf
    for k in range(1, 80):
        u_next = u_k * (6 * k - 5) * (6 * k - 3) * (6 * k - 1) / ((2 * k - 1) * 216 * k)
        term = u_next / zeta**k
        if term >= last:
            break
        v_next = -(6 * k + 1) / (6 * k - 1) * u_next
        sign = -1.0 if k % 2 else 1.0
        sum_ai += sign * term
        sum_aip += sign * v_next / zeta**k
        last = term
        u_k = u_next
    pref = math.exp(-zeta) / (2.0 * math.sqrt(math.pi))
    return pref * s**-0.25 * sum_ai, -pref * s**0.25 * sum_aip


def _airy(s: float) -> tuple[float, float]:
    s = float(s)
    lo, hi = AIRY_RANGE
    if not lo <= s <= hi:
        raise OutOfSupportError("s", s, lo, hi)
    if s > ASYMPTOTIC_SWITCH:
        return _airy_asymptotic(s)
    return _airy_series(s)


def airy_ai(s: float) -> float:
    """Airy function Ai(s) on [-15, 15]."""
    return _airy(s)[0]


def airy_ai_prime(s: float) -> float:
    """Derivative Ai'(s) on [-15, 15]."""
    return _airy(s)[1]


# =============================================================================
# Hastings-McLeod solution
# =============================================================================


@dataclass(frozen=True)
class PainleveSolution:
    """Hastings-McLeod solution on a uniform descending grid.

    Attributes:
        s_grid: Grid from s_max down to s_min.
        u: Solution values, all positive.
        u_prime: Derivative values.
        step: Grid spacing.
    """

    s_grid: np.ndarray
    u: np.ndarray
    u_prime: np.ndarray
    step: float

    def __post_init__(self) -> None:
        if self.s_grid.ndim != 1 or self.s_grid.size < 5:
            raise InvalidParameterError("s_grid", self.s_grid.shape, "need at least 5 points")
        if self.u.shape != self.s_grid.shape or self.u_prime.shape != self.s_grid.shape:
            raise InvalidParameterError("u", self.u.shape, "lengths must match s_grid")
        if np.any(np.diff(self.s_grid) >= 0):
            raise InvalidParameterError("s_grid", "", "must be strictly descending")
        if np.any(self.u <= 0):
            raise InvalidParameterError("u", "", "Hastings-McLeod solution must stay positive")

    @property
    def s_max(self) -> float:
        return float(self.s_grid[0])

    @property
    def s_min(self) -> float:
        return float(self.s_grid[-1])

    @cached_property
    def _ascending(self) -> tuple[np.ndarray, np.ndarray]:
        return self.s_grid[::-1].copy(), self.u[::-1].copy()

    @cached_property
    def _suffix_integrals(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Trapezoid integrals of u^2, s u^2 and u from each grid point to s_max."""
        s, u = self._ascending
        out = []
        for f in (u * u, s * u * u, u):
            running = cumulative_trapezoid(f, s, initial=0.0)
            out.append(running[-1] - running)
        return out[0], out[1], out[2]

    def tail_integrals(self, lam: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``I(lam)``, ``J(lam)`` and ``A(lam) = int_lam^inf u^2`` for points inside the grid.

        Whole cells above lam use the stored trapezoid sums; the partial
        cell uses linearly interpolated u at lam.
        """
        s, u = self._ascending
        a_sq, b_sq, c_u = self._suffix_integrals
        lam = np.clip(np.asarray(lam, dtype=float), s[0], s[-1])
        j = np.clip(np.searchsorted(s, lam, side="left"), 0, s.size - 1)
        u_lam = np.interp(lam, s, u)
        width = s[j] - lam
        area_sq = a_sq[j] + 0.5 * width * (u_lam**2 + u[j] ** 2)
        area_s = b_sq[j] + 0.5 * width * (lam * u_lam**2 + s[j] * u[j] ** 2)
        area_u = c_u[j] + 0.5 * width * (u_lam + u[j])
        i_val = np.maximum(area_s - lam * area_sq, 0.0)
        return i_val, area_u, area_sq


def left_asymptotic(s: float | np.ndarray) -> float | np.ndarray:
    """``sqrt(-s/2) (1 + 1/(8 s^3) - 73/(128 s^6) + 10657/(1024 s^9))`` for s << 0."""
    s = np.asarray(s, dtype=float)
    out = np.sqrt(-s / 2.0) * (
        1.0 + 1.0 / (8.0 * s**3) - 73.0 / (128.0 * s**6) + 10657.0 / (1024.0 * s**9)
    )
    return float(out) if out.ndim == 0 else out


def _initial_guess(s: np.ndarray) -> np.ndarray:
    ai, aip, _, _ = special.airy(np.maximum(s, 0.0))
    u = np.sqrt(ai**2 + np.maximum(-s, 0.0) / 2.0)
    return np.vstack([u, np.gradient(u, s)])


def solve_hastings_mcleod(
    s_max: float = DEFAULT_S_MAX,
    s_min: float = DEFAULT_S_MIN,
    step: float = DEFAULT_STEP,
) -> PainleveSolution:
    """Hastings-McLeod solution on the grid ``s_max, s_max - step, ... ~ s_min``.

    Solved as a two-point problem by collocation on the output grid,
    extended down to ``LEFT_ANCHOR``:

        u(s_max) = Ai(s_max),    u(LEFT_ANCHOR) = left_asymptotic(LEFT_ANCHOR).

    Marching down from the Airy data alone is unstable: the solution is a
    separatrix and rounding grows by about 1e13 before s = -10. An error in
    the left value instead decays like ``exp(-int sqrt(-2s) ds)`` going
    right, below 1e-13 on the returned grid.

    Raises:
        ConvergenceError: If the collocation solve does not converge.
        PainleveBlowupError: If u leaves (0, BLOWUP_LIMIT) or turns
            non-finite on the returned grid.
    """
    if s_max < 8:
        raise InvalidParameterError("s_max", s_max, "must be >= 8")
    if s_min < -10:
        raise InvalidParameterError("s_min", s_min, "must be >= -10")
    if not 0 < step <= 1e-3:
        raise InvalidParameterError("step", step, "must lie in (0, 1e-3]")
    if not s_min < s_max:
        raise InvalidParameterError("s_min", s_min, f"must be below s_max={s_max}")
    n_steps = int(round((s_max - s_min) / step))
    n_full = int(math.ceil((s_max - LEFT_ANCHOR) / step))
    # Ascending mesh whose top n_steps + 1 nodes are the returned grid
    mesh = s_max - step * np.arange(n_full, -1, -1, dtype=float)
    u_right = _airy(s_max)[0]
    u_left = left_asymptotic(mesh[0])

    def rhs(s, y):
        return np.vstack([y[1], s * y[0] + 2.0 * y[0] ** 3])

    def rhs_jac(s, y):
        jac = np.zeros((2, 2, s.size))
        jac[0, 1] = 1.0
        jac[1, 0] = s + 6.0 * y[0] ** 2
        return jac

    def bc(ya, yb):
        return np.array([ya[0] - u_left, yb[0] - u_right])

    def bc_jac(ya, yb):
        return np.array([[1.0, 0.0], [0.0, 0.0]]), np.array([[0.0, 0.0], [1.0, 0.0]])

    result = solve_bvp(
        rhs, bc, mesh, _initial_guess(mesh), fun_jac=rhs_jac, bc_jac=bc_jac,
        tol=BVP_TOL, max_nodes=8 * mesh.size,
    )
    if not result.success:
        residual = float(np.max(result.rms_residuals)) if result.rms_residuals.size else math.nan
        raise ConvergenceError(f"Hastings-McLeod collocation: {result.message}", result.niter, residual)

    s_grid = s_max - step * np.arange(n_steps + 1, dtype=float)
    y = result.sol(s_grid)
    u, du = y[0], y[1]
    bad = ~(np.isfinite(u) & np.isfinite(du) & (u > 0.0) & (u < BLOWUP_LIMIT))
    if bad.any():
        i = int(np.argmax(bad))
        raise PainleveBlowupError(float(s_grid[i]), float(u[i]))
    logger.debug(
        "Hastings-McLeod solved on [%g, %g]: %d nodes, %d Newton iterations",
        s_min, s_max, result.x.size, result.niter,
    )
    return PainleveSolution(s_grid=s_grid, u=u, u_prime=du, step=float(step))


def _derivative(values: np.ndarray, step: float) -> np.ndarray:
    """d/ds on a descending uniform grid; fourth order inside, second at the ends."""
    d = np.empty_like(values)
    d[2:-2] = (values[:-4] - 8.0 * values[1:-3] + 8.0 * values[3:-1] - values[4:]) / (12.0 * step)
    d[:2] = np.gradient(values[:4], edge_order=2)[:2] / step
    d[-2:] = np.gradient(values[-4:], edge_order=2)[-2:] / step
    return -d


def ode_residual(sol: PainleveSolution) -> np.ndarray:
    """``|u'' - s u - 2u^3|`` at ``sol.s_grid[2:-2]``.

    u'' is the fourth-order central difference of the stored u'.
    """
    h = sol.step
    v = sol.u_prime
    u_dd = -(v[:-4] - 8.0 * v[1:-3] + 8.0 * v[3:-1] - v[4:]) / (12.0 * h)
    s, u = sol.s_grid[2:-2], sol.u[2:-2]
    return np.abs(u_dd - s * u - 2.0 * u**3)


# =============================================================================
# Tracy-Widom distributions
# =============================================================================


def _check_beta(beta: int | float) -> int:
    if beta not in (1, 2, 4):
        raise InvalidParameterError("beta", beta, "closed forms exist for beta in {1, 2, 4}")
    return int(beta)


def _argument(beta: int, lam: np.ndarray, sol: PainleveSolution) -> np.ndarray:
    arg = BETA4_SHIFT * lam if beta == 4 else lam
    lo = sol.s_min + SUPPORT_MARGIN
    if np.any(arg < lo):
        bad = float(np.min(lam))
        raise OutOfSupportError("lambda", bad, lo / (BETA4_SHIFT if beta == 4 else 1.0), math.inf)
    return arg


def _as_output(values: np.ndarray, scalar: bool) -> float | np.ndarray:
    return float(values) if scalar else values


def tw_reference(
    beta: int, lam: float | np.ndarray, sol: PainleveSolution
) -> float | np.ndarray:
    """Tracy-Widom distribution function F_beta(lam) = P(TW_beta <= lam).

    For beta = 4 the argument is shifted to ``2^{2/3} lam`` before the
    quadrature.
    """
    beta = _check_beta(beta)
    lam_arr = np.asarray(lam, dtype=float)
    arg = _argument(beta, lam_arr, sol)
    i_val, j_val, _ = sol.tail_integrals(arg)
    if beta == 2:
        out = np.exp(-i_val)
    elif beta == 1:
        out = np.exp(-0.5 * i_val - 0.5 * j_val)
    else:
        out = np.exp(-0.5 * i_val) * np.cosh(0.5 * j_val)
    return _as_output(np.clip(out, 0.0, 1.0), lam_arr.ndim == 0)


def reference_survival(
    beta: int, lam: float | np.ndarray, sol: PainleveSolution
) -> float | np.ndarray:
    """``P(Lambda_0 > lam) = F_beta(-lam)``, the quantity Monte Carlo routes estimate."""
    return tw_reference(beta, -np.asarray(lam, dtype=float), sol)


def tw_density(
    beta: int, lam: float | np.ndarray, sol: PainleveSolution
) -> float | np.ndarray:
    """Density F_beta'(lam), differentiating the quadratures exactly.

    ``I' = -int_lam^inf u^2`` and ``J' = -u(lam)``.
    """
    beta = _check_beta(beta)
    lam_arr = np.asarray(lam, dtype=float)
    arg = _argument(beta, lam_arr, sol)
    i_val, j_val, a_val = sol.tail_integrals(arg)
    s, u = sol._ascending
    u_arg = np.interp(arg, s, u, right=0.0)
    if beta == 2:
        out = np.exp(-i_val) * a_val
    elif beta == 1:
        out = np.exp(-0.5 * i_val - 0.5 * j_val) * 0.5 * (a_val + u_arg)
    else:
        e = np.exp(-0.5 * i_val)
        out = BETA4_SHIFT * 0.5 * e * (
            np.cosh(0.5 * j_val) * a_val - np.sinh(0.5 * j_val) * u_arg
        )
    return _as_output(out, lam_arr.ndim == 0)


def tw_moments(beta: int, sol: PainleveSolution) -> dict[str, float]:
    """Mean, variance and skewness of TW_beta by quadrature of the density."""
    beta = _check_beta(beta)
    lo = (sol.s_min + SUPPORT_MARGIN) / (BETA4_SHIFT if beta == 4 else 1.0)
    hi = sol.s_max / (BETA4_SHIFT if beta == 4 else 1.0)
    grid = np.linspace(lo, hi, int(round((hi - lo) / sol.step)) + 1)
    density = np.asarray(tw_density(beta, grid, sol))
    mass = float(trapezoid(density, grid))
    mean = float(trapezoid(grid * density, grid)) / mass
    var = float(trapezoid((grid - mean) ** 2 * density, grid)) / mass
    third = float(trapezoid((grid - mean) ** 3 * density, grid)) / mass
    return {"mass": mass, "mean": mean, "variance": var, "skewness": third / var**1.5}


# =============================================================================
# Cached solutions and table files
# =============================================================================


def get_reference_solution(
    s_max: float = DEFAULT_S_MAX,
    s_min: float = DEFAULT_S_MIN,
    step: float = DEFAULT_STEP,
    table: str | Path | None = None,
    cache: Cache | None = None,
) -> PainleveSolution:
    """Hastings-McLeod solution, memoized in-process and optionally on disk.

    When ``table`` names an existing file it is read instead of solving;
    when it names a missing file the fresh solution is written there.
    """
    if cache is None:
        cache = get_cache()
    source = None if table is None else str(Path(table).resolve())
    key = ("hastings-mcleod", float(s_max), float(s_min), float(step), source)

    def load() -> PainleveSolution:
        if table is not None and Path(table).exists():
            logger.debug("reading Painleve table %s", table)
            return read_table(table)
        sol = solve_hastings_mcleod(s_max, s_min, step)
        if table is not None:
            write_table(sol, table)
        return sol

    return cache.get_or_compute(key, load)


def write_table(sol: PainleveSolution, path: str | Path) -> Path:
    """Write the ``s u`` table: one header line, then rows in descending s."""
    path = Path(path)
    frame = pd.DataFrame({"s": sol.s_grid, "u": sol.u})
    frame.to_csv(path, sep=" ", index=False, float_format="%.17g")
    return path


def read_table(path: str | Path) -> PainleveSolution:
    """Read a table written by :func:`write_table`; u' is recomputed from u."""
    frame = pd.read_csv(path, sep=r"\s+", comment="#", float_precision="round_trip")
    if list(frame.columns) != ["s", "u"]:
        raise InvalidParameterError("table", str(path), "expected the columns 's u'")
    s = frame["s"].to_numpy(dtype=float)
    u = frame["u"].to_numpy(dtype=float)
    steps = -np.diff(s)
    if s.size < 5 or not np.allclose(steps, steps[0], rtol=1e-6, atol=0.0):
        raise InvalidParameterError("table", str(path), "s must be uniform and descending")
    step = float(steps[0])
    return PainleveSolution(s_grid=s, u=u, u_prime=_derivative(u, step), step=step)
