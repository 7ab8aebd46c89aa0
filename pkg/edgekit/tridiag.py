"""Symmetric tridiagonal matrices and their low/high spectrum.

Eigenvalue counts come from the signs of the pivots of the shifted LDL^T
factorization (Sturm sequence). The same recursion read as a discrete
Riccati map marks where the discrete log-derivative blows up, which is
why :func:`riccati_count_discrete` exposes the pivot positions.

Examples:
    >>> import numpy as np
    >>> from edgekit.tridiag import TridiagSym, eigen_extreme, sturm_count
    >>> T = TridiagSym(np.full(3, 2.0), np.full(2, -1.0))
    >>> sturm_count(T, 2.1)
    2
    >>> eigen_extreme(T, 1, "lowest")
    array([0.58578644])
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Literal

import numpy as np
from scipy.linalg import LinAlgError, solve_banded

from edgekit._kernels import (
    bisect_eigenvalues,
    negative_pivot_positions,
    negative_pivots,
    pivot_scale,
)
from edgekit.exceptions import ConvergenceError, InvalidParameterError

logger = logging.getLogger(__name__)

__all__ = [
    "TridiagSym",
    "sturm_count",
    "riccati_count_discrete",
    "gershgorin",
    "eigen_extreme",
    "eigenvector",
]

EPS = float(np.finfo(float).eps)
TINY = float(np.finfo(float).tiny)

# Bisection defaults, relative to the matrix scale
DEFAULT_ABS_TOL = 1e-12
DEFAULT_REL_TOL = 1e-12

Which = Literal["lowest", "highest"]


@dataclass(frozen=True)
class TridiagSym:
    """Symmetric tridiagonal matrix stored as its diagonal and off-diagonal.

    Attributes:
        diag: Main diagonal, length n >= 1.
        offdiag: Sub/super-diagonal, length n - 1.
    """

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self) -> None:
        diag = np.ascontiguousarray(self.diag, dtype=float)
        offdiag = np.ascontiguousarray(self.offdiag, dtype=float)
        if diag.ndim != 1 or diag.size < 1:
            raise InvalidParameterError("diag", diag.shape, "need a 1-D array with n >= 1")
        if offdiag.shape != (diag.size - 1,):
            raise InvalidParameterError(
                "offdiag", offdiag.shape, f"length must be n - 1 = {diag.size - 1}"
            )
        object.__setattr__(self, "diag", diag)
        object.__setattr__(self, "offdiag", offdiag)

    @property
    def n(self) -> int:
        return int(self.diag.size)

    @property
    def offdiag_sq(self) -> np.ndarray:
        return self.offdiag * self.offdiag

    @property
    def scale(self) -> float:
        """Largest absolute row sum (an upper bound on the spectral norm)."""
        return float(pivot_scale(self.diag, self.offdiag))

    def matvec(self, v: np.ndarray) -> np.ndarray:
        """Return T @ v without forming the dense matrix."""
        v = np.asarray(v, dtype=float)
        out = self.diag * v
        out[:-1] += self.offdiag * v[1:]
        out[1:] += self.offdiag * v[:-1]
        return out

    def to_dense(self) -> np.ndarray:
        """Dense n x n copy (for small matrices and tests)."""
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def __repr__(self) -> str:
        return f"TridiagSym(n={self.n})"


def _pivmin(mat: TridiagSym) -> float:
    return max(EPS * mat.scale, TINY)


def sturm_count(mat: TridiagSym, lam: float) -> int:
    """Number of eigenvalues of ``mat`` strictly below ``lam``."""
    return int(negative_pivots(mat.diag, mat.offdiag_sq, float(lam), _pivmin(mat)))


def riccati_count_discrete(mat: TridiagSym, lam: float) -> tuple[int, list[int]]:
    """Eigenvalue count below ``lam`` together with the negative-pivot indices.

    A negative pivot is a blowup of the discrete log-derivative, so the
    returned (0-based) indices are the discrete explosion locations.
    """
    out = np.empty(mat.n, dtype=np.int64)
    count = int(negative_pivot_positions(mat.diag, mat.offdiag_sq, float(lam), _pivmin(mat), out))
    return count, out[:count].tolist()


def gershgorin(mat: TridiagSym) -> tuple[float, float]:
    """Interval containing every eigenvalue, from the row discs."""
    radius = np.zeros(mat.n)
    absoff = np.abs(mat.offdiag)
    radius[:-1] += absoff
    radius[1:] += absoff
    return float(np.min(mat.diag - radius)), float(np.max(mat.diag + radius))


def eigen_extreme(
    mat: TridiagSym,
    k: int,
    which: Which = "lowest",
    tol: float | None = None,
) -> np.ndarray:
    """The ``k`` smallest or largest eigenvalues by Sturm bisection.

    Args:
        mat: Matrix.
        k: Number of eigenvalues, 1 <= k <= n.
        which: "lowest" or "highest".
        tol: Absolute bracket width. When None the width is
            ``max(1e-12 * scale, 1e-12 * (|lo| + |hi|))``.

    Returns:
        Ascending array of k eigenvalues.
    """
    if not 1 <= k <= mat.n:
        raise InvalidParameterError("k", k, f"need 1 <= k <= n = {mat.n}")
    if which not in ("lowest", "highest"):
        raise InvalidParameterError("which", which, "must be 'lowest' or 'highest'")
    scale = mat.scale
    if tol is None:
        abstol, reltol = DEFAULT_ABS_TOL * max(scale, TINY), DEFAULT_REL_TOL
    elif tol > 0:
        abstol, reltol = float(tol), 0.0
    else:
        raise InvalidParameterError("tol", tol, "must be > 0")

    lo, hi = gershgorin(mat)
    pad = 2.0 * EPS * max(scale, 1.0) + TINY
    lo, hi = lo - pad, hi + pad
    if which == "lowest":
        ranks = np.arange(1, k + 1, dtype=np.int64)
    else:
        ranks = np.arange(mat.n - k + 1, mat.n + 1, dtype=np.int64)
    values = bisect_eigenvalues(mat.diag, mat.offdiag_sq, ranks, lo, hi, abstol, reltol, _pivmin(mat))
    return np.sort(values)


def eigenvector(
    mat: TridiagSym,
    lam: float,
    iters: int = 8,
    tol: float = 1e-10,
) -> np.ndarray:
    """Unit eigenvector for an isolated eigenvalue ``lam`` by inverse iteration.

    Converged when ``||mat v - lam v||_2 <= 10 * tol * scale``; otherwise
    :class:`ConvergenceError` is raised after ``iters`` solves.
    """
    if iters < 1:
        raise InvalidParameterError("iters", iters, "must be >= 1")
    n = mat.n
    scale = max(mat.scale, TINY)
    bound = 10.0 * tol * scale
    if n == 1:
        return np.ones(1)

    # Shifting slightly off lam keeps the banded solve nonsingular
    shift = lam - 4.0 * EPS * scale
    ab = np.zeros((3, n))
    ab[0, 1:] = mat.offdiag
    ab[1, :] = mat.diag - shift
    ab[2, :-1] = mat.offdiag

    v = np.random.default_rng(0x5EED).standard_normal(n)
    v /= np.linalg.norm(v)
    residual = np.inf
    for it in range(1, iters + 1):
        try:
            v = solve_banded((1, 1), ab, v, check_finite=False)
        except LinAlgError:
            ab[1, :] -= 16.0 * EPS * scale
            continue
        norm = np.linalg.norm(v)
        if not np.isfinite(norm) or norm == 0.0:
            break
        v /= norm
        residual = float(np.linalg.norm(mat.matvec(v) - lam * v))
        if residual <= bound:
            logger.debug("inverse iteration converged in %d step(s)", it)
            return v if v[np.argmax(np.abs(v))] > 0 else -v
    raise ConvergenceError(f"Inverse iteration for eigenvalue {lam:.12g} did not converge",
                           iters, residual)
