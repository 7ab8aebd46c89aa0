"""Finite-difference discretization of the stochastic Airy operator.

The operator ``-d^2/dx^2 + x + (2/sqrt(beta)) b'`` on [0, x_max] with
Dirichlet ends becomes a symmetric tridiagonal matrix on the grid
``x_k = k h``. White noise enters through cell-averaged Brownian
increments ``sqrt(h) g_k``, so coupled grids at h and h/2 can share one
Brownian path (see :func:`couple_refine`).

Examples:
    >>> from edgekit.airyop import sao_eigs
    >>> from edgekit.randkit import make_stream
    >>> sao_eigs(beta=2.0, h=0.01, x_max=15.0, k=3, stream=make_stream(3, 0))
"""

from __future__ import annotations

import logging
import math
import warnings
from dataclasses import dataclass
from typing import Literal

import numpy as np

from edgekit.exceptions import InvalidParameterError, TruncationWarning
from edgekit.randkit import RngStream
from edgekit.tridiag import TridiagSym, eigen_extreme

logger = logging.getLogger(__name__)

__all__ = [
    "DEFAULT_X_MAX",
    "NoiseGrid",
    "make_noise_grid",
    "build_sao",
    "sao_eigs",
    "rayleigh",
    "couple_refine",
    "extend_grid",
]

DEFAULT_X_MAX = 15.0
TRUNCATION_GAP = 5.0
RETRY_FACTOR = 1.5
MAX_RETRIES = 3

# Cell noise is drawn in fixed chunks so that every cell's value depends
# only on its position, never on how far the grid reaches.
CHUNK = 512

# Sub-stream tags of a grid's source stream
_DIAG_TAG = 0
_BRIDGE_TAG = 1
_OFFDIAG_TAG = 2

Split = Literal["diagonal", "hermite"]


@dataclass(frozen=True)
class NoiseGrid:
    """Standard normal cell noise of a Brownian path on [0, x_max].

    Attributes:
        h: Grid step.
        x_max: Truncation point; ``n = floor(x_max / h)`` cells.
        g: One N(0, 1) per cell for the diagonal noise.
        g_off: One N(0, 1) per cell for the off-diagonal noise (used by
            the "hermite" split only).
        source: Stream the path is drawn from, None for the noiseless grid.
        level: Number of halvings since :func:`make_noise_grid`.
    """

    h: float
    x_max: float
    g: np.ndarray
    g_off: np.ndarray
    source: RngStream | None = None
    level: int = 0

    def __post_init__(self) -> None:
        if not self.h > 0:
            raise InvalidParameterError("h", self.h, "grid step must be > 0")
        if self.g.shape != (self.n,) or self.g_off.shape != (self.n,):
            raise InvalidParameterError("g", self.g.shape, f"need one draw per cell (n={self.n})")

    @property
    def n(self) -> int:
        return _cells(self.x_max, self.h)

    @property
    def increments(self) -> np.ndarray:
        """Brownian increments ``sqrt(h) g_k`` of the diagonal path."""
        return math.sqrt(self.h) * self.g


def _cells(x_max: float, h: float) -> int:
    return int(math.floor(x_max / h + 1e-9))


def _chunked_normal(base: RngStream, stop: int) -> np.ndarray:
    """Normals ``0..stop-1`` where chunk c comes from ``base.child(c)``."""
    chunks = [np.asarray(base.child(c).normal(CHUNK)) for c in range(-(-stop // CHUNK))]
    return np.concatenate(chunks)[:stop] if chunks else np.zeros(0)


def _split_cells(g: np.ndarray, z: np.ndarray) -> np.ndarray:
    fine = np.empty(2 * g.size)
    fine[0::2] = (g + z) / math.sqrt(2.0)
    fine[1::2] = (g - z) / math.sqrt(2.0)
    return fine


def _path_cells(source: RngStream, tag: int, level: int, n: int) -> np.ndarray:
    """The first ``n`` cells of one noise array after ``level`` halvings."""
    g = _chunked_normal(source.child(tag), -(-n // 2**level))
    for lvl in range(1, level + 1):
        z = _chunked_normal(source.child(_BRIDGE_TAG).child(tag).child(lvl), g.size)
        g = _split_cells(g, z)
    return g[:n]


def _grid(h: float, x_max: float, source: RngStream | None, level: int) -> NoiseGrid:
    n = _cells(x_max, h)
    if source is None:
        return NoiseGrid(h, x_max, np.zeros(n), np.zeros(n))
    g = _path_cells(source, _DIAG_TAG, level, n)
    g_off = _path_cells(source, _OFFDIAG_TAG, level, n)
    return NoiseGrid(h, x_max, g, g_off, source=source, level=level)


def make_noise_grid(h: float, x_max: float, stream: RngStream | None) -> NoiseGrid:
    """Draw the cell noise for step ``h`` on [0, x_max].

    ``stream=None`` gives the noiseless grid (all g = 0). The stream is
    used as a seed source only; its own sequence is not advanced.
    """
    if not h > 0:
        raise InvalidParameterError("h", h, "grid step must be > 0")
    if not x_max > h:
        raise InvalidParameterError("x_max", x_max, f"must exceed the step h={h}")
    return _grid(h, x_max, stream, 0)


def build_sao(beta: float, grid: NoiseGrid, split: Split = "diagonal") -> TridiagSym:
    """Tridiagonal discretization of the stochastic Airy operator.

    ``split="diagonal"``: ``d_k = 2/h^2 + k h + (2/sqrt(beta)) h^{-1/2} g_k``
    and ``e_k = -1/h^2``.

    ``split="hermite"``: the same total noise divided as in the scaled
    Hermite model, variance ``2/(beta h)`` on the diagonal and
    ``1/(2 beta h)`` on the off-diagonal.

    ``beta = inf`` gives the deterministic Airy matrix.
    """
    if not beta > 0:
        raise InvalidParameterError("beta", beta, "must be > 0")
    h, n = grid.h, grid.n
    x = h * np.arange(1, n + 1, dtype=float)
    diag = 2.0 / h**2 + x
    offdiag = np.full(n - 1, -1.0 / h**2)
    if math.isinf(beta):
        return TridiagSym(diag, offdiag)
    if split == "diagonal":
        diag = diag + (2.0 / math.sqrt(beta)) * grid.g / math.sqrt(h)
    elif split == "hermite":
        diag = diag + math.sqrt(2.0 / (beta * h)) * grid.g
        offdiag = offdiag + math.sqrt(1.0 / (2.0 * beta * h)) * grid.g_off[: n - 1]
    else:
        raise InvalidParameterError("split", split, "must be 'diagonal' or 'hermite'")
    return TridiagSym(diag, offdiag)


def extend_grid(grid: NoiseGrid, x_max: float) -> NoiseGrid:
    """Lengthen a grid to ``x_max``; existing cells are kept unchanged.

    New cells continue the same Brownian path, so a grid and its
    refinements still pair up cell for cell after extension.
    """
    if x_max < grid.x_max:
        raise InvalidParameterError("x_max", x_max, f"cannot shrink below {grid.x_max}")
    return _grid(grid.h, x_max, grid.source, grid.level)


def sao_eigs(
    beta: float,
    h: float,
    x_max: float,
    k: int,
    stream: RngStream | None,
    split: Split = "diagonal",
) -> np.ndarray:
    """The k lowest eigenvalues of one discretized operator draw, ascending.

    If the top requested eigenvalue lies within 5 of ``x_max`` the grid is
    extended by a factor 1.5 (continuing the same path) up to three
    times; a :class:`TruncationWarning` is issued if it is still suspect.
    ``stream=None`` evaluates the noiseless operator.
    """
    if k < 1:
        raise InvalidParameterError("k", k, "must be >= 1")
    grid = make_noise_grid(h, x_max, None if math.isinf(beta) else stream)
    return grid_eigs(beta, grid, k, split=split)


def grid_eigs(
    beta: float,
    grid: NoiseGrid,
    k: int,
    split: Split = "diagonal",
) -> np.ndarray:
    """Lowest k eigenvalues of :func:`build_sao` on an existing grid.

    Truncation retries lengthen the grid along its own Brownian path
    (:func:`extend_grid`), so a grid and its refinements extend consistently.
    """
    if k > grid.n:
        raise InvalidParameterError("k", k, f"grid has only {grid.n} cells")
    tol = 1e-12 * (4.0 / grid.h**2)
    for attempt in range(MAX_RETRIES + 1):
        values = eigen_extreme(build_sao(beta, grid, split), k, "lowest", tol)
        if values[-1] <= grid.x_max - TRUNCATION_GAP:
            return values
        if attempt == MAX_RETRIES:
            break
        new_x_max = RETRY_FACTOR * grid.x_max
        logger.debug(
            "Lambda_%d=%.3f close to x_max=%.2f, retrying at %.2f",
            k - 1, values[-1], grid.x_max, new_x_max,
        )
        grid = extend_grid(grid, new_x_max)
    warnings.warn(
        f"Lambda_{k - 1}={values[-1]:.3f} within {TRUNCATION_GAP} of x_max={grid.x_max:.2f}",
        TruncationWarning,
        stacklevel=2,
    )
    logger.warning("SAO truncation still suspect at x_max=%.2f", grid.x_max)
    return values


def rayleigh(mat: TridiagSym, v: np.ndarray, h: float = 1.0) -> float:
    """Discrete Rayleigh quotient ``<v, mat v>_h / <v, v>_h``.

    The grid weight ``h`` cancels; it is kept so the quotient reads as the
    quadrature of the continuum quadratic form.
    """
    v = np.asarray(v, dtype=float)
    if v.shape != (mat.n,):
        raise InvalidParameterError("v", v.shape, f"need a vector of length {mat.n}")
    norm_sq = h * float(v @ v)
    if norm_sq == 0.0:
        raise InvalidParameterError("v", "0", "Rayleigh quotient of the zero vector")
    return h * float(v @ mat.matvec(v)) / norm_sq


def couple_refine(grid: NoiseGrid) -> NoiseGrid:
    """Half-step grid carrying the same Brownian path.

    Each coarse cell ``g_k`` splits into ``(g_k + z)/sqrt 2`` and
    ``(g_k - z)/sqrt 2`` with an independent ``z`` fixed by the cell's
    position and the refinement level: both halves are i.i.d. N(0, 1),
    their increments sum to the coarse increment exactly, and refining the
    same grid twice gives the same path.
    """
    h2 = grid.h / 2.0
    covered = grid.n * grid.h
    if grid.source is None:
        g = np.repeat(grid.g, 2) / math.sqrt(2.0)
        g_off = np.repeat(grid.g_off, 2) / math.sqrt(2.0)
        return NoiseGrid(h2, covered, g, g_off)
    level = grid.level + 1
    bridge = grid.source.child(_BRIDGE_TAG)
    z = _chunked_normal(bridge.child(_DIAG_TAG).child(level), grid.n)
    z_off = _chunked_normal(bridge.child(_OFFDIAG_TAG).child(level), grid.n)
    return NoiseGrid(
        h2, covered, _split_cells(grid.g, z), _split_cells(grid.g_off, z_off),
        source=grid.source, level=level,
    )
