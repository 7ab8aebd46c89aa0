"""Tridiagonal beta-Hermite and beta-Laguerre ensembles and their soft-edge scalings.

Examples:
    >>> from edgekit.ensembles import HermiteSpec, edge_sample
    >>> from edgekit.randkit import make_stream
    >>> draw = edge_sample(HermiteSpec(n=1000, beta=2.0), k=3, stream=make_stream(7, 0))
    >>> draw.values  # approximates (Lambda_0, Lambda_1, Lambda_2)
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from edgekit.exceptions import InvalidParameterError
from edgekit.randkit import RngStream, sample_chi, sample_gaussian
from edgekit.tridiag import TridiagSym, eigen_extreme

__all__ = [
    "DEFAULT_EDGE_K",
    "HermiteSpec",
    "LaguerreSpec",
    "EdgeSample",
    "sample_hermite",
    "sample_laguerre",
    "hermite_edge_scale",
    "laguerre_edge_scale",
    "laguerre_centering",
    "edge_sample",
]

DEFAULT_EDGE_K = 5

# Raw-eigenvalue bisection width relative to the matrix scale
EDGE_REL_TOL = 1e-10


@dataclass(frozen=True)
class HermiteSpec:
    """Size and inverse temperature of a beta-Hermite draw."""

    n: int
    beta: float

    def __post_init__(self) -> None:
        if self.n < 1:
            raise InvalidParameterError("n", self.n, "must be >= 1")
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise InvalidParameterError("beta", self.beta, "must be a finite positive real")


@dataclass(frozen=True)
class LaguerreSpec:
    """Size, dimension parameter and inverse temperature of a beta-Laguerre draw."""

    n: int
    kappa: float
    beta: float

    def __post_init__(self) -> None:
        if self.n < 1:
            raise InvalidParameterError("n", self.n, "must be >= 1")
        if not (self.beta > 0 and math.isfinite(self.beta)):
            raise InvalidParameterError("beta", self.beta, "must be a finite positive real")
        if not self.kappa > self.n - 1:
            raise InvalidParameterError(
                "kappa", self.kappa, f"must exceed n - 1 = {self.n - 1} for a normalizable law"
            )


@dataclass(frozen=True)
class EdgeSample:
    """One draw of the k scaled edge statistics, ascending."""

    values: np.ndarray
    spec: HermiteSpec | LaguerreSpec
    stream_id: int

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 1 or values.size < 1:
            raise InvalidParameterError("values", values.shape, "need k >= 1 values")
        if np.any(np.diff(values) < 0):
            raise InvalidParameterError("values", values, "must be ascending")
        object.__setattr__(self, "values", values)

    @property
    def k(self) -> int:
        return int(self.values.size)


def sample_hermite(spec: HermiteSpec, stream: RngStream) -> TridiagSym:
    """Draw the beta-Hermite tridiagonal matrix.

    Diagonal entries are N(0, 2) / sqrt(beta); the off-diagonal entry in
    row l is chi_{(n - l) beta} / sqrt(beta), so the largest shape sits at
    the top-left corner.
    """
    n, beta = spec.n, spec.beta
    root = math.sqrt(beta)
    diag = np.asarray(sample_gaussian(stream, 0.0, math.sqrt(2.0), size=n)) / root
    if n == 1:
        return TridiagSym(diag, np.empty(0))
    shapes = beta * np.arange(n - 1, 0, -1, dtype=float)
    offdiag = np.asarray(sample_chi(stream, shapes)) / root
    return TridiagSym(diag, offdiag)


def sample_laguerre(spec: LaguerreSpec, stream: RngStream) -> TridiagSym:
    """Draw the tridiagonal W^T W of the beta-Laguerre bidiagonal model.

    W is lower bidiagonal with diagonal ``a_k = chi~_{beta(kappa - k + 1)}``
    (k = 1..n) and subdiagonal ``b_k = chi_{beta(n - k)}`` (k = 1..n-1),
    scaled by 1/sqrt(beta). Then ``(W^T W)_{kk} = (a_k^2 + b_k^2) / beta``
    and ``(W^T W)_{k,k+1} = b_k a_{k+1} / beta``. W itself is never formed.
    """
    n, kappa, beta = spec.n, spec.kappa, spec.beta
    k = np.arange(1, n + 1, dtype=float)
    a = np.asarray(sample_chi(stream, beta * (kappa - k + 1.0)))
    diag = a * a
    if n == 1:
        return TridiagSym(diag / beta, np.empty(0))
    b = np.asarray(sample_chi(stream, beta * (n - k[:-1])))
    diag[:-1] += b * b
    offdiag = b * a[1:]
    return TridiagSym(diag / beta, offdiag / beta)


def hermite_edge_scale(raw_eigs: np.ndarray, n: int) -> np.ndarray:
    """Map descending raw eigenvalues to ``n^{1/6} (2 sqrt(n) - lambda)``, ascending."""
    raw = np.asarray(raw_eigs, dtype=float)
    return n ** (1.0 / 6.0) * (2.0 * math.sqrt(n) - raw)


def laguerre_centering(n: int, kappa: float) -> tuple[float, float]:
    """Centering ``mu = (sqrt n + sqrt kappa)^2`` and scale ``sigma``.

    ``sigma = (n kappa)^{1/6} / (sqrt n + sqrt kappa)^{4/3}``.
    """
    root_sum = math.sqrt(n) + math.sqrt(kappa)
    mu = root_sum**2
    sigma = (n * kappa) ** (1.0 / 6.0) / root_sum ** (4.0 / 3.0)
    return mu, sigma


def laguerre_edge_scale(raw_eigs: np.ndarray, n: int, kappa: float) -> np.ndarray:
    """Map descending raw eigenvalues to ``sigma (mu - lambda)``, ascending."""
    mu, sigma = laguerre_centering(n, kappa)
    return sigma * (mu - np.asarray(raw_eigs, dtype=float))


def edge_sample(
    spec: HermiteSpec | LaguerreSpec,
    k: int,
    stream: RngStream,
    tol: float | None = None,
) -> EdgeSample:
    """Sample a matrix, extract its top k eigenvalues and scale them.

    Args:
        spec: Ensemble to draw from.
        k: Number of edge statistics, 1 <= k <= n.
        stream: Random stream owning this draw.
        tol: Absolute bisection width on the raw eigenvalues. Defaults to
            ``1e-10`` times the matrix scale.
    """
    if not 1 <= k <= spec.n:
        raise InvalidParameterError("k", k, f"need 1 <= k <= n = {spec.n}")
    if isinstance(spec, HermiteSpec):
        matrix = sample_hermite(spec, stream)
    elif isinstance(spec, LaguerreSpec):
        matrix = sample_laguerre(spec, stream)
    else:
        raise InvalidParameterError("spec", spec, "expected HermiteSpec or LaguerreSpec")
    if tol is None:
        tol = EDGE_REL_TOL * max(matrix.scale, 1.0)
    raw = eigen_extreme(matrix, k, "highest", tol)[::-1]
    if isinstance(spec, HermiteSpec):
        values = hermite_edge_scale(raw, spec.n)
    else:
        values = laguerre_edge_scale(raw, spec.n, spec.kappa)
    return EdgeSample(values=values, spec=spec, stream_id=stream.stream_id)
