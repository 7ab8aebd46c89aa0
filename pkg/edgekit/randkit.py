"""Reproducible random streams for edgekit.

Every Monte Carlo draw in the package is a pure function of
``(master_seed, stream_id)``. Streams are derived by hash-mixing both
integers through :class:`numpy.random.SeedSequence` into a PCG64DXSM
generator (period 2**128), so sample ``i`` of an experiment always sees
the same numbers no matter how many workers share the run.

Examples:
    >>> from edgekit.randkit import make_stream, sample_chi, sample_gaussian
    >>> stream = make_stream(master_seed=1, stream_id=0)
    >>> sample_gaussian(stream, mean=0.0, sd=2**0.5)
    >>> sample_chi(stream, 9.0)
"""

from __future__ import annotations

import math

import numpy as np

from edgekit.exceptions import InvalidParameterError

__all__ = [
    "GENERATOR_FAMILY",
    "RngStream",
    "make_stream",
    "sample_gaussian",
    "sample_chi",
    "sample_gamma",
    "chi_mean",
]

GENERATOR_FAMILY = "numpy.PCG64DXSM/SeedSequence"

_UINT64_MASK = (1 << 64) - 1


class RngStream:
    """A single-owner random stream identified by ``(master_seed, stream_id)``.

    Streams are never shared between workers. ``child(tag)`` derives an
    independent sub-stream deterministically, used for auxiliary draws
    (Brownian bridges) that must not perturb the parent sequence.
    """

    __slots__ = ("master_seed", "stream_id", "_path", "generator")

    def __init__(self, master_seed: int, stream_id: int, _path: tuple[int, ...] = ()):
        if stream_id < 0:
            raise InvalidParameterError("stream_id", stream_id, "must be non-negative")
        self.master_seed = int(master_seed) & _UINT64_MASK
        self.stream_id = int(stream_id)
        self._path = tuple(_path)
        seq = np.random.SeedSequence(
            entropy=self.master_seed, spawn_key=(self.stream_id, *self._path)
        )
        self.generator = np.random.Generator(np.random.PCG64DXSM(seq))

    def child(self, tag: int) -> RngStream:
        """Derive an independent, deterministic sub-stream."""
        return RngStream(self.master_seed, self.stream_id, (*self._path, int(tag)))

    def normal(self, size: int | None = None) -> float | np.ndarray:
        """Standard normal draws."""
        return self.generator.standard_normal(size)

    def uniform(self, size: int | None = None) -> float | np.ndarray:
        """Uniform draws on [0, 1)."""
        return self.generator.random(size)

    def __repr__(self) -> str:
        suffix = f", path={self._path}" if self._path else ""
        return f"RngStream(master_seed={self.master_seed}, stream_id={self.stream_id}{suffix})"


def make_stream(master_seed: int, stream_id: int) -> RngStream:
    """Create the stream for ``(master_seed, stream_id)``.

    Args:
        master_seed: 64-bit seed of the whole run (larger values are masked).
        stream_id: Index of the stream, normally the sample index.

    Returns:
        A freshly initialized :class:`RngStream`.
    """
    return RngStream(master_seed, stream_id)


def sample_gaussian(
    stream: RngStream, mean: float = 0.0, sd: float = 1.0, size: int | None = None
) -> float | np.ndarray:
    """Draw from N(mean, sd**2).

    ``sd = 0`` returns ``mean`` exactly without consuming randomness.
    """
    if not sd >= 0:
        raise InvalidParameterError("sd", sd, "standard deviation must be >= 0")
    if sd == 0:
        return mean if size is None else np.full(size, float(mean))
    return mean + sd * stream.normal(size)


def sample_gamma(
    stream: RngStream, shape: float | np.ndarray, scale: float = 1.0
) -> float | np.ndarray:
    """Gamma(shape, scale) draws; array shapes give one draw per entry.

    Shapes below one are boosted: gamma(a) = gamma(a + 1) * U**(1/a).
    """
    alpha = np.asarray(shape, dtype=float)
    if np.any(~(alpha > 0)):
        raise InvalidParameterError("shape", shape, "gamma shape must be > 0")
    small = alpha < 1.0
    draws = stream.generator.gamma(np.where(small, alpha + 1.0, alpha), scale)
    if np.any(small):
        u = stream.uniform(alpha.shape) if alpha.ndim else stream.uniform()
        draws = np.where(small, draws * np.power(u, 1.0 / alpha), draws)
    return float(draws) if alpha.ndim == 0 else draws


def sample_chi(stream: RngStream, r: float | np.ndarray) -> float | np.ndarray:
    """Draw from the chi distribution with real shape ``r`` > 0.

    Implemented as ``sqrt(gamma(r / 2, scale=2))``; ``r`` may be an array
    of shapes, giving independent draws.
    """
    shape = np.asarray(r, dtype=float)
    if np.any(~(shape > 0)):
        raise InvalidParameterError("r", r, "chi shape must be > 0")
    draws = np.sqrt(sample_gamma(stream, shape / 2.0, 2.0))
    return float(draws) if shape.ndim == 0 else draws


def chi_mean(r: float) -> float:
    """Exact mean of chi_r: sqrt(2) * Gamma((r + 1) / 2) / Gamma(r / 2)."""
    if not r > 0:
        raise InvalidParameterError("r", r, "chi shape must be > 0")
    return math.sqrt(2.0) * math.exp(math.lgamma((r + 1.0) / 2.0) - math.lgamma(r / 2.0))
