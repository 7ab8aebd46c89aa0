"""Base route class and the parallel draw runner shared by all routes."""

from __future__ import annotations

import logging
import os
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Any, TypeVar

import joblib
import numpy as np

from edgekit.exceptions import InvalidParameterError, UndecidedPathError
from edgekit.randkit import RngStream, make_stream

logger = logging.getLogger(__name__)

T = TypeVar("T")

THREADS_ENV = "EDGEKIT_THREADS"


def resolve_threads(threads: int | None = None) -> int:
    """Worker count: explicit value, else ``EDGEKIT_THREADS``, else the CPU count."""
    if threads is None:
        raw = os.environ.get(THREADS_ENV, "").strip()
        if raw:
            try:
                threads = int(raw)
            except ValueError as e:
                raise InvalidParameterError(THREADS_ENV, raw, "must be an integer") from e
        else:
            threads = os.cpu_count() or 1
    if threads < 1:
        raise InvalidParameterError("threads", threads, "must be >= 1")
    return threads


def run_draws(
    worker: Callable[[RngStream], T],
    samples: int,
    master_seed: int,
    threads: int | None = None,
) -> list[T]:
    """Evaluate ``worker(make_stream(master_seed, i))`` for i < samples.

    Sample ``i`` always owns stream ``i``, so the result list (in index
    order) does not depend on the worker count.
    """
    if samples < 1:
        raise InvalidParameterError("samples", samples, "must be >= 1")
    n_jobs = min(resolve_threads(threads), samples)
    if n_jobs == 1:
        return [worker(make_stream(master_seed, i)) for i in range(samples)]
    return joblib.Parallel(n_jobs=n_jobs, prefer="threads")(
        joblib.delayed(worker)(make_stream(master_seed, i)) for i in range(samples)
    )


@dataclass(frozen=True)
class RouteDraw:
    """Values of one draw; ``values`` is None for an undecided draw."""

    stream_id: int
    values: np.ndarray | None

    @property
    def undecided(self) -> bool:
        return self.values is None


class BaseRoute:
    """Base class for all Monte Carlo routes.

    A route turns a stream into one draw of a fixed number of edge
    statistics. Subclasses implement :meth:`_draw`.
    """

    name: str = "base"

    def __init__(self, k: int = 1):
        """
        Initialize the route.

        Args:
            k: Number of values per draw.
        """
        if k < 1:
            raise InvalidParameterError("k", k, "must be >= 1")
        self.k = k

    def _draw(self, stream: RngStream) -> np.ndarray:
        raise NotImplementedError

    def draw(self, stream: RngStream) -> RouteDraw:
        """One draw; undecided Riccati paths give an empty draw."""
        try:
            values = np.asarray(self._draw(stream), dtype=float)
        except UndecidedPathError as e:
            logger.debug("stream %d undecided: %s", stream.stream_id, e)
            values = None
        return RouteDraw(stream.stream_id, values)

    def draw_many(
        self, samples: int, master_seed: int, threads: int | None = None
    ) -> list[RouteDraw]:
        """Draws for streams 0..samples-1 in index order."""
        return run_draws(self.draw, samples, master_seed, threads)

    def params(self) -> dict[str, Any]:
        """Parameter snapshot for the run manifest."""
        return {"route": self.name, "k": self.k}


def stack_draws(draws: Sequence[RouteDraw], k: int) -> tuple[np.ndarray, int]:
    """Decided draws as a (m, k) array, plus the number of undecided draws."""
    decided = [d.values for d in draws if d.values is not None]
    undecided = len(draws) - len(decided)
    if not decided:
        return np.empty((0, k)), undecided
    return np.vstack(decided), undecided
