"""Stochastic Airy operator route: lowest eigenvalues of the discretized operator."""

from __future__ import annotations

from typing import Any

import numpy as np

from edgekit._routes.base import BaseRoute
from edgekit.airyop import DEFAULT_X_MAX, Split, sao_eigs
from edgekit.exceptions import InvalidParameterError
from edgekit.randkit import RngStream


class SaoRoute(BaseRoute):
    """Lowest k eigenvalues of one operator draw at grid step h."""

    name = "sao"

    def __init__(
        self,
        beta: float,
        h: float,
        x_max: float = DEFAULT_X_MAX,
        k: int = 1,
        split: Split = "diagonal",
    ):
        super().__init__(k)
        if not beta > 0:
            raise InvalidParameterError("beta", beta, "must be > 0")
        self.beta = beta
        self.h = h
        self.x_max = x_max
        self.split = split

    def _draw(self, stream: RngStream) -> np.ndarray:
        return sao_eigs(self.beta, self.h, self.x_max, self.k, stream, split=self.split)

    def params(self) -> dict[str, Any]:
        params = super().params()
        params.update(beta=self.beta, h=self.h, x_max=self.x_max, split=self.split)
        return params
