"""Riccati-diffusion route: eigenvalues as explosion thresholds of one Brownian path."""

from __future__ import annotations

from typing import Any

import numpy as np

from edgekit._routes.base import BaseRoute
from edgekit.randkit import RngStream
from edgekit.riccati import RiccatiConfig, sample_lambda0, sample_lambda_k


class RiccatiRoute(BaseRoute):
    """Joint draw of (Lambda_0, ..., Lambda_{k-1}) by bisection over the level."""

    name = "riccati"

    def __init__(self, beta: float, config: RiccatiConfig | None = None, k: int = 1):
        super().__init__(k)
        self.beta = beta
        self.config = config or RiccatiConfig()

    def _draw(self, stream: RngStream) -> np.ndarray:
        if self.k == 1:
            return np.array([sample_lambda0(self.beta, self.config, stream)])
        return sample_lambda_k(self.beta, self.k - 1, self.config, stream)

    def params(self) -> dict[str, Any]:
        params = super().params()
        params.update(beta=self.beta, **self.config.model_dump())
        return params
