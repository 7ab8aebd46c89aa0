"""Tridiagonal-ensemble route: scaled top eigenvalues of Hermite or Laguerre draws."""

from __future__ import annotations

from typing import Any

import numpy as np

from edgekit._routes.base import BaseRoute
from edgekit.ensembles import HermiteSpec, LaguerreSpec, edge_sample
from edgekit.randkit import RngStream


class EnsembleRoute(BaseRoute):
    """Edge statistics of the beta-Hermite or beta-Laguerre tridiagonal model."""

    def __init__(self, spec: HermiteSpec | LaguerreSpec, k: int = 1):
        super().__init__(k)
        self.spec = spec
        self.name = "hermite" if isinstance(spec, HermiteSpec) else "laguerre"

    def _draw(self, stream: RngStream) -> np.ndarray:
        return edge_sample(self.spec, self.k, stream).values

    def params(self) -> dict[str, Any]:
        params = super().params()
        params.update(n=self.spec.n, beta=self.spec.beta)
        if isinstance(self.spec, LaguerreSpec):
            params["kappa"] = self.spec.kappa
        return params
