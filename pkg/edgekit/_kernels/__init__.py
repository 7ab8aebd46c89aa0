"""Compiled inner loops for edgekit."""

from edgekit._kernels.riccati import integrate_riccati
from edgekit._kernels.sturm import (
    bisect_eigenvalues,
    negative_pivot_positions,
    negative_pivots,
    pivot_scale,
)

__all__ = [
    "bisect_eigenvalues",
    "integrate_riccati",
    "negative_pivot_positions",
    "negative_pivots",
    "pivot_scale",
]
