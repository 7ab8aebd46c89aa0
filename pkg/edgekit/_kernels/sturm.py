"""Compiled pivot recursions for symmetric tridiagonal matrices.

All kernels take the diagonal ``d`` and the squared off-diagonal ``e2``
and run in O(n) per shift. ``pivmin`` is the magnitude below which a pivot
is replaced by ``-pivmin``.
"""

from __future__ import annotations

import numba
import numpy as np


@numba.njit(cache=True, nogil=True)
def pivot_scale(d, e):
    """Largest row sum ``|d_k| + |e_{k-1}| + |e_k|`` of the matrix."""
    n = d.shape[0]
    scale = 0.0
    for k in range(n):
        s = abs(d[k])
        if k > 0:
            s += abs(e[k - 1])
        if k < n - 1:
            s += abs(e[k])
        if s > scale:
            scale = s
    return scale


@numba.njit(cache=True, nogil=True)
def negative_pivots(d, e2, lam, pivmin):
    """Number of negative pivots of the LDL^T factorization of T - lam*I."""
    n = d.shape[0]
    count = 0
    r = d[0] - lam
    if abs(r) < pivmin:
        r = -pivmin
    if r < 0.0:
        count += 1
    for k in range(1, n):
        r = d[k] - lam - e2[k - 1] / r
        if abs(r) < pivmin:
            r = -pivmin
        if r < 0.0:
            count += 1
    return count


@numba.njit(cache=True, nogil=True)
def negative_pivot_positions(d, e2, lam, pivmin, out):
    """Same recursion as ``negative_pivots``, writing negative-pivot indices to ``out``."""
    n = d.shape[0]
    count = 0
    r = d[0] - lam
    if abs(r) < pivmin:
        r = -pivmin
    if r < 0.0:
        out[count] = 0
        count += 1
    for k in range(1, n):
        r = d[k] - lam - e2[k - 1] / r
        if abs(r) < pivmin:
            r = -pivmin
        if r < 0.0:
            out[count] = k
            count += 1
    return count


@numba.njit(cache=True, nogil=True)
def bisect_eigenvalues(d, e2, ranks, lo, hi, abstol, reltol, pivmin):
    """Eigenvalues of the given 1-based ascending ``ranks`` by bisection.

    The search interval must satisfy count(lo) < min(ranks) and
    count(hi) >= max(ranks). Each bracket shrinks until its width is at
    most ``max(abstol, reltol * (|lo| + |hi|))`` or floating point stops
    making progress; the midpoint is returned.
    """
    m = ranks.shape[0]
    out = np.empty(m)
    left = lo
    for i in range(m):
        j = ranks[i]
        a = left
        b = hi
        while True:
            width = b - a
            if width <= max(abstol, reltol * (abs(a) + abs(b))):
                break
            mid = a + 0.5 * width
            if mid <= a or mid >= b:
                break
            if negative_pivots(d, e2, mid, pivmin) >= j:
                b = mid
            else:
                a = mid
        out[i] = a + 0.5 * (b - a)
        left = a
    return out
