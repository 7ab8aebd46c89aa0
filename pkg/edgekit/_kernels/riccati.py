"""Compiled Euler-Maruyama integrator for the Riccati explosion diffusion."""

from __future__ import annotations

import math

import numba

SURVIVED = 0
UNDECIDED = 1
OVERFLOW = 2


@numba.njit(cache=True, nogil=True)
def _brownian_at(w, grid_step, x):
    pos = x / grid_step
    i = int(pos)
    if i >= w.shape[0] - 1:
        return w[w.shape[0] - 1]
    frac = pos - i
    return w[i] + frac * (w[i + 1] - w[i])


@numba.njit(cache=True, nogil=True)
def integrate_riccati(
    lam,
    sigma,
    w,
    grid_step,
    cap,
    blow,
    dt_max,
    adapt_c,
    horizon,
    survive_margin,
    x_limit,
    times,
):
    """Integrate dp = (x - lam - p^2) dx - sigma dW from p(0) = cap.

    ``w`` holds the Brownian path on the grid ``k * grid_step`` and is
    read by linear interpolation. Crossings of ``blow`` are written to
    ``times`` and restart p at ``cap`` at the same x.

    Returns ``(explosions, status, x_end)``.
    """
    x = 0.0
    p = cap
    w_x = 0.0
    last = 0.0
    n = 0
    settle = max(lam, 0.0)
    capacity = times.shape[0]
    while x < x_limit:
        dt = min(dt_max, adapt_c / (1.0 + p * p))
        if x + dt > x_limit:
            dt = x_limit - x
        x_next = x + dt
        drift = x - lam - p * p
        if sigma != 0.0:
            w_next = _brownian_at(w, grid_step, x_next)
            p = p + drift * dt - sigma * (w_next - w_x)
            w_x = w_next
        else:
            p = p + drift * dt
        x = x_next
        if p <= blow:
            if n == capacity:
                return n, OVERFLOW, x
            times[n] = x
            n += 1
            last = x
            p = cap
            continue
        if x >= max(last, settle) + horizon:
            if p >= math.sqrt(max(x - lam, 0.0)) - survive_margin:
                return n, SURVIVED, x
    return n, UNDECIDED, x
