"""Boundary-clustered radius grids and a golden-section maximizer."""

import math

import numpy as np

# Default depth of the weight-comparison grid: 1 - r reaches 2**-14.
CLUSTER_OCTAVES = 14

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def clustered_radii(n, r_max=None):
    """Radii ``1 - (1 - r_max)**(i/n)`` for ``i = 0..n`` (``n + 1`` points).

    With ``r_max = None`` the grid is ``1 - 2**(-14 i / n)``.  The spacing is
    uniform in ``log(1 - r)``, so most points sit near the unit circle.
    """
    n = int(n)
    if n < 1:
        raise ValueError("grid needs at least one interval")
    if r_max is None:
        log_gap = -CLUSTER_OCTAVES * math.log(2.0)
    else:
        log_gap = math.log1p(-r_max)
    u = log_gap * np.arange(n + 1) / n
    return -np.expm1(u)


def radius_from_log_gap(u):
    """Map ``u = log(1 - r)`` back to ``r``."""
    return -np.expm1(u)


def golden_max(f, a, b, tol=1e-12, max_iter=200):
    """Maximize a unimodal ``f`` on ``[a, b]`` by golden-section search.

    Returns ``(x_best, f_best, n_evals)`` where ``x_best`` is the best point
    actually evaluated.
    """
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    best_x, best_f = (c, fc) if fc >= fd else (d, fd)
    n = 2
    for _ in range(max_iter):
        if abs(b - a) <= tol * max(1.0, abs(a), abs(b)):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
            x_new, f_new = c, fc
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
            x_new, f_new = d, fd
        n += 1
        if f_new > best_f:
            best_x, best_f = x_new, f_new
    return best_x, best_f, n
