"""Estimate ``sup_{|z|<1} w(z) |f'(z)|``, the weighted Bloch semi-norm.

The estimate is always a value that was actually evaluated, so it is a lower
bound of the true supremum.  Convergence evidence is heuristic: a coarse polar
sweep with radii uniform in ``log(1 - r)``, then a few rounds of re-gridding
in a shrinking rectangle around the incumbent.
"""

import math
from dataclasses import dataclass, asdict

import numpy as np

from ._grid import golden_max, radius_from_log_gap
from .errors import EvaluationError, UnsupportedError

_REFINE_POINTS = 17


@dataclass(frozen=True)
class GridConfig:
    n_radii: int = 512
    n_angles: int = 256
    r_max: float = 1.0 - 1e-12
    refine_rounds: int = 6
    refine_shrink: float = 0.25
    rel_tol: float = 1e-7
    divergence_cap: float = 1e12

    def __post_init__(self):
        if not 0 < self.r_max < 1:
            raise ValueError("r_max must lie in (0, 1)")
        if not 0 < self.refine_shrink < 1:
            raise ValueError("refine_shrink must lie in (0, 1)")
        if self.n_radii < 2 or self.n_angles < 1 or self.refine_rounds < 0:
            raise ValueError("grid counts must be positive")

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class SupEstimate:
    value: float
    argmax: complex
    boundary_dominated: bool
    diverged: bool
    evaluations: int

    def to_dict(self):
        d = asdict(self)
        d["argmax"] = [self.argmax.real, self.argmax.imag]
        return d


def _locate_fault(fn, pts):
    flat = np.ravel(pts)
    for p in flat:
        try:
            v = fn(np.array([p]))
        except Exception as exc:  # noqa: BLE001 - re-raised with the point
            raise EvaluationError(f"evaluator raised {exc!r}", complex(p)) from exc
        if not np.all(np.isfinite(v)):
            raise EvaluationError("evaluator returned a non-finite value", complex(p))
    raise EvaluationError("evaluator failed on a batch but not on single points")


def _objective(df, w):
    """``w(z) |df(z)|`` on an array of complex points, with fault reporting."""

    def fn(z):
        try:
            vals = np.asarray(w.at(z), dtype=float) * np.abs(df(z))
        except EvaluationError:
            raise
        except Exception:
            _locate_fault(lambda p: w.at(p) * np.abs(df(p)), z)
        if not np.all(np.isfinite(vals)):
            bad = np.flatnonzero(~np.isfinite(np.ravel(vals)))[0]
            raise EvaluationError("non-finite weighted derivative", complex(np.ravel(z)[bad]))
        return vals

    return fn


def _finish(value, arg, cfg, evals):
    value = float(value)
    diverged = value > cfg.divergence_cap
    near_edge = cfg.r_max - abs(arg) <= 10.0 * (1.0 - cfg.r_max)
    return SupEstimate(
        value=value,
        argmax=complex(arg),
        boundary_dominated=bool(near_edge or diverged),
        diverged=bool(diverged),
        evaluations=int(evals),
    )


def _spread(v, a, b):
    """Drop from the lattice maximum to its lowest 4-neighbour."""
    nbrs = [v[a, b]]
    if a > 0:
        nbrs.append(v[a - 1, b])
    if a + 1 < v.shape[0]:
        nbrs.append(v[a + 1, b])
    if b > 0:
        nbrs.append(v[a, b - 1])
    if b + 1 < v.shape[1]:
        nbrs.append(v[a, b + 1])
    return v[a, b] - min(nbrs)


def _coarse_log_gaps(cfg):
    return np.linspace(0.0, math.log1p(-cfg.r_max), cfg.n_radii)


def sup_weighted_deriv(df, w, cfg=None):
    """2-D estimate of ``sup w(z)|df(z)|`` over ``|z| <= cfg.r_max``.

    ``df`` maps an array of complex points to the derivative values.  Ties are
    broken towards the smallest radius, then the smallest angle, so the result
    does not depend on evaluation order.
    """
    cfg = cfg or GridConfig()
    fn = _objective(df, w)
    u_min = math.log1p(-cfg.r_max)

    u = _coarse_log_gaps(cfg)
    theta = 2.0 * math.pi * np.arange(cfg.n_angles) / cfg.n_angles
    r = radius_from_log_gap(u)
    vals = fn(r[:, None] * np.exp(1j * theta)[None, :])
    evals = vals.size
    i, k = np.unravel_index(int(np.argmax(vals)), vals.shape)
    best = vals[i, k]
    u_c, th_c = u[i], theta[k]

    hu = abs(u[1] - u[0])
    hth = math.pi / cfg.n_angles * 2.0
    for _ in range(cfg.refine_rounds):
        us = np.clip(np.linspace(u_c + hu, u_c - hu, _REFINE_POINTS), u_min, 0.0)
        ths = np.linspace(th_c - hth, th_c + hth, _REFINE_POINTS)
        rr = radius_from_log_gap(us)
        v = fn(rr[:, None] * np.exp(1j * ths)[None, :])
        evals += v.size
        a, b = np.unravel_index(int(np.argmax(v)), v.shape)
        gain = v[a, b] - best
        if gain > 0:
            best, u_c, th_c = v[a, b], us[a], ths[b]
        # a lattice containing the incumbent can show zero gain far from the
        # optimum, so also require the local spread around it to be small
        if gain <= cfg.rel_tol * best and _spread(v, a, b) <= cfg.rel_tol * best:
            break
        hu *= cfg.refine_shrink
        hth *= cfg.refine_shrink

    arg = radius_from_log_gap(u_c) * np.exp(1j * (th_c % (2.0 * math.pi)))
    return _finish(best, arg, cfg, evals)


def sup_weighted_deriv_radial(profile, w, cfg=None):
    """1-D version for ``|f'(z)| = profile(|z|)``.

    Coarse scan over the same radii as the 2-D engine, then golden-section
    search in ``log(1 - r)`` around the best grid point.
    """
    if not w.radial:
        raise UnsupportedError("the radial engine needs a radial weight")
    cfg = cfg or GridConfig()
    u_min = math.log1p(-cfg.r_max)
    z_weight = w.at

    def fn(uu):
        rr = radius_from_log_gap(np.asarray(uu, dtype=float))
        vals = np.asarray(z_weight(rr + 0j), dtype=float) * np.abs(profile(rr))
        if not np.all(np.isfinite(vals)):
            bad = np.flatnonzero(~np.isfinite(np.ravel(vals)))[0]
            raise EvaluationError("non-finite weighted derivative", complex(np.ravel(rr)[bad]))
        return vals

    u = _coarse_log_gaps(cfg)
    vals = fn(u)
    evals = vals.size
    i = int(np.argmax(vals))
    best, u_best = vals[i], u[i]
    lo = u[min(i + 1, u.size - 1)]
    hi = u[max(i - 1, 0)]
    if hi > lo:
        x, fx, n = golden_max(lambda uu: float(fn(np.array([uu]))[0]), max(lo, u_min), min(hi, 0.0), tol=1e-13)
        evals += n
        if fx > best:
            best, u_best = fx, x
    return _finish(best, complex(radius_from_log_gap(u_best)), cfg, evals)
