"""Exact log-Bloch norms of the monomials ``F_j(z) = z**j``.

For ``j >= 1`` the norm is ``max_{0<t<1} H_j(t)`` with

    H_j(t) = j t**(j-1) (1 - t) log(3 / (1 - t)).

Everything here works in the variable ``s = 1 - t``.  Near the maximizer
``s ~ 1/j``, so for large ``j`` the ``t`` form would lose every significant
digit of ``1 - t``.  In that variable the critical-point equation
``H_j'(t) = j t**(j-2) g_j(t) = 0`` reads

    g(j, s) = (j s - 1) log(3 / s) + 1 - s = 0,

which is increasing in ``s`` and has exactly one root in ``(0, 1)``.
"""

import csv
import functools
import io
import math
from dataclasses import dataclass

import numpy as np

from ._grid import golden_max
from .errors import DomainError, PreconditionError

L = 1.0 - 1.0 / math.log(3.0)


@dataclass(frozen=True)
class Constants:
    L: float = L
    c_lower_h: float = L / (2.0 * math.exp(L))
    c_upper_band: float = (2.0 * L + 6.0 * math.exp(L - 1.0)) / L
    ratio_cap: float = 3.0 / (2.0 * math.e)


CONSTANTS = Constants()

ROOT_TOL = 1e-10
NEWTON_MAX_ITER = 100
_BRACKET = (1e-18, 1.0 - 1e-12)
SCAN_POINTS = 10_000
MIN_ROOT_J = 11


def r_seq(j):
    """``r_0 = 0`` and ``r_j = 1 - L/(j + L)``; accepts arrays."""
    j_arr = np.asarray(j)
    if np.any(j_arr < 0):
        raise DomainError("r_j is defined for j >= 0")
    out = np.where(j_arr == 0, 0.0, j_arr / (j_arr + L))
    return float(out) if out.ndim == 0 else out


def one_minus_r_seq(j):
    """``1 - r_j`` without cancellation."""
    j_arr = np.asarray(j, dtype=float)
    out = np.where(j_arr == 0, 1.0, L / (j_arr + L))
    return float(out) if out.ndim == 0 else out


def g(j, s):
    """The root function ``g_j`` written in ``s = 1 - t``."""
    s_arr = np.asarray(s, dtype=float)
    if np.any(~((s_arr > 0) & (s_arr < 1))):
        raise DomainError("s must lie in (0, 1)")
    return _g(np.asarray(j, dtype=float), s_arr)


def _g(j, s):
    return (j * s - 1.0) * np.log(3.0 / s) + 1.0 - s


def _dg(j, s):
    return j * (np.log(3.0 / s) - 1.0) + 1.0 / s - 1.0


def _H_s(j, s):
    """``H_j(1 - s)``; the power is formed as ``exp((j-1) log1p(-s))``."""
    j = np.asarray(j, dtype=float)
    s = np.asarray(s, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        power = np.where(j == 1, 1.0, np.exp((j - 1.0) * np.log1p(-s)))
        return j * power * s * np.log(3.0 / s)


def _check_jt(j, t):
    if np.any(np.asarray(j) < 1):
        raise DomainError("j must be a positive integer")
    t_arr = np.asarray(t, dtype=float)
    if np.any(~((t_arr > 0) & (t_arr < 1))):
        raise DomainError("t must lie in (0, 1)")
    return t_arr


def H(j, t):
    """``H_j(t) = j t**(j-1) (1 - t) log(3/(1 - t))`` for ``0 < t < 1``."""
    t_arr = _check_jt(j, t)
    out = _H_s(j, 1.0 - t_arr)
    return float(out) if out.ndim == 0 else out


def h(j, t):
    """``h_j(t) = H_j(t) / log(j + 1)``."""
    out = H(j, t) / np.log(np.asarray(j, dtype=float) + 1.0)
    return float(out) if np.ndim(out) == 0 else out


def h_of_s(j, s):
    """``h_j(1 - s)``, accurate when ``s`` is tiny."""
    return _H_s(j, s) / math.log(j + 1.0)


def _solve_s(j):
    """Vectorized safeguarded Newton for the root of ``g(j, .)``.

    Each element keeps a bracket ``[lo, hi]`` with ``g(lo) < 0 < g(hi)``;
    Newton steps that leave the bracket are replaced by bisection.
    """
    j = np.asarray(j, dtype=float)
    lo = np.full_like(j, _BRACKET[0])
    hi = np.full_like(j, _BRACKET[1])
    s = 1.0 / j - 1.0 / (j * np.log(3.0 * j))
    s = np.clip(s, lo, hi)
    done = np.zeros(j.shape, dtype=bool)
    for _ in range(NEWTON_MAX_ITER):
        gs = _g(j, s)
        done |= np.abs(gs) <= 1e-14 * np.maximum(1.0, j * s)
        if np.all(done):
            break
        hi = np.where(gs > 0, s, hi)
        lo = np.where(gs < 0, s, lo)
        step = gs / _dg(j, s)
        cand = s - step
        bad = ~((cand > lo) & (cand < hi))
        cand = np.where(bad, 0.5 * (lo + hi), cand)
        converged = np.abs(cand - s) <= 4 * np.finfo(float).eps * s
        s = np.where(done, s, cand)
        done |= converged
    return s, _g(j, s)


def solve_tj(j):
    """Root ``s_j = 1 - t_j`` of ``g(j, .)`` for ``j >= 11``.

    Returns ``(s_j, residual)`` with ``|residual| <= 1e-10``.
    """
    j = int(j)
    if j < MIN_ROOT_J:
        raise PreconditionError(
            f"unique maximizer is only guaranteed for j >= 11 (got {j}); "
            "use monomial_log_norm, which scans small j globally"
        )
    s, res = _solve_s(np.array([j]))
    s, res = float(s[0]), float(res[0])
    if abs(res) > ROOT_TOL:
        raise ArithmeticError(f"root solve for j={j} left residual {res:g}")
    return s, res


@dataclass(frozen=True)
class MonomialNormRecord:
    j: int
    s_j: float
    norm: float
    residual: float
    method: str  # "root_find" or "global_scan"
    boundary: bool = False

    @property
    def t_j(self):
        return 1.0 - self.s_j


def _scan_small(j):
    # no uniqueness result below j = 11, so scan the whole interval
    t = (np.arange(1, SCAN_POINTS + 1) - 0.5) / SCAN_POINTS
    vals = _H_s(j, 1.0 - t)
    i = int(np.argmax(vals))
    a = t[max(i - 1, 0)] if i > 0 else 0.0
    b = t[i + 1] if i + 1 < t.size else 1.0
    lo, hi = max(a, 1e-300), min(b, 1.0 - 1e-16)
    x, fx, _ = golden_max(lambda tt: float(_H_s(j, 1.0 - tt)), lo, hi, tol=1e-15)
    if fx < vals[i]:
        x, fx = t[i], vals[i]
    return float(1.0 - x), float(fx)


@functools.lru_cache(maxsize=None)
def monomial_log_norm(j):
    """``||F_j||_log = sup_{0<t<1} H_j(t)`` as a :class:`MonomialNormRecord`."""
    if int(j) != j or j <= 0:
        raise DomainError(f"j must be a positive integer, got {j}")
    j = int(j)
    if j == 1:
        # H_1(t) = s log(3/s) with s = 1 - t increases in s on (0, 1):
        # the supremum log 3 is approached as t -> 0+
        return MonomialNormRecord(1, 1.0, math.log(3.0), math.nan, "global_scan", True)
    if j < MIN_ROOT_J:
        s, val = _scan_small(j)
        return MonomialNormRecord(j, s, val, math.nan, "global_scan")
    s, res = solve_tj(j)
    return MonomialNormRecord(j, s, float(_H_s(j, s)), res, "root_find")


def monomial_log_norms(js):
    """Vectorized ``||F_j||_log`` for an integer array ``js``."""
    js = np.asarray(js, dtype=np.int64)
    if np.any(js < 1):
        raise DomainError("j must be positive")
    out = np.empty(js.shape, dtype=float)
    big = js >= MIN_ROOT_J
    if np.any(big):
        s, res = _solve_s(js[big].astype(float))
        if np.any(np.abs(res) > ROOT_TOL):
            raise ArithmeticError("root solve failed to reach tolerance")
        out[big] = _H_s(js[big], s)
    for idx in np.flatnonzero(~big):
        out[idx] = monomial_log_norm(int(js[idx])).norm
    return out


def norm_table(js):
    return [monomial_log_norm(int(j)) for j in js]


def _fmt(x):
    return f"{x:.17g}"


def norm_table_csv(records):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["j", "s_j", "norm", "residual", "method"])
    for rec in records:
        w.writerow([rec.j, _fmt(rec.s_j), _fmt(rec.norm), _fmt(rec.residual), rec.method])
    return buf.getvalue()


def A(x):
    """``(x/(x + L))**(x - 1)`` for ``x >= 1``, via ``exp(-(x-1) log1p(L/x))``."""
    x_arr = np.asarray(x, dtype=float)
    if np.any(~(x_arr >= 1)):
        raise DomainError("A(x) is defined for x >= 1")
    out = np.exp(-(x_arr - 1.0) * np.log1p(L / x_arr))
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class Threshold:
    N: int
    window: int
    max_ratio_in_window: float


def threshold_ratio(m):
    m = np.asarray(m)
    return monomial_log_norms(m) / np.log(m + 1.0)


def find_threshold_N(window=10_000):
    """Smallest ``N`` with ``||F_m||_log / log(m+1) < 3/(2e)`` for ``m`` in ``[N, N + window]``.

    Only the finite window is checked; beyond it the ratio tends to ``1/e``.
    """
    cap = CONSTANTS.ratio_cap
    upto = 2 * window
    while True:
        m = np.arange(1, upto + 1)
        ratio = threshold_ratio(m)
        N = 1
        for v in m[ratio >= cap]:
            if N <= v <= N + window:
                N = int(v) + 1
        if N + window <= upto:
            seg = ratio[N - 1 : N + window]
            return Threshold(N=N, window=window, max_ratio_in_window=float(seg.max()))
        upto *= 2
