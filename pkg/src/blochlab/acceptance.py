"""Acceptance checks, shared by ``blochlab verify`` and the test suite.

Each check returns a :class:`CheckResult`; none of them raise on failure.
``fast=True`` shrinks the index ranges of the two slowest checks (the 2-D
engine sweep and the h_j band scan).
"""

import contextlib
import io
import math
import time
from dataclasses import dataclass

import numpy as np

from . import monomials as mono
from .monomials import CONSTANTS, L
from .operator import classify, essential_norm_band, quotient_sequence
from .seminorm import sup_weighted_deriv
from .symbols import (
    Blaschke, Compose, Constant, Dilate, Identity, Mobius, Poly, Power, Rotate,
)
from .weights import VLOG, LogWeight, equivalence_constants


@dataclass
class CheckResult:
    key: str
    title: str
    passed: bool
    detail: str
    seconds: float = 0.0

    def line(self):
        status = "PASS" if self.passed else "FAIL"
        return f"[{status}] {self.key:>3} {self.title}: {self.detail} ({self.seconds:.2f}s)"


def _timed(fn):
    def wrapper(fast=False):
        t0 = time.perf_counter()
        res = fn(fast)
        res.seconds = time.perf_counter() - t0
        return res

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


def _monomial_deriv(j):
    if j == 1:
        return lambda z: np.ones_like(z)
    return lambda z: j * z ** (j - 1)


@_timed
def check_1(fast=False):
    """2-D engine vs exact monomial norms, j = 1..50, rel 1e-6, < 30 s."""
    j_top = 20 if fast else 50
    t0 = time.perf_counter()
    worst, worst_j = 0.0, 0
    for j in range(1, j_top + 1):
        est = sup_weighted_deriv(_monomial_deriv(j), VLOG).value
        rel = abs(est / mono.monomial_log_norm(j).norm - 1.0)
        if rel > worst:
            worst, worst_j = rel, j
    dt = time.perf_counter() - t0
    ok = worst <= 1e-6 and dt < 30.0
    return CheckResult("1", "monomial-norm oracle", ok,
                       f"j<= {j_top}: max rel err {worst:.2e} at j={worst_j}, {dt:.1f}s")


def asymptotic_ratio(j):
    """``e ||F_j||_log / log(j + 1)``."""
    return math.e * mono.monomial_log_norm(j).norm / math.log(j + 1.0)


@_timed
def check_2(fast=False):
    """e ||F_j|| / log(j+1) at j = 2**k: decreasing for k >= 6, in [1, 1.08] at k = 30."""
    t0 = time.perf_counter()
    ks = list(range(4, 31))
    vals = {k: asymptotic_ratio(2**k) for k in ks}
    dec = all(vals[k + 1] < vals[k] for k in range(6, 30))
    final = vals[30]
    dt = time.perf_counter() - t0
    ok = dec and 1.0 <= final <= 1.08 and dt < 5.0
    return CheckResult("2", "norm asymptotics", ok,
                       f"decreasing k>=6: {dec}; value at 2^30 = {final:.6f}")


def root_identity_error(j, s):
    lhs = j * s
    rhs = 1.0 - (1.0 - s) / math.log(3.0 / s)
    return abs(lhs - rhs) / abs(rhs)


@_timed
def check_3(fast=False):
    """|g(j, s_j)| <= 1e-10 and the rearranged root identity to rel 1e-9."""
    worst_res, worst_id = 0.0, 0.0
    for j in (11, 100, 10**4, 10**8):
        s, res = mono.solve_tj(j)
        worst_res = max(worst_res, abs(float(mono.g(j, s))))
        worst_id = max(worst_id, root_identity_error(j, s))
    ok = worst_res <= 1e-10 and worst_id <= 1e-9
    return CheckResult("3", "root identity", ok,
                       f"max |g| = {worst_res:.1e}, max identity rel err = {worst_id:.1e}")


@_timed
def check_4(fast=False):
    """j s_j increasing to 1 over 1e2..1e8; (1 - s_j)^(j-1) within 0.05 of 1/e at 1e6."""
    js = [int(round(10 ** (e / 2))) for e in range(4, 17)]
    prod = [j * mono.solve_tj(j)[0] for j in js]
    inc = all(b > a for a, b in zip(prod, prod[1:])) and prod[-1] < 1.0
    j = 10**6
    s = mono.solve_tj(j)[0]
    power = math.exp((j - 1) * math.log1p(-s))
    gap = abs(power - 1.0 / math.e)
    ok = inc and gap <= 0.05
    return CheckResult("4", "maximizer asymptotics", ok,
                       f"j*s_j increasing: {inc} ({prod[0]:.4f} -> {prod[-1]:.4f}); "
                       f"|t^(j-1) - 1/e| at 1e6 = {gap:.4f}")


@_timed
def check_5(fast=False):
    """A strictly decreasing on 1e3 points of [1, 1e8]; |A(1e8) - e^-L| <= 1e-7."""
    x = np.geomspace(1.0, 1e8, 1000)
    a = mono.A(x)
    dec = bool(np.all(np.diff(a) < 0))
    gap = abs(mono.A(1e8) - math.exp(-L))
    ok = dec and gap <= 1e-7 and bool(np.all(a >= math.exp(-L)))
    return CheckResult("5", "A(x) monotone limit", ok,
                       f"strictly decreasing: {dec}; |A(1e8) - e^-L| = {gap:.1e}")


def h_band_checks(j, n=1000):
    """Min of h_j on [r_{j-1}, r_j] and max forward difference on [r_{j-1}, 1 - 1e-6)."""
    s_lo, s_hi = mono.one_minus_r_seq(j), mono.one_minus_r_seq(j - 1)
    # s = 1 - t, sampled from t = r_{j-1} towards t = r_j
    s_band = np.linspace(s_hi, s_lo, n)
    s_band = s_band[s_band < 1.0]
    if s_band.size == 0 or s_band[0] != s_hi:
        s_band = np.concatenate([[min(s_hi, 1.0 - 1e-16)], s_band])
    band_min = float(np.min(mono.h_of_s(j, s_band)))
    s_all = np.geomspace(min(s_hi, 1.0 - 1e-16), 1e-6, n)
    diffs = np.diff(mono.h_of_s(j, s_all))
    return band_min, float(np.max(diffs))


@_timed
def check_6(fast=False):
    """h_j >= L/(2e^L) on [r_{j-1}, r_j] and decreasing on [r_{j-1}, 1), j = 1..1000."""
    j_top = 200 if fast else 1000
    c = CONSTANTS.c_lower_h
    worst_min, worst_diff = math.inf, -math.inf
    for j in range(1, j_top + 1):
        m, d = h_band_checks(j)
        worst_min = min(worst_min, m)
        worst_diff = max(worst_diff, d)
    ok = worst_min >= c and worst_diff <= 0
    return CheckResult("6", "h_j lower bound and monotonicity", ok,
                       f"j<= {j_top}: min h = {worst_min:.5f} (bound {c:.5f}), "
                       f"max diff = {worst_diff:.1e}")


@_timed
def check_7(fast=False):
    """Threshold N with ||F_m||/log(m+1) < 3/(2e) on a 1e4 window; stable under doubling."""
    a = mono.find_threshold_N(10_000)
    b = mono.find_threshold_N(20_000)
    ok = a.N == b.N and a.max_ratio_in_window < CONSTANTS.ratio_cap
    return CheckResult("7", "threshold N", ok,
                       f"N = {a.N} (doubled window: {b.N}), window max ratio "
                       f"{a.max_ratio_in_window:.5f} < {CONSTANTS.ratio_cap:.5f}")


def identity_series():
    return quotient_sequence(Identity(), VLOG, 200, threads=1)


@_timed
def check_8a(fast=False):
    """q_j(id, vlog) = 1 +- 1e-6; bounded strong_yes, compact strong_no; band lower end 1."""
    s = identity_series()
    dev = float(np.max(np.abs(s.q - 1.0)))
    c = classify(s)
    band = essential_norm_band(s)
    ok = (dev <= 1e-6 and c.bounded_evidence == "strong_yes"
          and c.compact_evidence == "strong_no" and abs(band.lower - 1.0) <= 1e-6)
    return CheckResult("8a", "identity calibration", ok,
                       f"j<= {s.j_max}: max |q-1| = {dev:.1e}; {c.bounded_evidence}/"
                       f"{c.compact_evidence}; lower = {band.lower:.9f}")


BAND_UPPER_TARGET = 28.9011
BAND_UPPER_TOL = 1e-3


@_timed
def check_8b(fast=False):
    """Identity band upper end = 28.9011 +- 1e-3."""
    s = identity_series()
    band = essential_norm_band(s)
    gap = abs(band.upper - BAND_UPPER_TARGET)
    ok = gap <= BAND_UPPER_TOL
    return CheckResult("8b", "identity band upper end", ok,
                       f"upper = {band.upper:.6f}, target {BAND_UPPER_TARGET} +- "
                       f"{BAND_UPPER_TOL:g}, off by {gap:.2e}")


@_timed
def check_9(fast=False):
    """q_j(dilate:0.9, vlog) = 0.9^j to rel 1e-5 for j <= 200; compact strong_yes; < 60 s."""
    t0 = time.perf_counter()
    s = quotient_sequence(Dilate(0.9), VLOG, 200, threads=1)
    rel = float(np.max(np.abs(s.q / 0.9 ** s.js - 1.0)))
    c = classify(s)
    dt = time.perf_counter() - t0
    ok = rel <= 1e-5 and c.compact_evidence == "strong_yes" and dt < 60.0
    return CheckResult("9", "dilation compactness", ok,
                       f"j<= {s.j_max}: max rel err {rel:.1e}; compact {c.compact_evidence}; "
                       f"{dt:.1f}s")


@_timed
def check_10(fast=False):
    """v_theta^(1)/v_theta^(2) in [0.5, 1] for theta in {e, 3, 10}; cross-theta bands finite."""
    thetas = (math.e, 3.0, 10.0)
    lo, hi = math.inf, -math.inf
    for th in thetas:
        rep = equivalence_constants(LogWeight(1, th), LogWeight(2, th), 10_000)
        lo, hi = min(lo, rep.ratio_min), max(hi, rep.ratio_max)
    finite = True
    for a in thetas:
        for b in thetas:
            for k1 in (1, 2):
                for k2 in (1, 2):
                    rep = equivalence_constants(LogWeight(k1, a), LogWeight(k2, b), 10_000)
                    finite &= 0 < rep.ratio_min <= rep.ratio_max < math.inf
    ok = lo >= 0.5 and hi <= 1.0 and finite
    return CheckResult("10", "log-weight equivalence", ok,
                       f"ratio range [{lo:.6f}, {hi:.6f}]; cross bands finite: {finite}")


def interior_points(n=100, radius=0.9):
    """Deterministic points spread over ``|z| <= radius`` (golden-angle spiral)."""
    k = np.arange(n)
    r = radius * np.sqrt((k + 0.5) / n)
    ang = k * math.pi * (3.0 - math.sqrt(5.0))
    return r * np.exp(1j * ang)


def node_battery():
    return [
        Identity(),
        Constant(0.3 - 0.2j),
        Dilate(0.7 + 0.2j),
        Rotate(1.1),
        Mobius(0.4 + 0.3j),
        Power(5),
        Poly((0.1, 0.3 + 0.1j, -0.2, 0.05j)),
        Blaschke((0.5, -0.3 + 0.4j, 0.0)),
        Compose(Power(3), Mobius(0.3)),
        Compose(Blaschke((0.2j, 0.6)), Compose(Dilate(0.8), Rotate(0.4))),
    ]


def fd_derivative(phi, z, h=1e-6):
    return (phi.value(z + h) - phi.value(z - h)) / (2 * h)


@_timed
def check_11(fast=False):
    """Derivatives vs central differences (rel 1e-6); Mobius involution to 1e-12."""
    z = interior_points()
    worst = 0.0
    for phi in node_battery():
        exact = phi.deriv(z)
        fd = fd_derivative(phi, z)
        scale = np.maximum(np.abs(exact), 1e-300)
        nz = np.abs(exact) > 0
        err = np.abs(fd - exact)[nz] / scale[nz]
        if not np.all(nz):
            err = np.concatenate([err, np.abs(fd[~nz])])
        worst = max(worst, float(err.max()))
    inv = 0.0
    for a in (0.3, 0.5 - 0.4j, -0.9j):
        m = Mobius(a)
        inv = max(inv, float(np.max(np.abs(m.value(m.value(z)) - z))))
    ok = worst <= 1e-6 and inv <= 1e-12
    return CheckResult("11", "symbol algebra", ok,
                       f"max FD rel err {worst:.1e}; involution err {inv:.1e}")


@_timed
def check_12(fast=False):
    """Byte-identical quotient CSV for mobius:0.3,0.0 across thread counts."""
    from .cli import main

    outs = []
    for threads in ("1", "4"):
        buf = io.StringIO()
        with contextlib.redirect_stdout(buf):
            code = main(["quotients", "--symbol", "mobius:0.3,0.0", "--weight", "vlog",
                         "--j-max", "50", "--threads", threads])
        outs.append((code, buf.getvalue().encode()))
    same = outs[0] == outs[1]
    rows = outs[0][1].count(b"\n") - 1
    ok = same and outs[0][0] == 0 and rows == 50
    return CheckResult("12", "determinism", ok,
                       f"byte-identical across 1/4 threads: {same}; {rows} rows")


CHECKS = [check_1, check_2, check_3, check_4, check_5, check_6, check_7,
          check_8a, check_8b, check_9, check_10, check_11, check_12]


def run_all(fast=False, echo=print):
    results = []
    for chk in CHECKS:
        res = chk(fast)
        results.append(res)
        if echo:
            echo(res.line())
    return results
