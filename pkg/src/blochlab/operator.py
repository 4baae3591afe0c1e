"""Composition operators ``C_phi: f -> f o phi`` from the log-Bloch space.

Boundedness, compactness and the essential norm of ``C_phi`` into a weighted
Bloch space ``B^mu`` are all read off the quotient sequence

    q_j = ||phi**j||_mu / ||F_j||_log,

where ``F_j(z) = z**j``: ``sup q_j < inf`` iff bounded, ``q_j -> 0`` iff
compact, and ``limsup q_j`` is equivalent to the essential norm with constants
``1`` and ``(2L + 6 e**(L-1)) / L``.  A finite run only sees finitely many
``j``, so everything below is evidence and never a verdict.
"""

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, List, Optional

import numpy as np

from . import __version__
from ._grid import clustered_radii
from .errors import PreconditionError, SelfMapRefused
from .monomials import CONSTANTS, L, monomial_log_norm
from .seminorm import GridConfig, SupEstimate, sup_weighted_deriv, sup_weighted_deriv_radial
from .symbols import power_deriv_abs, validate_self_map
from .weights import VLOG

DENOMINATORS = ("exact_norm", "log_j_plus_1")

EVIDENCE = ("strong_yes", "inconclusive", "strong_no")


def default_threads():
    env = os.environ.get("BLOCHLAB_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


@dataclass(frozen=True)
class QuotientTerm:
    j: int
    q: float
    numerator: float
    denominator: float
    sup: SupEstimate


@dataclass(frozen=True)
class QuotientSeries:
    symbol_spec: str
    weight_spec: str
    denominator: str
    cfg: GridConfig
    terms: List[QuotientTerm]

    @property
    def j_max(self):
        return self.terms[-1].j if self.terms else 0

    @property
    def q(self):
        return np.array([t.q for t in self.terms])

    @property
    def js(self):
        return np.array([t.j for t in self.terms])

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["j", "q", "numerator", "denominator", "boundary_dominated", "diverged"])
        for t in self.terms:
            w.writerow([
                t.j, f"{t.q:.17g}", f"{t.numerator:.17g}", f"{t.denominator:.17g}",
                str(t.sup.boundary_dominated).lower(), str(t.sup.diverged).lower(),
            ])
        return buf.getvalue()

    def to_dict(self):
        return {
            "symbol_spec": self.symbol_spec,
            "weight_spec": self.weight_spec,
            "denominator": self.denominator,
            "cfg": self.cfg.to_dict(),
            "j_max": self.j_max,
            "terms": [
                {"j": t.j, "q": t.q, "numerator": t.numerator,
                 "denominator": t.denominator, "sup": t.sup.to_dict()}
                for t in self.terms
            ],
        }


def _check_symbol(phi, force):
    if phi.needs_validation:
        rep = validate_self_map(phi)
        if not rep.passed and not force:
            raise SelfMapRefused(
                f"{phi.spec} is not a self-map of the disk on the sample grid "
                f"(max |phi| = {rep.max_modulus:.6g}); pass force=True to override"
            )


def power_seminorm(phi, mu, j, cfg=None):
    """Engine estimate of ``||phi**j||_mu``.

    When ``|phi|`` and ``|phi'|`` depend only on ``|z|`` (dilations,
    rotations, powers) and ``mu`` is radial, the 1-D engine is used.
    """
    cfg = cfg or GridConfig()
    if phi.radial and mu.radial:
        def profile(r):
            return power_deriv_abs(phi, j, np.asarray(r) + 0j)
        return sup_weighted_deriv_radial(profile, mu, cfg)
    return sup_weighted_deriv(lambda z: power_deriv_abs(phi, j, z), mu, cfg)


def quotient_sequence(phi, mu, j_max, cfg=None, denominator="exact_norm",
                      force=False, threads=None):
    """``q_j`` for ``j = 1..j_max``.

    Terms are computed concurrently and merged in ``j`` order; the result does
    not depend on ``threads``.
    """
    if j_max < 1:
        raise PreconditionError("j_max must be at least 1")
    if denominator not in DENOMINATORS:
        raise ValueError(f"denominator must be one of {DENOMINATORS}")
    _check_symbol(phi, force)
    cfg = cfg or GridConfig()

    def term(j):
        est = power_seminorm(phi, mu, j, cfg)
        den = monomial_log_norm(j).norm if denominator == "exact_norm" else math.log(j + 1.0)
        return QuotientTerm(j=j, q=est.value / den, numerator=est.value, denominator=den, sup=est)

    js = range(1, int(j_max) + 1)
    n = threads or default_threads()
    if n <= 1:
        terms = [term(j) for j in js]
    else:
        with ThreadPoolExecutor(max_workers=n) as pool:
            terms = list(pool.map(term, js))
    return QuotientSeries(
        symbol_spec=phi.spec,
        weight_spec=mu.spec,
        denominator=denominator,
        cfg=cfg,
        terms=terms,
    )


# --- classification ----------------------------------------------------------


@dataclass(frozen=True)
class Policy:
    stabilization_slack: float = 0.05
    compact_threshold: float = 1e-3


@dataclass(frozen=True)
class Classification:
    bounded_evidence: str
    compact_evidence: str
    sup_q: float
    tail_max_q: float
    tail_trend: float
    notes: str
    symbol_spec: str = ""
    weight_spec: str = ""

    def to_dict(self):
        return dict(self.__dict__)


def _tail_count(n, fraction):
    return max(1, min(n, math.ceil(fraction * n)))


def _log_slope(js, qs):
    pos = qs > 0
    if pos.sum() < 2:
        return 0.0
    x, y = np.log(js[pos]), np.log(qs[pos])
    return float(np.polyfit(x, y, 1)[0])


def classify(series, policy=None):
    """Turn a quotient series into evidence enums.

    ``bounded`` is ``strong_yes`` when nothing diverged and the last quartile
    stays within ``1 + slack`` of the maximum over the earlier terms;
    ``strong_no`` when a term diverged or the tail still grows (log-log slope
    above ``slack`` and rising at ``j_max``).  ``compact`` is ``strong_yes``
    when the tail is below ``compact_threshold`` and decaying (or identically
    zero), ``strong_no`` when it is above the threshold with a flat trend or
    the operator looks unbounded.
    """
    policy = policy or Policy()
    terms = series.terms
    if len(terms) < 8:
        raise PreconditionError("classification needs at least 8 terms")
    js, qs = series.js.astype(float), series.q
    n_tail = _tail_count(len(terms), 0.25)
    head, tail = qs[:-n_tail], qs[-n_tail:]
    sup_q = float(qs.max())
    head_sup = float(head.max())
    tail_max = float(tail.max())
    trend = _log_slope(js[-n_tail:], tail)
    diverged = any(t.sup.diverged for t in terms)
    slack = policy.stabilization_slack

    rising = qs[-1] > qs[-2]
    if diverged or (trend > slack and rising):
        bounded = "strong_no"
    elif tail_max <= (1.0 + slack) * head_sup:
        bounded = "strong_yes"
    else:
        bounded = "inconclusive"

    if bounded == "strong_no":
        compact = "strong_no"
    elif tail_max <= policy.compact_threshold and (trend < 0 or tail_max == 0):
        compact = "strong_yes"
    elif tail_max > policy.compact_threshold and abs(trend) <= slack:
        compact = "strong_no"
    else:
        compact = "inconclusive"

    notes = (
        f"finite-j numerical evidence from j = 1..{series.j_max}, not a proof; "
        f"tail = last {n_tail} terms; denominator = {series.denominator}"
    )
    if any(t.sup.boundary_dominated for t in terms):
        notes += "; some maximizers sit at the truncation radius"
    return Classification(
        bounded_evidence=bounded,
        compact_evidence=compact,
        sup_q=sup_q,
        tail_max_q=tail_max,
        tail_trend=trend,
        notes=notes,
        symbol_spec=series.symbol_spec,
        weight_spec=series.weight_spec,
    )


# --- essential norm ----------------------------------------------------------


@dataclass(frozen=True)
class EssentialNormBand:
    E_est: float
    lower: float
    upper: float
    tail_fraction: float
    symbol_spec: str = ""
    weight_spec: str = ""

    @property
    def ratio(self):
        return self.upper / self.lower if self.lower > 0 else math.nan

    def to_dict(self):
        return dict(self.__dict__)


def essential_norm_band(series, tail_fraction=0.25, classification=None):
    """``[E, c E]`` with ``E`` the tail maximum of ``q_j`` and ``c = (2L + 6e^(L-1))/L``.

    The tail maximum stands in for ``limsup q_j``.
    """
    if not 0 < tail_fraction <= 1:
        raise ValueError("tail_fraction must lie in (0, 1]")
    if series.denominator != "exact_norm":
        raise PreconditionError("the essential-norm band needs the exact_norm denominator")
    if classification is not None and classification.bounded_evidence == "strong_no":
        raise PreconditionError("series does not look bounded; no essential-norm band")
    n_tail = _tail_count(len(series.terms), tail_fraction)
    tail = series.terms[-n_tail:]
    bad = [t.j for t in tail if t.sup.diverged]
    if bad:
        raise PreconditionError(f"diverged terms in the tail: j = {bad}")
    e = max(t.q for t in tail)
    return EssentialNormBand(
        E_est=e,
        lower=e,
        upper=CONSTANTS.c_upper_band * e,
        tail_fraction=tail_fraction,
        symbol_spec=series.symbol_spec,
        weight_spec=series.weight_spec,
    )


# --- annuli ------------------------------------------------------------------


@dataclass(frozen=True)
class AnnuliHistogram:
    counts: List[int]  # counts[j-1] = samples with r_{j-1} <= |phi(z)| < r_j
    overflow: int
    total: int

    def to_dict(self):
        return {"counts": list(self.counts), "overflow": self.overflow, "total": self.total}

    def to_csv(self):
        rows = ["j,count"] + [f"{j},{c}" for j, c in enumerate(self.counts, 1)]
        rows.append(f"overflow,{self.overflow}")
        return "\n".join(rows) + "\n"


def annulus_index(rho):
    """The ``j >= 1`` with ``r_{j-1} <= rho < r_j``."""
    rho = np.asarray(rho, dtype=float)
    # rho < r_j  <=>  j > L rho / (1 - rho)
    x = L * rho / (1.0 - rho)
    j = np.floor(x).astype(np.int64) + 1
    # guard the floor against rounding at the band edges
    j = np.where(rho >= j / (j + L), j + 1, j)
    jm1 = j - 1
    j = np.where((jm1 >= 1) & (rho < jm1 / (jm1 + L)), jm1, j)
    return j


def annuli_diagnostic(phi, j_max, samples=65536):
    """Histogram of a boundary-clustered disk sample over the sets ``A_j^phi``."""
    n_ang = max(8, int(round(math.sqrt(samples))))
    n_rad = max(2, -(-samples // n_ang))
    r = clustered_radii(n_rad - 1)
    ang = 2.0 * math.pi * np.arange(n_ang) / n_ang
    z = r[:, None] * np.exp(1j * ang)[None, :]
    idx = annulus_index(np.abs(phi.value(z))).ravel()
    over = int(np.sum(idx > j_max))
    counts = np.bincount(idx[idx <= j_max], minlength=j_max + 1)[1:]
    return AnnuliHistogram(counts=[int(c) for c in counts], overflow=over, total=int(idx.size))


# --- direct transfer check ---------------------------------------------------


@dataclass(frozen=True)
class TestFunction:
    """A holomorphic ``f`` given by its value and derivative on arrays."""

    name: str
    value: Callable
    deriv: Callable

    __test__ = False  # keep pytest from collecting this class


def monomial(j, scale=1.0):
    return TestFunction(
        f"{scale:g}*z^{j}",
        lambda z: scale * np.asarray(z) ** j,
        lambda z: scale * j * np.asarray(z) ** (j - 1) if j > 1 else scale * np.ones_like(z),
    )


def normalized_monomial(j):
    """``F_j / ||F_j||_log``."""
    return monomial(j, 1.0 / monomial_log_norm(j).norm)


def linear_combination(parts, name=None):
    """``sum c_k f_k`` for ``parts = [(c_k, f_k), ...]``."""
    parts = list(parts)
    label = name or " + ".join(f"{c:g}*({f.name})" for c, f in parts)
    return TestFunction(
        label,
        lambda z: sum(c * f.value(z) for c, f in parts),
        lambda z: sum(c * f.deriv(z) for c, f in parts),
    )


@dataclass(frozen=True)
class TransferRow:
    name: str
    image_seminorm: float
    log_bloch_norm: float
    ratio: float


@dataclass(frozen=True)
class TransferReport:
    rows: List[TransferRow]
    c_report: float
    finite: bool
    consistent: Optional[bool] = None

    def to_dict(self):
        return {
            "rows": [r.__dict__ for r in self.rows],
            "c_report": self.c_report,
            "finite": self.finite,
            "consistent": self.consistent,
        }


def direct_transfer_check(phi, mu, test_family, cfg=None, classification=None):
    """Empirical ``||f o phi||_mu / ||f||_{B^log}`` over a family of test functions.

    ``||f||_{B^log} = |f(0)| + ||f||_log`` with the semi-norm from the engine.
    ``c_report`` is the largest ratio; when ``classification`` says bounded
    ``strong_yes`` the report checks that it is finite.
    """
    cfg = cfg or GridConfig()
    rows = []
    for f in test_family:
        num = sup_weighted_deriv(lambda z: f.deriv(phi.value(z)) * phi.deriv(z), mu, cfg).value
        semi = sup_weighted_deriv(f.deriv, VLOG, cfg).value
        den = abs(complex(f.value(np.array([0j]))[0])) + semi
        rows.append(TransferRow(f.name, num, den, num / den if den > 0 else math.inf))
    c = max((r.ratio for r in rows), default=0.0)
    finite = bool(np.isfinite(c))
    consistent = None
    if classification is not None and classification.bounded_evidence == "strong_yes":
        consistent = finite
    return TransferReport(rows=rows, c_report=c, finite=finite, consistent=consistent)


def run_metadata(stamp=False):
    """Provenance block for reports; the timestamp is opt-in to keep output reproducible."""
    meta = {
        "tool": "blochlab",
        "version": __version__,
        "determinism": "no random sampling; identical inputs give identical output",
    }
    if stamp:
        import datetime

        meta["timestamp"] = datetime.datetime.now(datetime.timezone.utc).isoformat()
    return meta
