"""Weights on the unit disk and numerical equivalence constants between them.

Built-in weights are radial, so they are stored as profiles of the radius
``r = |z|``:

* ``AlphaWeight(alpha)``: ``(1 - r**2)**alpha``; ``alpha = 1`` is the classical
  Bloch weight.
* ``LogWeight(k, theta)``: ``(1 - r**k) * log(theta / (1 - r**k))``;
  ``LogWeight(1, 3)`` is the log-Bloch weight ``v_log``.
* ``CustomWeight(profile)``: any positive function, radial or not.
"""

import json
import math
import re
from dataclasses import dataclass, field, asdict
from typing import Callable, Optional

import numpy as np

from ._grid import clustered_radii
from .errors import DomainError, PreconditionError, SpecParseError, UnsupportedError

# Above this radius ``1 - r**k`` is formed as ``-expm1(k*log1p(r - 1))``.
_SAFE_RADIUS = 1.0 - 1e-8


def _one_minus_power(r, k):
    r = np.asarray(r, dtype=float)
    naive = 1.0 - r**k
    near = r > _SAFE_RADIUS
    if np.any(near):
        with np.errstate(divide="ignore"):
            safe = -np.expm1(k * np.log1p(r - 1.0))
        naive = np.where(near, safe, naive)
    return naive


def log_profile(t, theta):
    """``t * log(theta / t)``, extended by 0 at ``t = 0``."""
    t = np.asarray(t, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        out = t * (math.log(theta) - np.log(t))
    return np.where(t > 0, out, 0.0)


class Weight:
    """A strictly positive bounded weight on the disk.

    Subclasses implement ``_profile(r)`` (radial) or override ``at(z)``.
    Weights are immutable and safe to share between threads.
    """

    radial = True

    def __call__(self, r):
        return eval_weight(self, r)

    def _profile(self, r):
        raise NotImplementedError

    def at(self, z):
        """Evaluate at complex points ``z`` (no domain check)."""
        return self._profile(np.abs(z))

    @property
    def spec(self):
        raise NotImplementedError

    def __str__(self):
        return self.spec


@dataclass(frozen=True, eq=True)
class AlphaWeight(Weight):
    alpha: float = 1.0

    def __post_init__(self):
        if not self.alpha >= 0:
            raise DomainError(f"alpha must be nonnegative, got {self.alpha}")

    def _profile(self, r):
        r = np.asarray(r, dtype=float)
        # (1 - r)(1 + r) keeps relative accuracy near r = 1
        return ((1.0 - r) * (1.0 + r)) ** self.alpha

    @property
    def spec(self):
        return f"alpha:{self.alpha:g}"


@dataclass(frozen=True, eq=True)
class LogWeight(Weight):
    k: int = 1
    theta: float = 3.0

    def __post_init__(self):
        if self.k not in (1, 2):
            raise DomainError(f"k must be 1 or 2, got {self.k}")
        if not self.theta > 1:
            raise DomainError(f"theta must exceed 1, got {self.theta}")

    def _profile(self, r):
        return log_profile(_one_minus_power(r, self.k), self.theta)

    @property
    def spec(self):
        return f"logk:{self.k},{self.theta!r}"


@dataclass(frozen=True)
class CustomWeight(Weight):
    """User-supplied weight.

    With ``radial=True`` the function receives radii; otherwise it receives
    complex points and the weight can only be used by the seminorm engine.
    """

    func: Callable = field(compare=False)
    radial: bool = True
    name: str = "custom"

    def _profile(self, r):
        if not self.radial:
            raise UnsupportedError("non-radial weight has no radial profile")
        return np.asarray(self.func(np.asarray(r, dtype=float)), dtype=float)

    def at(self, z):
        if self.radial:
            return self._profile(np.abs(z))
        return np.asarray(self.func(np.asarray(z, dtype=complex)), dtype=float)

    @property
    def spec(self):
        return self.name


VLOG = LogWeight(1, 3.0)
CLASSIC = AlphaWeight(1.0)

_NUM = r"[-+]?(?:\d+\.?\d*|\.\d+)(?:[eE][-+]?\d+)?"


def parse_weight_spec(text):
    """Parse ``alpha:<a>``, ``logk:<k>,<theta>``, ``vlog`` or ``classic``.

    >>> parse_weight_spec("vlog")
    LogWeight(k=1, theta=3.0)
    """
    s = text.strip()
    if s == "vlog":
        return VLOG
    if s == "classic":
        return CLASSIC
    head, sep, rest = s.partition(":")
    if not sep:
        raise SpecParseError("unknown weight", s, 0)
    offset = len(head) + 1
    if head == "alpha":
        if not re.fullmatch(_NUM, rest):
            raise SpecParseError("bad alpha value", s, offset)
        return AlphaWeight(float(rest))
    if head == "logk":
        parts = rest.split(",")
        if len(parts) != 2:
            raise SpecParseError("logk expects <k>,<theta>", s, offset)
        k_txt, th_txt = parts
        if not re.fullmatch(r"\d+", k_txt):
            raise SpecParseError("bad k", s, offset)
        if not re.fullmatch(_NUM, th_txt):
            raise SpecParseError("bad theta", s, offset + len(k_txt) + 1)
        theta = float(th_txt)
        if theta <= 1:
            raise DomainError(f"theta must exceed 1, got {theta}")
        return LogWeight(int(k_txt), theta)
    raise SpecParseError("unknown weight", s, 0)


def eval_weight(w, r):
    """Evaluate a radial weight at radius ``r`` (scalar or array) in ``[0, 1)``."""
    if not w.radial:
        raise UnsupportedError("eval_weight needs a radial weight; use Weight.at(z)")
    arr = np.asarray(r, dtype=float)
    if np.any(~(arr >= 0)) or np.any(arr >= 1):
        raise DomainError("radius must lie in [0, 1)")
    out = w._profile(arr)
    return float(out) if np.ndim(out) == 0 else out


@dataclass(frozen=True)
class EquivalenceReport:
    ratio_min: float
    ratio_max: float
    argmin_r: float
    argmax_r: float
    grid_size: int

    def to_json(self, **extra):
        return json.dumps({**asdict(self), **extra}, indent=2, sort_keys=True)


def equivalence_constants(w1, w2, grid_size=10_000):
    """Min and max of ``w1/w2`` over the boundary-clustered radius grid.

    The grid is ``r_i = 1 - 2**(-14 i / grid_size)``, ``i = 0..grid_size``.
    The band holds on that grid only; it is not a proof of uniform
    equivalence.
    """
    if not (w1.radial and w2.radial):
        raise UnsupportedError("equivalence constants need radial weights")
    if grid_size < 2:
        raise PreconditionError("grid_size must be at least 2")
    r = clustered_radii(grid_size)
    ratio = w1._profile(r) / w2._profile(r)
    i_min, i_max = int(np.argmin(ratio)), int(np.argmax(ratio))
    return EquivalenceReport(
        ratio_min=float(ratio[i_min]),
        ratio_max=float(ratio[i_max]),
        argmin_r=float(r[i_min]),
        argmax_r=float(r[i_max]),
        grid_size=int(grid_size),
    )


@dataclass(frozen=True)
class SquareCheck:
    holds: bool
    min_slack: float
    argmin_t: float


def check_square_equivalence(theta, grid_size=10_000, atol=1e-14):
    """Check ``mu(1 - t**2)/2 <= mu(1 - t) <= mu(1 - t**2)`` for ``mu = mu_theta``.

    ``mu_theta(x) = x log(theta/x)``; ``t`` runs over the clustered grid in
    ``[0, 1)``.  ``min_slack`` is the smallest of the two gaps; it is 0 at
    ``t = 0`` where the right inequality is an equality.
    """
    if theta < math.e:
        raise PreconditionError(
            f"theta = {theta} < e: x log(theta/x) is not increasing on (0, 1]"
        )
    t = clustered_radii(grid_size)
    one_minus_t = 1.0 - t
    one_minus_t2 = one_minus_t * (1.0 + t)
    mid = log_profile(one_minus_t, theta)
    top = log_profile(one_minus_t2, theta)
    slack = np.minimum(mid - 0.5 * top, top - mid)
    scale = np.maximum(top, 1e-300)
    i = int(np.argmin(slack))
    holds = bool(np.all(slack >= -atol * scale))
    return SquareCheck(holds=holds, min_slack=float(slack[i]), argmin_t=float(t[i]))
