"""Holomorphic self-maps of the unit disk with exact derivatives.

Maps are immutable expression trees.  Each node evaluates itself and its
complex derivative on numpy arrays; :class:`Compose` applies the chain rule.

Spec grammar::

    id | const:<re>,<im> | dilate:<a>[,<im>] | rotate:<angle> | mobius:<re>,<im>
       | power:<n> | poly:<c0>,<c1>,... | blaschke:<re>,<im>;<re>,<im>;...
       | compose(<spec>,<spec>)

``compose(f,g)`` means ``f(g(z))``.
"""

import json
import math
import re
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ._grid import clustered_radii
from .errors import DomainError, SpecParseError

MAX_DEPTH = 32


class HoloMap:
    """Base class.  Subclasses define ``value``, ``deriv`` and ``spec``."""

    #: True when |phi(z)| and |phi'(z)| depend only on |z|
    radial = False
    #: True for node kinds that map the disk into itself by construction
    exact_self_map = True

    def __call__(self, z):
        return self.value(np.asarray(z, dtype=complex))

    @property
    def needs_validation(self):
        return not self.exact_self_map

    @property
    def depth(self):
        return 1

    def to_dict(self):
        raise NotImplementedError

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)

    def __str__(self):
        return self.spec


def _c(x):
    return [float(np.real(x)), float(np.imag(x))]


def _num(x):
    x = complex(x)
    if x.imag == 0:
        return repr(x.real)
    return f"{x.real!r},{x.imag!r}"


@dataclass(frozen=True)
class Identity(HoloMap):
    radial = True

    def value(self, z):
        return z

    def deriv(self, z):
        return np.ones_like(z)

    @property
    def spec(self):
        return "id"

    def to_dict(self):
        return {"kind": "id"}


@dataclass(frozen=True)
class Constant(HoloMap):
    c: complex = 0j
    radial = True

    def __post_init__(self):
        if abs(self.c) >= 1:
            raise DomainError(f"constant {self.c} is not inside the disk")

    def value(self, z):
        return np.full_like(z, self.c)

    def deriv(self, z):
        return np.zeros_like(z)

    @property
    def spec(self):
        return f"const:{self.c.real!r},{self.c.imag!r}"

    def to_dict(self):
        return {"kind": "const", "c": _c(self.c)}


@dataclass(frozen=True)
class Dilate(HoloMap):
    a: complex = 1.0
    radial = True

    def __post_init__(self):
        if abs(self.a) > 1:
            raise DomainError(f"dilation factor {self.a} has modulus above 1")

    def value(self, z):
        return self.a * z

    def deriv(self, z):
        return np.full_like(z, self.a)

    @property
    def spec(self):
        return f"dilate:{_num(self.a)}"

    def to_dict(self):
        return {"kind": "dilate", "a": _c(self.a)}


@dataclass(frozen=True)
class Rotate(HoloMap):
    angle: float = 0.0
    radial = True

    @property
    def _u(self):
        return complex(math.cos(self.angle), math.sin(self.angle))

    def value(self, z):
        return self._u * z

    def deriv(self, z):
        return np.full_like(z, self._u)

    @property
    def spec(self):
        return f"rotate:{self.angle!r}"

    def to_dict(self):
        return {"kind": "rotate", "angle": self.angle}


@dataclass(frozen=True)
class Mobius(HoloMap):
    """The disk automorphism ``z -> (a - z)/(1 - conj(a) z)``."""

    a: complex = 0j

    def __post_init__(self):
        if abs(self.a) >= 1:
            raise DomainError(f"Mobius parameter {self.a} is not inside the disk")

    @property
    def radial(self):
        return self.a == 0

    def value(self, z):
        return (self.a - z) / (1.0 - np.conj(self.a) * z)

    def deriv(self, z):
        return (abs(self.a) ** 2 - 1.0) / (1.0 - np.conj(self.a) * z) ** 2

    @property
    def spec(self):
        return f"mobius:{self.a.real!r},{self.a.imag!r}"

    def to_dict(self):
        return {"kind": "mobius", "a": _c(self.a)}


@dataclass(frozen=True)
class Power(HoloMap):
    n: int = 1
    radial = True

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise DomainError(f"power must be a positive integer, got {self.n}")

    def value(self, z):
        return z**self.n

    def deriv(self, z):
        return self.n * z ** (self.n - 1)

    @property
    def spec(self):
        return f"power:{self.n}"

    def to_dict(self):
        return {"kind": "power", "n": self.n}


@dataclass(frozen=True)
class Poly(HoloMap):
    """``c0 + c1 z + c2 z**2 + ...``; not a self-map in general."""

    coeffs: Tuple[complex, ...] = (0j,)
    exact_self_map = False

    def value(self, z):
        out = np.zeros_like(z)
        for c in reversed(self.coeffs):
            out = out * z + c
        return out

    def deriv(self, z):
        out = np.zeros_like(z)
        n = len(self.coeffs)
        for k in range(n - 1, 0, -1):
            out = out * z + k * self.coeffs[k]
        return out

    @property
    def spec(self):
        return "poly:" + ",".join(_poly_num(c) for c in self.coeffs)

    def to_dict(self):
        return {"kind": "poly", "coeffs": [_c(c) for c in self.coeffs]}


def _poly_num(c):
    c = complex(c)
    if c.imag == 0:
        return repr(c.real)
    return repr(c).strip("()")


@dataclass(frozen=True)
class Blaschke(HoloMap):
    """Finite Blaschke product ``prod_k (a_k - z)/(1 - conj(a_k) z)``."""

    zeros: Tuple[complex, ...] = ()

    def __post_init__(self):
        if not self.zeros:
            raise DomainError("a Blaschke product needs at least one zero")
        for a in self.zeros:
            if abs(a) >= 1:
                raise DomainError(f"Blaschke zero {a} is not inside the disk")

    @property
    def radial(self):
        return all(a == 0 for a in self.zeros)

    def _factors(self, z):
        return [Mobius(a) for a in self.zeros]

    def value(self, z):
        out = np.ones_like(z)
        for f in self._factors(z):
            out = out * f.value(z)
        return out

    def deriv(self, z):
        # product rule with prefix/suffix products, safe at the zeros
        facs = self._factors(z)
        vals = [f.value(z) for f in facs]
        n = len(vals)
        prefix = [np.ones_like(z)]
        for v in vals:
            prefix.append(prefix[-1] * v)
        suffix = np.ones_like(z)
        out = np.zeros_like(z)
        for k in range(n - 1, -1, -1):
            out = out + prefix[k] * facs[k].deriv(z) * suffix
            suffix = suffix * vals[k]
        return out

    @property
    def spec(self):
        return "blaschke:" + ";".join(f"{a.real!r},{a.imag!r}" for a in self.zeros)

    def to_dict(self):
        return {"kind": "blaschke", "zeros": [_c(a) for a in self.zeros]}


@dataclass(frozen=True)
class Compose(HoloMap):
    """``outer(inner(z))``."""

    outer: HoloMap
    inner: HoloMap

    def __post_init__(self):
        if self.depth > MAX_DEPTH:
            raise DomainError(f"composition deeper than {MAX_DEPTH}")

    @property
    def depth(self):
        return 1 + max(self.outer.depth, self.inner.depth)

    @property
    def radial(self):
        return self.outer.radial and self.inner.radial

    @property
    def exact_self_map(self):
        return self.outer.exact_self_map and self.inner.exact_self_map

    def value(self, z):
        return self.outer.value(self.inner.value(z))

    def deriv(self, z):
        w = self.inner.value(z)
        return self.outer.deriv(w) * self.inner.deriv(z)

    @property
    def spec(self):
        return f"compose({self.outer.spec},{self.inner.spec})"

    def to_dict(self):
        return {"kind": "compose", "outer": self.outer.to_dict(), "inner": self.inner.to_dict()}


# --- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(?P<name>[a-z]+)|(?P<num>[-+]?[0-9.][0-9.eE+\-]*j?)|(?P<punct>[:,;()]))")


class _Parser:
    def __init__(self, text):
        self.text = text
        self.toks = []
        pos = 0
        while pos < len(text):
            if text[pos:].strip() == "":
                break
            m = _TOKEN.match(text, pos)
            if not m or m.end() == pos:
                raise SpecParseError("unexpected character", text, pos)
            kind = m.lastgroup
            self.toks.append((kind, m.group(kind), m.start(kind)))
            pos = m.end()
        self.i = 0

    def peek(self):
        return self.toks[self.i] if self.i < len(self.toks) else (None, None, len(self.text))

    def take(self, kind=None, value=None):
        tok = self.peek()
        if tok[0] is None or (kind and tok[0] != kind) or (value and tok[1] != value):
            want = value or kind or "token"
            raise SpecParseError(f"expected {want!r}", self.text, tok[2])
        self.i += 1
        return tok

    def number(self, conv=float):
        _, txt, pos = self.take("num")
        try:
            return conv(txt)
        except ValueError:
            raise SpecParseError("bad number", self.text, pos) from None

    def numbers(self, conv=float, sep=","):
        """Numbers separated by ``sep``; stops before a separator not followed by a number."""
        out = [self.number(conv)]
        while True:
            kind, val, _ = self.peek()
            nxt = self.toks[self.i + 1] if self.i + 1 < len(self.toks) else (None,)
            if kind == "punct" and val == sep and nxt[0] == "num":
                self.i += 1
                out.append(self.number(conv))
            else:
                return out

    def parse(self, depth=1):
        if depth > MAX_DEPTH:
            raise SpecParseError(f"composition deeper than {MAX_DEPTH}", self.text, self.peek()[2])
        _, name, pos = self.take("name")
        if name == "id":
            return Identity()
        if name == "compose":
            self.take("punct", "(")
            outer = self.parse(depth + 1)
            self.take("punct", ",")
            inner = self.parse(depth + 1)
            self.take("punct", ")")
            return Compose(outer, inner)
        self.take("punct", ":")
        if name == "const":
            re_, im = self._pair()
            return Constant(complex(re_, im))
        if name == "dilate":
            vals = self.numbers()
            if len(vals) > 2:
                raise SpecParseError("dilate takes <re>[,<im>]", self.text, pos)
            return Dilate(complex(*vals))
        if name == "rotate":
            return Rotate(self.number())
        if name == "mobius":
            re_, im = self._pair()
            return Mobius(complex(re_, im))
        if name == "power":
            _, txt, npos = self.take("num")
            if not txt.isdigit():
                raise SpecParseError("power needs a positive integer", self.text, npos)
            return Power(int(txt))
        if name == "poly":
            return Poly(tuple(self.numbers(complex)))
        if name == "blaschke":
            zeros = [complex(*self._pair())]
            while self.peek()[1] == ";":
                self.take("punct", ";")
                zeros.append(complex(*self._pair()))
            return Blaschke(tuple(zeros))
        raise SpecParseError(f"unknown symbol {name!r}", self.text, pos)

    def _pair(self):
        a = self.number()
        self.take("punct", ",")
        return a, self.number()


def parse_symbol_spec(text):
    """Parse a symbol spec into a :class:`HoloMap` tree."""
    p = _Parser(text)
    out = p.parse()
    kind, _, pos = p.peek()
    if kind is not None:
        raise SpecParseError("trailing input", text, pos)
    return out


# --- evaluation --------------------------------------------------------------


def _check_disk(z):
    z = np.asarray(z, dtype=complex)
    if np.any(np.abs(z) >= 1):
        raise DomainError("points must lie in the open unit disk")
    return z


def _unwrap(x):
    return complex(x) if np.ndim(x) == 0 else x


def evaluate(phi, z):
    return _unwrap(phi.value(_check_disk(z)))


def derivative(phi, z):
    return _unwrap(phi.deriv(_check_disk(z)))


def power_deriv(phi, j, z):
    """``(phi**j)'(z) = j phi(z)**(j-1) phi'(z)``, powers taken in log form."""
    z = _check_disk(z)
    return _unwrap(_power_deriv(phi, j, z))


def _power_deriv(phi, j, z):
    w = phi.value(z)
    dw = phi.deriv(z)
    if j == 1:
        return dw
    mod = power_modulus(np.abs(w), j - 1)
    phase = np.exp(1j * (j - 1) * np.angle(w))
    return j * mod * phase * dw


def power_modulus(rho, n):
    """``rho**n`` as ``exp(n log rho)``; 0 where ``rho == 0``."""
    rho = np.asarray(rho, dtype=float)
    with np.errstate(divide="ignore"):
        return np.where(rho > 0, np.exp(n * np.log(np.where(rho > 0, rho, 1.0))), 0.0 if n else 1.0)


def power_deriv_abs(phi, j, z):
    """``|(phi**j)'(z)|`` without forming the phase."""
    w = phi.value(z)
    dw = np.abs(phi.deriv(z))
    if j == 1:
        return dw
    return j * power_modulus(np.abs(w), j - 1) * dw


@dataclass(frozen=True)
class SelfMapReport:
    max_modulus: float
    arg_max: complex
    passed: bool
    exact_kind: bool

    def to_dict(self):
        return {
            "max_modulus": self.max_modulus,
            "arg_max": _c(self.arg_max),
            "pass": self.passed,
            "exact_kind": self.exact_kind,
        }


def validate_self_map(phi, samples=4096):
    """Sample ``|phi|`` on a boundary-clustered polar grid.

    Passes when the sampled maximum is at most ``1 - 1e-12`` or the tree is
    built only from node kinds that are self-maps by construction.  A failing
    map is reported, not raised.
    """
    if samples < 1000:
        raise ValueError("validation needs at least 1000 samples")
    n_ang = max(8, int(round(math.sqrt(samples))))
    n_rad = max(2, -(-samples // n_ang))
    r = clustered_radii(n_rad - 1)
    ang = 2 * math.pi * np.arange(n_ang) / n_ang
    z = r[:, None] * np.exp(1j * ang)[None, :]
    mod = np.abs(phi.value(z))
    i = np.unravel_index(int(np.argmax(mod)), mod.shape)
    mx = float(mod[i])
    exact = phi.exact_self_map
    return SelfMapReport(
        max_modulus=mx,
        arg_max=complex(z[i]),
        passed=bool(exact or mx <= 1.0 - 1e-12),
        exact_kind=exact,
    )
