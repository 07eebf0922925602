"""Exact matrix groups over Q together with their diagonal subgroup H.

Five families are supported.  Each is a frozen dataclass; elements are
``GroupElement`` values holding the family and a canonical data tuple, so
element equality is plain tuple equality of reduced fractions.

``TwoByTwo(n)``
    ``[[f, x], [0, 1]]`` with ``f`` in P_n and ``x`` in Q.
``ThreeByThree(n)``
    ``[[1, x, y], [0, f, 0], [0, 0, g]]`` with ``f`` in P_n, ``g`` in P_inf.
``InfiniteUT(S)``
    infinite upper triangular matrices with first row ``(1, x_1, x_2, ...)``
    and diagonal ``f_j 2**(n_j k)``; the exponents ``n_j`` run through ``S``
    round-robin.  Only finitely many ``x_j`` and ``f_j != 1`` are stored.
``Product(factors)``
    direct product, coordinates prefixed ``"1."``, ``"2."``, ...
``Cyclic()``
    the integers, G = H; it has no nontrivial double cosets.

Enumeration order and the height used to bound balls are conventions of
this package: off-diagonal ``x`` has height ``max(|num|, den)`` (0 for 0),
a diagonal parameter ``f = ±(p/q) 2**e`` with ``p, q`` odd has height
``max(p, q, |e|)`` (0 for 1), and the shared exponent ``k`` has height
``|k|``.
"""

from __future__ import annotations

import functools
import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import ClassVar, Iterator

from .errors import DomainError, RecipeError, StructuralError
from .extnat import INF, ExtNat, check, fmt, parse

Rational = Fraction


def rational(v) -> Fraction:
    if isinstance(v, Fraction):
        return v
    if isinstance(v, float):
        raise TypeError("floats are not exact; pass an int, Fraction or 'p/q' string")
    return Fraction(v)


def _v2_int(m: int) -> int:
    m = abs(m)
    return (m & -m).bit_length() - 1


def v2(r) -> int:
    """2-adic valuation of a nonzero rational."""
    r = rational(r)
    if r == 0:
        raise DomainError("v2(0) is undefined")
    return _v2_int(r.numerator) - _v2_int(r.denominator)


def odd_part(r) -> Fraction:
    """``r / 2**v2(r)``; sign is kept."""
    r = rational(r)
    return r / Fraction(2) ** v2(r)


def offdiag_height(x: Fraction) -> int:
    if x == 0:
        return 0
    return max(abs(x.numerator), x.denominator)


def diag_height(f: Fraction) -> int:
    if f == 1:
        return 0
    o = odd_part(f)
    return max(abs(o.numerator), o.denominator, abs(v2(f)))


def _offdiag_values(height: int) -> list[Fraction]:
    vals = {Fraction(0)}
    for p in range(1, height + 1):
        for q in range(1, height + 1):
            if gcd(p, q) == 1:
                vals.add(Fraction(p, q))
                vals.add(Fraction(-p, q))
    return sorted(vals, key=lambda v: (offdiag_height(v), abs(v), v))


@dataclass(frozen=True)
class PnSpec:
    """The multiplicative group P_n = {(p/q) 2**(n j) : p, q odd}; P_inf has v2 = 0."""

    n: ExtNat

    def __post_init__(self):
        check(self.n)

    def __contains__(self, f) -> bool:
        f = rational(f)
        if f == 0:
            return False
        e = v2(f)
        if self.n == INF:
            return e == 0
        return e % self.n == 0

    @property
    def label(self) -> str:
        return "Pinf" if self.n == INF else f"P{self.n}"

    def values(self, height: int) -> list[Fraction]:
        """All members of height at most ``height``, identity first."""
        vals = {Fraction(1)}
        odds = range(1, height + 1, 2)
        for p in odds:
            for q in odds:
                if gcd(p, q) != 1:
                    continue
                for e in range(-height, height + 1):
                    if e not in self._exponents():
                        continue
                    for s in (1, -1):
                        vals.add(s * Fraction(p, q) * Fraction(2) ** e)
        vals = {v for v in vals if diag_height(v) <= height}
        return sorted(vals, key=lambda v: (diag_height(v), abs(v), v))

    def _exponents(self):
        return _Multiples(0 if self.n == INF else self.n)


class _Multiples:
    def __init__(self, n: int):
        self.n = n

    def __contains__(self, e: int) -> bool:
        return e == 0 if self.n == 0 else e % self.n == 0


# -- coordinates of the diagonal subgroup ------------------------------------


def _sparse_mul(a: tuple, b: tuple) -> tuple:
    d = dict(a)
    for j, f in b:
        v = d.get(j, Fraction(1)) * f
        if v == 1:
            d.pop(j, None)
        else:
            d[j] = v
    return tuple(sorted(d.items()))


def _sparse_inv(a: tuple) -> tuple:
    return tuple((j, 1 / f) for j, f in a)


@dataclass(frozen=True)
class CoordType:
    """The group in which one diagonal coordinate of H lives.

    ``P``    -- P_n (n may be inf): torsion {±1}, discrete part 2**(n Z) if n finite
    ``Z``    -- the integers (the shared exponent k)
    ``Psum`` -- a restricted direct sum of countably many copies of P_inf
    """

    kind: str
    n: ExtNat = INF

    def __post_init__(self):
        if self.kind not in ("P", "Z", "Psum"):
            raise ValueError(f"unknown coordinate kind {self.kind!r}")

    @property
    def label(self) -> str:
        if self.kind == "P":
            return PnSpec(self.n).label
        return self.kind

    @classmethod
    def parse(cls, label: str) -> "CoordType":
        if label in ("Z", "Psum"):
            return cls(label)
        if label.startswith("P"):
            return cls("P", parse(label[1:]))
        raise ValueError(f"unknown coordinate type {label!r}")

    @property
    def discrete(self) -> bool:
        """Whether the group has a Z summand that strides can cut down."""
        return self.kind == "Z" or (self.kind == "P" and self.n != INF)

    @property
    def torsion_order(self) -> ExtNat:
        return {"P": 2, "Z": 1, "Psum": INF}[self.kind]

    def identity(self):
        return {"P": Fraction(1), "Z": 0, "Psum": ()}[self.kind]

    def mul(self, a, b):
        if self.kind == "P":
            return a * b
        if self.kind == "Z":
            return a + b
        return _sparse_mul(a, b)

    def inv(self, a):
        if self.kind == "P":
            return 1 / a
        if self.kind == "Z":
            return -a
        return _sparse_inv(a)

    def is_identity(self, a) -> bool:
        return a == self.identity()

    def is_torsion(self, a) -> bool:
        if self.kind == "P":
            return a in (1, -1)
        if self.kind == "Z":
            return a == 0
        return all(f in (1, -1) for _, f in a)

    def disc(self, a) -> int:
        """Image of ``a`` in the discrete Z summand (0 if there is none)."""
        if self.kind == "Z":
            return a
        if self.kind == "P" and self.n != INF:
            return v2(a) // self.n
        return 0

    def contains(self, a) -> bool:
        if self.kind == "P":
            return a in PnSpec(self.n)
        if self.kind == "Z":
            return isinstance(a, int)
        return all(j >= 1 and f != 1 and f in PnSpec(INF) for j, f in a)


# -- elements ----------------------------------------------------------------


@dataclass(frozen=True)
class GroupElement:
    family: "GroupFamily"
    data: tuple

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return multiply(self, other)

    def inverse(self) -> "GroupElement":
        return invert(self)

    def __pow__(self, k: int) -> "GroupElement":
        return power(self, k)

    @property
    def in_H(self) -> bool:
        return self.family._in_H(self.data)

    def __repr__(self) -> str:
        return f"{self.family.name}{self.family._format(self.data)}"


class GroupFamily:
    """Base class; subclasses are frozen dataclasses implementing the ``_``-hooks."""

    kind: ClassVar[str] = ""

    @property
    def name(self) -> str:
        raise NotImplementedError

    def identity(self) -> GroupElement:
        return GroupElement(self, self._identity())

    def coordinates(self) -> tuple[tuple[str, CoordType], ...]:
        raise NotImplementedError

    def wrap(self, data: tuple) -> GroupElement:
        self._check(data)
        return GroupElement(self, data)

    def descriptor(self) -> dict:
        raise NotImplementedError

    def __str__(self) -> str:
        return self.name


def _fr_tuple(d) -> tuple:
    if d is None:
        return ()
    if isinstance(d, dict):
        d = d.items()
    return tuple(sorted((int(j), rational(v)) for j, v in d))


@dataclass(frozen=True)
class TwoByTwo(GroupFamily):
    """``[[f, x], [0, 1]]``, f in P_n, x in Q."""

    n: ExtNat
    kind: ClassVar[str] = "two_by_two"

    def __post_init__(self):
        check(self.n)

    @property
    def name(self) -> str:
        return f"TwoByTwo({fmt(self.n)})"

    def element(self, f=1, x=0) -> GroupElement:
        return self.wrap((rational(f), rational(x)))

    def _check(self, data):
        f, x = data
        if f not in PnSpec(self.n):
            raise DomainError(f"{f} is not in {PnSpec(self.n).label}")

    def _identity(self):
        return (Fraction(1), Fraction(0))

    def _mul(self, a, b):
        f1, x1 = a
        f2, x2 = b
        return (f1 * f2, f1 * x2 + x1)

    def _inv(self, a):
        f, x = a
        return (1 / f, -x / f)

    def _in_H(self, a) -> bool:
        return a[1] == 0

    def coordinates(self):
        return (("f", CoordType("P", self.n)),)

    def _h_coords(self, a) -> dict:
        return {"f": a[0]}

    def _from_h_coords(self, d):
        return (rational(d["f"]), Fraction(0))

    def _ball(self, height):
        for f, x in itertools.product(PnSpec(self.n).values(height), _offdiag_values(height)):
            yield (f, x)

    def _h_ball(self, height):
        for f in PnSpec(self.n).values(height):
            yield (f, Fraction(0))

    def _height(self, a) -> int:
        return max(diag_height(a[0]), offdiag_height(a[1]))

    def _matrix(self, a):
        f, x = a
        return [[f, x], [Fraction(0), Fraction(1)]]

    def _format(self, a) -> str:
        return f"(f={a[0]}, x={a[1]})"

    def descriptor(self) -> dict:
        return {"family": self.kind, "n": fmt(self.n) if self.n == INF else self.n}


@dataclass(frozen=True)
class ThreeByThree(GroupFamily):
    """``[[1, x, y], [0, f, 0], [0, 0, g]]``, f in P_n, g in P_inf."""

    n: ExtNat
    kind: ClassVar[str] = "three_by_three"

    def __post_init__(self):
        check(self.n)

    @property
    def name(self) -> str:
        return f"ThreeByThree({fmt(self.n)})"

    def element(self, x=0, y=0, f=1, g=1) -> GroupElement:
        return self.wrap((rational(x), rational(y), rational(f), rational(g)))

    def _check(self, data):
        x, y, f, g = data
        if f not in PnSpec(self.n):
            raise DomainError(f"f={f} is not in {PnSpec(self.n).label}")
        if g not in PnSpec(INF):
            raise DomainError(f"g={g} is not in Pinf")

    def _identity(self):
        return (Fraction(0), Fraction(0), Fraction(1), Fraction(1))

    def _mul(self, a, b):
        x1, y1, f1, g1 = a
        x2, y2, f2, g2 = b
        return (x2 + x1 * f2, y2 + y1 * g2, f1 * f2, g1 * g2)

    def _inv(self, a):
        x, y, f, g = a
        return (-x / f, -y / g, 1 / f, 1 / g)

    def _in_H(self, a) -> bool:
        return a[0] == 0 and a[1] == 0

    def coordinates(self):
        return (("f", CoordType("P", self.n)), ("g", CoordType("P", INF)))

    def _h_coords(self, a) -> dict:
        return {"f": a[2], "g": a[3]}

    def _from_h_coords(self, d):
        return (Fraction(0), Fraction(0), rational(d["f"]), rational(d["g"]))

    def _ball(self, height):
        off = _offdiag_values(height)
        for x, y, f, g in itertools.product(
            off, off, PnSpec(self.n).values(height), PnSpec(INF).values(height)
        ):
            yield (x, y, f, g)

    def _h_ball(self, height):
        z = Fraction(0)
        for f, g in itertools.product(PnSpec(self.n).values(height), PnSpec(INF).values(height)):
            yield (z, z, f, g)

    def _height(self, a) -> int:
        x, y, f, g = a
        return max(offdiag_height(x), offdiag_height(y), diag_height(f), diag_height(g))

    def _matrix(self, a):
        x, y, f, g = a
        z, one = Fraction(0), Fraction(1)
        return [[one, x, y], [z, f, z], [z, z, g]]

    def _format(self, a) -> str:
        return "(x={}, y={}, f={}, g={})".format(*a)

    def descriptor(self) -> dict:
        return {"family": self.kind, "n": fmt(self.n) if self.n == INF else self.n}


@dataclass(frozen=True)
class InfiniteUT(GroupFamily):
    """Infinite upper triangular group whose diagonal exponents cycle through S.

    Position ``j >= 1`` carries exponent ``n_j = S[(j - 1) % |S|]`` (S sorted),
    so every member of S recurs infinitely often.  ``window`` is the number
    of leading positions used for enumeration and for the coordinate model
    of H; positions beyond it are lumped into the single ``tail`` coordinate.
    """

    S: tuple
    window: int = 0
    kind: ClassVar[str] = "infinite_ut"

    def __post_init__(self):
        s = tuple(sorted(set(int(v) for v in self.S)))
        if not s:
            raise DomainError("InfiniteUT needs a nonempty S")
        if s[0] < 1:
            raise DomainError("S must be a subset of the positive integers")
        object.__setattr__(self, "S", s)
        if not self.window:
            object.__setattr__(self, "window", max(2, len(s)))
        if self.window < 1:
            raise DomainError("window must be positive")

    @property
    def name(self) -> str:
        return "InfiniteUT({" + ", ".join(map(str, self.S)) + f"}}, w={self.window})"

    def exponent(self, j: int) -> int:
        if j < 1:
            raise DomainError("positions start at 1")
        return self.S[(j - 1) % len(self.S)]

    def element(self, k: int = 0, x=None, f=None) -> GroupElement:
        xs = tuple((j, v) for j, v in _fr_tuple(x) if v != 0)
        fs = tuple((j, v) for j, v in _fr_tuple(f) if v != 1)
        return self.wrap((int(k), xs, fs))

    def _check(self, data):
        k, xs, fs = data
        for j, v in xs + fs:
            if j < 1:
                raise DomainError("positions start at 1")
        for j, f in fs:
            if f not in PnSpec(INF):
                raise DomainError(f"f_{j}={f} is not in Pinf")

    def diagonal_entry(self, data, j: int) -> Fraction:
        k, _, fs = data
        return dict(fs).get(j, Fraction(1)) * Fraction(2) ** (self.exponent(j) * k)

    def _identity(self):
        return (0, (), ())

    def _mul(self, a, b):
        k1, x1, f1 = a
        k2, x2, f2 = b
        xs = dict(x2)
        for j, v in x1:
            xs[j] = xs.get(j, Fraction(0)) + v * self.diagonal_entry(b, j)
        x = tuple(sorted((j, v) for j, v in xs.items() if v != 0))
        return (k1 + k2, x, _sparse_mul(f1, f2))

    def _inv(self, a):
        k, xs, fs = a
        x = tuple((j, -v / self.diagonal_entry(a, j)) for j, v in xs)
        return (-k, x, _sparse_inv(fs))

    def _in_H(self, a) -> bool:
        return not a[1]

    def coordinates(self):
        return (
            (("k", CoordType("Z")),)
            + tuple((f"f{j}", CoordType("P", INF)) for j in range(1, self.window + 1))
            + (("tail", CoordType("Psum")),)
        )

    def _h_coords(self, a) -> dict:
        k, _, fs = a
        fd = dict(fs)
        d = {"k": k}
        for j in range(1, self.window + 1):
            d[f"f{j}"] = fd.get(j, Fraction(1))
        d["tail"] = tuple((j, f) for j, f in fs if j > self.window)
        return d

    def _from_h_coords(self, d):
        fs = [(j, rational(d[f"f{j}"])) for j in range(1, self.window + 1)]
        fs = [(j, f) for j, f in fs if f != 1] + list(d.get("tail", ()))
        return (int(d["k"]), (), tuple(sorted(fs)))

    def _ball(self, height):
        w = self.window
        off = _offdiag_values(height)
        diag = PnSpec(INF).values(height)
        for k in sorted(range(-height, height + 1), key=lambda v: (abs(v), v)):
            for xv in itertools.product(off, repeat=w):
                for fv in itertools.product(diag, repeat=w):
                    xs = tuple((j + 1, v) for j, v in enumerate(xv) if v != 0)
                    fs = tuple((j + 1, v) for j, v in enumerate(fv) if v != 1)
                    yield (k, xs, fs)

    def _h_ball(self, height):
        diag = PnSpec(INF).values(height)
        for k in sorted(range(-height, height + 1), key=lambda v: (abs(v), v)):
            for fv in itertools.product(diag, repeat=self.window):
                yield (k, (), tuple((j + 1, v) for j, v in enumerate(fv) if v != 1))

    def _height(self, a) -> int:
        k, xs, fs = a
        hs = [abs(k)] + [offdiag_height(v) for _, v in xs] + [diag_height(v) for _, v in fs]
        return max(hs)

    def _matrix(self, a, size: int | None = None):
        size = self.window if size is None else size
        k, xs, _ = a
        xd = dict(xs)
        m = [[Fraction(0)] * (size + 1) for _ in range(size + 1)]
        m[0][0] = Fraction(1)
        for j in range(1, size + 1):
            m[0][j] = xd.get(j, Fraction(0))
            m[j][j] = self.diagonal_entry(a, j)
        return m

    def _format(self, a) -> str:
        k, xs, fs = a
        xd = ", ".join(f"x{j}={v}" for j, v in xs)
        fd = ", ".join(f"f{j}={v}" for j, v in fs)
        return f"(k={k}; {xd}; {fd})"

    def descriptor(self) -> dict:
        return {"family": self.kind, "S": list(self.S), "window": self.window}


@dataclass(frozen=True)
class Product(GroupFamily):
    """Direct product G_1 x ... x G_r with H = H_1 x ... x H_r."""

    factors: tuple
    kind: ClassVar[str] = "product"

    def __post_init__(self):
        object.__setattr__(self, "factors", tuple(self.factors))
        if not self.factors:
            raise DomainError("Product needs at least one factor")

    @property
    def name(self) -> str:
        return "Product(" + ", ".join(f.name for f in self.factors) + ")"

    def element(self, *components) -> GroupElement:
        if len(components) != len(self.factors):
            raise StructuralError("wrong number of components")
        data = []
        for fam, c in zip(self.factors, components):
            if isinstance(c, GroupElement):
                if c.family != fam:
                    raise StructuralError(f"{c!r} is not in {fam.name}")
                c = c.data
            data.append(c)
        return self.wrap(tuple(data))

    def component(self, g: GroupElement, i: int) -> GroupElement:
        return GroupElement(self.factors[i], g.data[i])

    def _check(self, data):
        for fam, d in zip(self.factors, data):
            fam._check(d)

    def _identity(self):
        return tuple(f._identity() for f in self.factors)

    def _mul(self, a, b):
        return tuple(f._mul(x, y) for f, x, y in zip(self.factors, a, b))

    def _inv(self, a):
        return tuple(f._inv(x) for f, x in zip(self.factors, a))

    def _in_H(self, a) -> bool:
        return all(f._in_H(x) for f, x in zip(self.factors, a))

    def coordinates(self):
        out = []
        for i, fam in enumerate(self.factors, 1):
            out.extend((f"{i}.{name}", ct) for name, ct in fam.coordinates())
        return tuple(out)

    def _h_coords(self, a) -> dict:
        d = {}
        for i, (fam, x) in enumerate(zip(self.factors, a), 1):
            d.update({f"{i}.{k}": v for k, v in fam._h_coords(x).items()})
        return d

    def _from_h_coords(self, d):
        out = []
        for i, fam in enumerate(self.factors, 1):
            pre = f"{i}."
            out.append(fam._from_h_coords({k[len(pre):]: v for k, v in d.items() if k.startswith(pre)}))
        return tuple(out)

    def _ball(self, height):
        return itertools.product(*(list(f._ball(height)) for f in self.factors))

    def _h_ball(self, height):
        return itertools.product(*(list(f._h_ball(height)) for f in self.factors))

    def _height(self, a) -> int:
        return max(f._height(x) for f, x in zip(self.factors, a))

    def _format(self, a) -> str:
        return "(" + ", ".join(f._format(x) for f, x in zip(self.factors, a)) + ")"

    def descriptor(self) -> dict:
        return {"family": self.kind, "factors": [f.descriptor() for f in self.factors]}


@dataclass(frozen=True)
class Cyclic(GroupFamily):
    """The integers as a group equal to its own diagonal subgroup."""

    kind: ClassVar[str] = "cyclic"

    @property
    def name(self) -> str:
        return "Cyclic()"

    def element(self, k: int = 0) -> GroupElement:
        return self.wrap((int(k),))

    def _check(self, data):
        pass

    def _identity(self):
        return (0,)

    def _mul(self, a, b):
        return (a[0] + b[0],)

    def _inv(self, a):
        return (-a[0],)

    def _in_H(self, a) -> bool:
        return True

    def coordinates(self):
        return (("k", CoordType("Z")),)

    def _h_coords(self, a) -> dict:
        return {"k": a[0]}

    def _from_h_coords(self, d):
        return (int(d["k"]),)

    def _ball(self, height):
        for k in sorted(range(-height, height + 1), key=lambda v: (abs(v), v)):
            yield (k,)

    def _h_ball(self, height):
        return self._ball(height)

    def _height(self, a) -> int:
        return abs(a[0])

    def _format(self, a) -> str:
        return f"(k={a[0]})"

    def descriptor(self) -> dict:
        return {"family": self.kind}


# -- module-level operations --------------------------------------------------


def identity(family: GroupFamily) -> GroupElement:
    return family.identity()


def multiply(a: GroupElement, b: GroupElement) -> GroupElement:
    if a.family != b.family:
        raise StructuralError(f"cannot multiply {a.family.name} by {b.family.name}")
    return GroupElement(a.family, a.family._mul(a.data, b.data))


def invert(a: GroupElement) -> GroupElement:
    return GroupElement(a.family, a.family._inv(a.data))


def power(a: GroupElement, k: int) -> GroupElement:
    base = a if k >= 0 else invert(a)
    result = a.family.identity()
    k = abs(k)
    while k:
        if k & 1:
            result = multiply(result, base)
        base = multiply(base, base)
        k >>= 1
    return result


def is_in_H(g: GroupElement) -> bool:
    return g.family._in_H(g.data)


def height(g: GroupElement) -> int:
    return g.family._height(g.data)


def enumerate_ball(family: GroupFamily, height: int) -> Iterator[GroupElement]:
    """Every element of height at most ``height``, in a fixed order.

    For ``InfiniteUT`` only the first ``window`` positions are populated.
    """
    if height < 0:
        raise DomainError("height must be nonnegative")
    for data in family._ball(height):
        yield GroupElement(family, data)


@functools.lru_cache(maxsize=64)
def _h_ball_cached(family: GroupFamily, height: int) -> tuple:
    return tuple(GroupElement(family, d) for d in family._h_ball(height))


def h_ball(family: GroupFamily, height: int) -> list[GroupElement]:
    """Elements of H in the ball of the given height (same order as ``enumerate_ball``)."""
    if height < 0:
        raise DomainError("height must be nonnegative")
    return list(_h_ball_cached(family, height))


def h_coordinates(h: GroupElement) -> dict:
    if not h.in_H:
        raise DomainError(f"{h!r} is not diagonal")
    return h.family._h_coords(h.data)


def from_h_coordinates(family: GroupFamily, coords: dict) -> GroupElement:
    return family.wrap(family._from_h_coords(coords))


def to_matrix(g: GroupElement, size: int | None = None) -> list[list[Fraction]]:
    """Explicit matrix of ``g`` (InfiniteUT is truncated to ``size`` positions)."""
    fam = g.family
    if isinstance(fam, InfiniteUT):
        return fam._matrix(g.data, size)
    if isinstance(fam, Product) or isinstance(fam, Cyclic):
        raise StructuralError(f"{fam.name} has no single matrix form")
    return fam._matrix(g.data)


def random_element(family: GroupFamily, rng: random.Random, height: int = 3,
                   in_H: bool | None = None) -> GroupElement:
    """A random element with parameters drawn from the height-``height`` value lists.

    ``in_H=True`` forces a diagonal element, ``in_H=False`` a non-diagonal one.
    """
    if in_H:
        return rng.choice(_h_ball_cached(family, height))
    while True:
        g = GroupElement(family, _random_data(family, rng, height))
        if in_H is None or g.in_H == in_H:
            return g


def _random_data(family, rng, height):
    off = _offdiag_values(height)
    if isinstance(family, TwoByTwo):
        return (rng.choice(PnSpec(family.n).values(height)), rng.choice(off))
    if isinstance(family, ThreeByThree):
        return (rng.choice(off), rng.choice(off),
                rng.choice(PnSpec(family.n).values(height)), rng.choice(PnSpec(INF).values(height)))
    if isinstance(family, InfiniteUT):
        diag = PnSpec(INF).values(height)
        w = family.window
        xs = tuple((j, v) for j in range(1, w + 1) if (v := rng.choice(off)) != 0)
        fs = tuple((j, v) for j in range(1, w + 1) if (v := rng.choice(diag)) != 1)
        return (rng.randint(-height, height), xs, fs)
    if isinstance(family, Product):
        return tuple(_random_data(f, rng, height) for f in family.factors)
    if isinstance(family, Cyclic):
        return (rng.randint(-height, height),)
    raise StructuralError(f"unsupported family {family!r}")


# -- descriptors ---------------------------------------------------------------


def family_from_descriptor(d) -> GroupFamily:
    """Build a family from its JSON descriptor, e.g. ``{"family": "three_by_three", "n": 3}``."""
    if not isinstance(d, dict) or "family" not in d:
        raise RecipeError(f"family descriptor must be an object with a 'family' key: {d!r}")
    kind = d["family"]
    try:
        if kind == TwoByTwo.kind:
            return TwoByTwo(parse(d["n"]))
        if kind == ThreeByThree.kind:
            return ThreeByThree(parse(d["n"]))
        if kind == InfiniteUT.kind:
            return InfiniteUT(tuple(d["S"]), int(d.get("window", 0)))
        if kind == Product.kind:
            return Product(tuple(family_from_descriptor(f) for f in d["factors"]))
        if kind == Cyclic.kind:
            return Cyclic()
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, RecipeError):
            raise
        raise RecipeError(f"bad {kind} descriptor {d!r}: {exc}") from None
    raise RecipeError(f"unknown family {kind!r}")


def family_from_shorthand(text: str) -> GroupFamily:
    """Parse ``two_by_two:3``, ``three_by_three:inf``, ``infinite_ut:2,5`` or ``cyclic``."""
    kind, _, arg = text.partition(":")
    if kind == InfiniteUT.kind:
        return family_from_descriptor({"family": kind, "S": [int(v) for v in arg.split(",") if v]})
    if kind == Cyclic.kind:
        return Cyclic()
    return family_from_descriptor({"family": kind, "n": arg})
