"""Symbolic subgroups of H x H' built coordinate by coordinate.

A ``SubgroupSpec`` is a product over named coordinates of one of

    anti(A)  = {(a, a^-1) : a in A}
    left(A)  = {(a, e)    : a in A}
    right(A) = {(e, a)    : a in A}
    full(A)  = {(a, b)    : a, b in A}

where ``A`` is a subgroup of the coordinate group: either the stride-``s``
subgroup {a : disc(a) in sZ} (``s = 1`` is everything) or the torsion
subgroup.  Coordinates that are not mentioned are pinned to the identity on
both sides.  Every stabilizer of the supported families, and every kernel the
measure calculus produces from them, has this form, so membership, equality
(canonical form) and commensurability are all decidable.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from typing import Iterable

from .errors import StructuralError
from .extnat import INF, ExtNat
from .groups import CoordType

KINDS = ("anti", "left", "right", "full")
TOR = "tor"


def _sub_meet(ct: CoordType, a, b):
    if a == TOR or b == TOR:
        return TOR
    return lcm(a, b) if ct.discrete else 1


def _sub_order(ct: CoordType, a) -> ExtNat:
    return ct.torsion_order if a == TOR else INF


def _sub_index(ct: CoordType, a, b) -> ExtNat:
    # [A : B] for B inside A
    if a == b:
        return 1
    if b == TOR:
        return INF
    return b // a


def _sub_contains(ct: CoordType, sub, v) -> bool:
    if sub == TOR:
        return ct.is_torsion(v)
    return ct.disc(v) % sub == 0


def _sub_le(ct: CoordType, a, b) -> bool:
    """A <= B."""
    if b == TOR:
        return a == TOR
    if a == TOR:
        return True
    return a % b == 0


@dataclass(frozen=True)
class Constraint:
    coord: str
    ctype: CoordType
    kind: str
    sub: int | str = 1

    def key(self):
        return (self.coord, self.kind, str(self.sub))

    def __str__(self) -> str:
        if self.sub == TOR:
            suffix = "^tor"
        elif self.sub == 1:
            suffix = ""
        else:
            suffix = f"/{self.sub}"
        return f"{self.kind}:{self.coord}{suffix}"


def _normalize(c: Constraint) -> Constraint | None:
    if c.kind not in KINDS:
        raise ValueError(f"unknown constraint kind {c.kind!r}")
    sub = c.sub
    if sub == TOR:
        if c.ctype.torsion_order == 1:
            return None
    else:
        if not isinstance(sub, int) or sub < 1:
            raise ValueError(f"stride must be a positive integer, got {sub!r}")
        if not c.ctype.discrete:
            sub = 1
    return Constraint(c.coord, c.ctype, c.kind, sub)


_FLIP = {"anti": "anti", "full": "full", "left": "right", "right": "left"}


@dataclass(frozen=True)
class SubgroupSpec:
    """A subgroup of H x H' given by per-coordinate constraints (canonical form)."""

    constraints: tuple = ()

    def __post_init__(self):
        cs = [c for c in map(_normalize, self.constraints) if c is not None]
        names = [c.coord for c in cs]
        if len(set(names)) != len(names):
            raise StructuralError(f"coordinate constrained twice in {names}")
        object.__setattr__(self, "constraints", tuple(sorted(cs, key=Constraint.key)))

    # construction

    @classmethod
    def trivial(cls) -> "SubgroupSpec":
        return cls(())

    @classmethod
    def anti(cls, coords: Iterable[tuple[str, CoordType]], sub=1) -> "SubgroupSpec":
        """{(h, h^-1)} for h ranging over the named coordinates."""
        return cls(tuple(Constraint(name, ct, "anti", sub) for name, ct in coords))

    @classmethod
    def of(cls, *items: tuple) -> "SubgroupSpec":
        """``of(("f", ct, "anti"), ("g", ct2, "left", 2))``."""
        return cls(tuple(Constraint(*it) for it in items))

    # shape

    def by_coord(self) -> dict[str, Constraint]:
        return {c.coord: c for c in self.constraints}

    @property
    def is_trivial(self) -> bool:
        return not self.constraints

    @property
    def shape(self) -> str:
        if self.is_trivial:
            return "Trivial"
        if all(c.kind == "anti" and c.sub == 1 for c in self.constraints):
            return "AntiDiagonalOver"
        return "Generic"

    def coords(self) -> frozenset[str]:
        return frozenset(c.coord for c in self.constraints)

    # algebra

    def flip(self) -> "SubgroupSpec":
        return SubgroupSpec(tuple(Constraint(c.coord, c.ctype, _FLIP[c.kind], c.sub)
                                  for c in self.constraints))

    def prefixed(self, prefix: str) -> "SubgroupSpec":
        return SubgroupSpec(tuple(Constraint(prefix + c.coord, c.ctype, c.kind, c.sub)
                                  for c in self.constraints))

    def product(self, other: "SubgroupSpec") -> "SubgroupSpec":
        """K x L on disjoint coordinate sets."""
        if self.coords() & other.coords():
            raise StructuralError("product of subgroups on overlapping coordinates")
        return SubgroupSpec(self.constraints + other.constraints)

    def intersection(self, other: "SubgroupSpec") -> "SubgroupSpec":
        a, b = self.by_coord(), other.by_coord()
        out = []
        for name in a.keys() & b.keys():
            m = _pair_meet(a[name], b[name])
            if m is not None:
                out.append(m)
        return SubgroupSpec(tuple(out))

    def __le__(self, other: "SubgroupSpec") -> bool:
        b = other.by_coord()
        for c in self.constraints:
            d = b.get(c.coord)
            if d is None:
                return False
            if not (d.kind == c.kind or d.kind == "full"):
                return False
            if not _sub_le(c.ctype, c.sub, d.sub):
                return False
        return True

    def order(self) -> ExtNat:
        out = 1
        for c in self.constraints:
            out = out * _pair_order(c)
        return out

    def index_of(self, sub: "SubgroupSpec") -> ExtNat:
        """[self : sub] for ``sub <= self``."""
        if not sub <= self:
            raise ValueError("index_of needs a subgroup")
        inner = sub.by_coord()
        out = 1
        for c in self.constraints:
            out = out * _pair_index(c, inner.get(c.coord))
        return out

    def commensurability(self, other: "SubgroupSpec") -> str:
        """``"equal"``, ``"infinite"`` (K1K2/(K1∩K2) infinite) or ``"finite"``."""
        if self == other:
            return "equal"
        meet = self.intersection(other)
        size = self.index_of(meet) * other.index_of(meet)
        return "infinite" if size == INF else "finite"

    def left_part(self) -> "SubgroupSpec":
        """{h : (h, e) in K}, recorded as left constraints."""
        return SubgroupSpec(tuple(Constraint(c.coord, c.ctype, "left", c.sub)
                                  for c in self.constraints if c.kind in ("left", "full")))

    def contains_antidiagonal(self, coords: Iterable[tuple[str, CoordType]]) -> bool:
        """Whether {(h, h^-1) : h in H} lies in K, H given by its coordinates."""
        return SubgroupSpec.anti(coords) <= self

    # membership

    def contains(self, left: dict, right: dict) -> bool:
        """Membership of the pair (h, k) given by coordinate dictionaries."""
        cons = self.by_coord()
        for name in left.keys() | right.keys():
            c = cons.get(name)
            if c is None:
                for side in (left, right):
                    if name in side and not _is_identity(side[name]):
                        return False
                continue
            if not _pair_contains(c, left.get(name), right.get(name)):
                return False
        for name in cons.keys() - (left.keys() | right.keys()):
            raise StructuralError(f"pair has no coordinate {name!r}")
        return True

    # text form

    def __str__(self) -> str:
        if self.is_trivial:
            return "e"
        return ";".join(str(c) for c in self.constraints)

    def __repr__(self) -> str:
        return f"SubgroupSpec({str(self)!r})"

    @classmethod
    def parse(cls, text: str, ctypes: dict[str, CoordType]) -> "SubgroupSpec":
        text = text.strip()
        if text in ("e", ""):
            return cls.trivial()
        out = []
        for term in text.split(";"):
            kind, _, rest = term.partition(":")
            sub: int | str = 1
            if rest.endswith("^tor"):
                rest, sub = rest[:-4], TOR
            elif "/" in rest:
                rest, s = rest.split("/")
                sub = int(s)
            if rest not in ctypes:
                raise ValueError(f"unknown coordinate {rest!r} in kernel {text!r}")
            out.append(Constraint(rest, ctypes[rest], kind, sub))
        return cls(tuple(out))


def _is_identity(v) -> bool:
    # coordinate values are typed: Fraction for P, int for Z, tuple for Psum
    if isinstance(v, Fraction):
        return v == 1
    if isinstance(v, int):
        return v == 0
    return v == ()


def _pair_contains(c: Constraint, a, b) -> bool:
    ct = c.ctype
    a = ct.identity() if a is None else a
    b = ct.identity() if b is None else b
    if c.kind == "anti":
        return ct.is_identity(ct.mul(a, b)) and _sub_contains(ct, c.sub, a)
    if c.kind == "left":
        return ct.is_identity(b) and _sub_contains(ct, c.sub, a)
    if c.kind == "right":
        return ct.is_identity(a) and _sub_contains(ct, c.sub, b)
    return _sub_contains(ct, c.sub, a) and _sub_contains(ct, c.sub, b)


def _pair_meet(x: Constraint, y: Constraint) -> Constraint | None:
    if x.ctype != y.ctype:
        raise StructuralError(f"coordinate {x.coord!r} has two types")
    s = _sub_meet(x.ctype, x.sub, y.sub)
    if x.kind == y.kind or y.kind == "full":
        return Constraint(x.coord, x.ctype, x.kind, s)
    if x.kind == "full":
        return Constraint(x.coord, x.ctype, y.kind, s)
    return None


def _pair_order(c: Constraint) -> ExtNat:
    o = _sub_order(c.ctype, c.sub)
    return o * o if c.kind == "full" else o


def _pair_index(outer: Constraint, inner: Constraint | None) -> ExtNat:
    if inner is None:
        return _pair_order(outer)
    i = _sub_index(outer.ctype, outer.sub, inner.sub)
    if outer.kind == inner.kind:
        return i * i if outer.kind == "full" else i
    # full(A) over anti/left/right(B)
    return _sub_order(outer.ctype, outer.sub) * i
