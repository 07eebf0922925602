"""Double cosets HgH, stabilizers K_g and the classification of cosets.

Two nontrivial double cosets are equivalent when their stabilizers agree.
Provided distinct stabilizers are pairwise noncommensurable, the Pukanszky
invariant of L(H) is the set of class sizes; ``classify`` refuses to report
a classification when that hypothesis fails.

Coset counting is done in closed form.  The two-sided H-action only rescales
the off-diagonal entries by elements of P_n (or P_inf, or 2**(n_j k) times
P_inf), so double cosets are orbits of Q* modulo those subgroups, detected by
2-adic valuations.  Infinite counts are certified by an injective map from Z
into pairwise distinct double cosets rather than by search.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, product
from typing import Callable

from .errors import CriterionInapplicable, DomainError, StructuralError
from .extnat import INF, ExtNat, PukSet
from .groups import (
    Cyclic,
    GroupElement,
    GroupFamily,
    InfiniteUT,
    Product,
    ThreeByThree,
    TwoByTwo,
    h_ball,
    h_coordinates,
    height,
    power,
    v2,
)
from .subgroups import SubgroupSpec

__all__ = [
    "SubgroupSpec",
    "Parametrization",
    "CosetClass",
    "CosetClassification",
    "Word",
    "stabilizer",
    "stabilizer_bruteforce",
    "ball_restriction",
    "coset_invariant",
    "coset_representative",
    "double_coset_witness",
    "classify",
    "check_noncommensurable",
    "puk_from_cosets",
    "free_product_cosets",
    "exceptional_k_set",
    "ExceptionalSet",
    "Certificate",
]


# -- stabilizers ---------------------------------------------------------------


def stabilizer(g: GroupElement) -> SubgroupSpec:
    """Closed form of K_g = {(h, k) in H x H : h g k = g}."""
    if g.in_H:
        raise DomainError(f"{g!r} lies in H: not a nontrivial double coset")
    return _stabilizer(g.family, g.data)


def _stabilizer(fam: GroupFamily, data) -> SubgroupSpec:
    if fam._in_H(data):
        # H abelian: h g k = g  iff  k = h^-1
        return SubgroupSpec.anti(fam.coordinates())
    if isinstance(fam, TwoByTwo):
        return SubgroupSpec.trivial()
    if isinstance(fam, ThreeByThree):
        x, y = data[0], data[1]
        coords = dict(fam.coordinates())
        if y == 0:
            return SubgroupSpec.anti([("g", coords["g"])])
        if x == 0:
            return SubgroupSpec.anti([("f", coords["f"])])
        return SubgroupSpec.trivial()
    if isinstance(fam, InfiniteUT):
        support = {j for j, _ in data[1]}
        return _ut_stabilizer(fam, support)
    if isinstance(fam, Product):
        out = SubgroupSpec.trivial()
        for i, (f, d) in enumerate(zip(fam.factors, data), 1):
            out = out.product(_stabilizer(f, d).prefixed(f"{i}."))
        return out
    raise StructuralError(f"no stabilizer formula for {fam.name}")


def _ut_stabilizer(fam: InfiniteUT, support) -> SubgroupSpec:
    if max(support) > fam.window:
        raise DomainError(f"support {sorted(support)} leaves the modelled window 1..{fam.window}")
    # {(h, h^-1) : h in H_T}, H_T = {k = 0, f_i = 1 for i in T}
    free = [(name, ct) for name, ct in fam.coordinates()
            if name != "k" and not (name.startswith("f") and int(name[1:]) in support)]
    return SubgroupSpec.anti(free)


def stabilizer_bruteforce(g: GroupElement, height_bound: int) -> frozenset:
    """All (h, k) with h, k in the H-ball of the given height and h g k = g.

    For each h the equation fixes k = (h g)^-1 g, which is then tested for
    lying in H and in the ball; no closed form is consulted.
    """
    out = set()
    for h in h_ball(g.family, height_bound):
        k = (h * g).inverse() * g
        if k.in_H and height(k) <= height_bound:
            assert h * g * k == g
            out.add((h, k))
    return frozenset(out)


def ball_restriction(K: SubgroupSpec, family: GroupFamily, height_bound: int) -> frozenset:
    """Pairs of the H-ball x H-ball that belong to K."""
    hs = [(h, h_coordinates(h)) for h in h_ball(family, height_bound)]
    if any(c.kind != "anti" for c in K.constraints):
        return frozenset((h, k) for h, hc in hs for k, kc in hs if K.contains(hc, kc))
    # anti-only kernels: each h has at most one partner, found by lookup
    by_coords = {_freeze(hc): h for h, hc in hs}
    types = dict(family.coordinates())
    cons = K.by_coord()
    out = set()
    for h, hc in hs:
        partner = {name: (types[name].inv(v) if name in cons else types[name].identity())
                   for name, v in hc.items()}
        k = by_coords.get(_freeze(partner))
        if k is not None and K.contains(hc, partner):
            out.add((h, k))
    return frozenset(out)


def _freeze(coords: dict) -> tuple:
    return tuple(sorted(coords.items()))


# -- coset invariants -------------------------------------------------------------


def _mod(e: int, n: ExtNat) -> int:
    return e if n == INF else e % n


def coset_invariant(g: GroupElement):
    """A complete invariant of the double coset HgH (``None`` for H itself)."""
    return _invariant(g.family, g.data)


def _invariant(fam: GroupFamily, data):
    if fam._in_H(data):
        return None
    if isinstance(fam, TwoByTwo):
        return _mod(v2(data[1]), fam.n)
    if isinstance(fam, ThreeByThree):
        x, y = data[0], data[1]
        return (None if x == 0 else _mod(v2(x), fam.n), None if y == 0 else v2(y))
    if isinstance(fam, InfiniteUT):
        xs = data[1]
        support = tuple(j for j, _ in xs)
        vals = [v2(v) for _, v in xs]
        ns = [fam.exponent(j) for j in support]
        # quotient of Z^T by Z (n_j)_j: push the first entry into [0, n_first)
        t = vals[0] // ns[0]
        return (support, tuple(v - t * n for v, n in zip(vals, ns)))
    if isinstance(fam, Product):
        return tuple(_invariant(f, d) for f, d in zip(fam.factors, data))
    raise StructuralError(f"no coset invariant for {fam.name}")


def _rep_exponent(r: int, n: ExtNat) -> int:
    # residues 0..n-1 are shown as exponents 1..n
    return r if n == INF or r != 0 else n


def coset_representative(g: GroupElement) -> GroupElement:
    """The canonical unipotent representative (powers of 2 off the diagonal)."""
    fam = g.family
    return GroupElement(fam, _representative(fam, g.data))


def _representative(fam, data):
    if fam._in_H(data):
        return fam._identity()
    inv = _invariant(fam, data)
    two = Fraction(2)
    if isinstance(fam, TwoByTwo):
        return (Fraction(1), two ** _rep_exponent(inv, fam.n))
    if isinstance(fam, ThreeByThree):
        a, b = inv
        x = Fraction(0) if a is None else two ** _rep_exponent(a, fam.n)
        y = Fraction(0) if b is None else two ** b
        return (x, y, Fraction(1), Fraction(1))
    if isinstance(fam, InfiniteUT):
        support, vals = inv
        if len(support) == 1:
            vals = (_rep_exponent(vals[0], fam.exponent(support[0])),)
        return (0, tuple((j, two ** v) for j, v in zip(support, vals)), ())
    if isinstance(fam, Product):
        return tuple(_representative(f, d) for f, d in zip(fam.factors, data))
    raise StructuralError(f"no representative for {fam.name}")


def double_coset_witness(a: GroupElement, b: GroupElement, height_bound: int):
    """Search the H-ball for h with (h a)^-1 b in H; return (h, k) with h a k = b, or None."""
    for h in h_ball(a.family, height_bound):
        k = (h * a).inverse() * b
        if k.in_H:
            return h, k
    return None


# -- classification ---------------------------------------------------------------


@dataclass(frozen=True)
class Parametrization:
    """An injective map k -> representative, k in ``index_set``."""

    index_set: str
    make: Callable[[int], object] = field(compare=False, repr=False)

    def __call__(self, k: int):
        return self.make(k)


@dataclass(frozen=True)
class CosetClass:
    label: str
    stabilizer: SubgroupSpec
    coset_count: ExtNat
    representatives: tuple = ()
    parametrization: Parametrization | None = None

    def __post_init__(self):
        if self.coset_count == INF:
            if self.parametrization is None:
                raise ValueError(f"infinite class {self.label!r} needs a parametrization")
        elif len(self.representatives) != self.coset_count:
            raise ValueError(f"class {self.label!r}: {len(self.representatives)} "
                             f"representatives for count {self.coset_count}")

    def sample(self, count: int = 5) -> list:
        if self.coset_count != INF:
            return list(self.representatives)
        return [self.parametrization(k) for k in range(-count, count + 1)]


@dataclass(frozen=True)
class Word:
    """A formal alternating word in G * Gamma; ``gamma`` marks a Gamma letter."""

    letters: tuple

    def __repr__(self) -> str:
        return " ".join("γ" if x == "gamma" else repr(x) for x in self.letters)


@dataclass(frozen=True)
class CosetClassification:
    family: GroupFamily
    classes: tuple
    free_product_with: str | None = None

    def __post_init__(self):
        stabs = [c.stabilizer for c in self.classes]
        if len(set(stabs)) != len(stabs):
            raise ValueError("classes must have pairwise distinct stabilizers")

    def counts(self) -> list[ExtNat]:
        return [c.coset_count for c in self.classes]

    def class_of(self, g: GroupElement) -> CosetClass:
        K = stabilizer(g)
        for c in self.classes:
            if c.stabilizer == K:
                return c
        raise KeyError(f"no class with stabilizer {K}")


def _unipotent(fam: GroupFamily, *entries) -> GroupElement:
    if isinstance(fam, TwoByTwo):
        return fam.element(x=entries[0])
    if isinstance(fam, ThreeByThree):
        return fam.element(x=entries[0], y=entries[1])
    raise StructuralError(fam.name)


def _two(k: int) -> Fraction:
    return Fraction(2) ** k


def _classes(fam: GroupFamily) -> list[CosetClass]:
    if isinstance(fam, TwoByTwo):
        n = fam.n
        if n == INF:
            return [CosetClass("x != 0", SubgroupSpec.trivial(), INF,
                               parametrization=Parametrization("Z ≅ Q*/Pinf", lambda k: fam.element(x=_two(k))))]
        reps = tuple(fam.element(x=_two(k)) for k in range(1, n + 1))
        return [CosetClass("x != 0", SubgroupSpec.trivial(), n, reps)]
    if isinstance(fam, ThreeByThree):
        n = fam.n
        coords = dict(fam.coordinates())
        if n == INF:
            first = CosetClass("x != 0, y = 0", SubgroupSpec.anti([("g", coords["g"])]), INF,
                               parametrization=Parametrization("Z ≅ Q*/Pinf", lambda k: fam.element(x=_two(k))))
        else:
            first = CosetClass("x != 0, y = 0", SubgroupSpec.anti([("g", coords["g"])]), n,
                               tuple(fam.element(x=_two(k)) for k in range(1, n + 1)))
        return [
            first,
            CosetClass("x = 0, y != 0", SubgroupSpec.anti([("f", coords["f"])]), INF,
                       parametrization=Parametrization("Z ≅ Q*/Pinf", lambda k: fam.element(y=_two(k)))),
            CosetClass("x != 0, y != 0", SubgroupSpec.trivial(), INF,
                       parametrization=Parametrization("Z (y = 2^k, x = 1)",
                                                       lambda k: fam.element(x=1, y=_two(k)))),
        ]
    if isinstance(fam, InfiniteUT):
        out = []
        positions = range(1, fam.window + 1)
        for size in range(1, fam.window + 1):
            for T in combinations(positions, size):
                K = _ut_stabilizer(fam, set(T))
                label = "support {" + ", ".join(map(str, T)) + "}"
                if size == 1:
                    j = T[0]
                    nj = fam.exponent(j)
                    reps = tuple(fam.element(x={j: _two(k)}) for k in range(1, nj + 1))
                    out.append(CosetClass(label, K, nj, reps))
                else:
                    out.append(CosetClass(label, K, INF, parametrization=Parametrization(
                        f"Z ≅ Z^{size}/Z(n_j)", _ut_param(fam, T))))
        return out
    if isinstance(fam, Product):
        return _product_classes(fam)
    if isinstance(fam, Cyclic):
        return []
    raise StructuralError(f"cannot classify {fam.name}")


def _ut_param(fam: InfiniteUT, T):
    def make(k):
        x = {j: Fraction(1) for j in T}
        x[T[1]] = _two(k)
        return fam.element(x=x)
    return make


def _product_classes(fam: Product) -> list[CosetClass]:
    # per factor: None means "component lies in H", otherwise one of its classes
    options = [[None] + _classes(f) for f in fam.factors]
    out = []
    for choice in product(*options):
        if all(c is None for c in choice):
            continue
        K = SubgroupSpec.trivial()
        count: ExtNat = 1
        labels = []
        for i, (f, c) in enumerate(zip(fam.factors, choice), 1):
            if c is None:
                K = K.product(SubgroupSpec.anti(f.coordinates()).prefixed(f"{i}."))
                labels.append("H")
            else:
                K = K.product(c.stabilizer.prefixed(f"{i}."))
                count = count * c.coset_count
                labels.append(c.label)
        label = " × ".join(f"[{s}]" for s in labels)
        if count == INF:
            out.append(CosetClass(label, K, INF, parametrization=Parametrization(
                "Z", _product_param(fam, choice))))
        else:
            reps = tuple(
                fam.element(*comps)
                for comps in product(*[
                    (f.identity(),) if c is None else c.representatives
                    for f, c in zip(fam.factors, choice)
                ])
            )
            out.append(CosetClass(label, K, count, reps))
    return out


def _product_param(fam: Product, choice):
    def make(k):
        comps = []
        for f, c in zip(fam.factors, choice):
            if c is None:
                comps.append(f.identity())
            elif c.coset_count == INF:
                comps.append(c.parametrization(k))
            else:
                comps.append(c.representatives[0])
        return fam.element(*comps)
    return make


def check_noncommensurable(classes) -> None:
    """Raise CriterionInapplicable if two stabilizers are finitely commensurable."""
    for a, b in combinations(classes, 2):
        if a.stabilizer.commensurability(b.stabilizer) == "finite":
            raise CriterionInapplicable(
                f"stabilizers {a.stabilizer} and {b.stabilizer} of classes {a.label!r} "
                f"and {b.label!r} are distinct but commensurable"
            )


def classify(family: GroupFamily) -> CosetClassification:
    """Nontrivial double cosets of ``family`` grouped by stabilizer."""
    classes = _classes(family)
    check_noncommensurable(classes)
    return CosetClassification(family, tuple(classes))


def puk_from_cosets(c: CosetClassification) -> PukSet:
    return PukSet(c.counts())


def free_product_cosets(c: CosetClassification, q: str = "L(Z)") -> CosetClassification:
    """Classification of H inside G * Gamma for a nontrivial group Gamma.

    Every element outside G has trivial stabilizer and there are infinitely
    many such double cosets (the words γ h γ, h in H \\ {e}, are pairwise
    inequivalent), so they join the class with trivial stabilizer.
    """
    fam = c.family
    coords = fam.coordinates()
    name, ct = coords[0]

    def word(k):
        shift = 1 if k >= 0 else 0
        h = _h_with(fam, name, ct, k + shift)
        return Word(("gamma", h, "gamma"))

    param = Parametrization("Z (words γ h γ, h in H \\ {e})", word)
    classes = list(c.classes)
    for i, cl in enumerate(classes):
        if cl.stabilizer.is_trivial:
            classes[i] = CosetClass(cl.label + " + words outside G", cl.stabilizer, INF,
                                    parametrization=cl.parametrization or param)
            break
    else:
        classes.append(CosetClass("words outside G", SubgroupSpec.trivial(), INF, parametrization=param))
    check_noncommensurable(classes)
    return CosetClassification(fam, tuple(classes), free_product_with=q)


def _h_with(fam, name, ct, k):
    from .groups import from_h_coordinates

    coords = {n: t.identity() for n, t in fam.coordinates()}
    if ct.kind == "Z":
        coords[name] = k
    else:
        coords[name] = Fraction(3) ** k
    return from_h_coordinates(fam, coords)


# -- exceptional set -----------------------------------------------------------------


@dataclass(frozen=True)
class Certificate:
    """g1 v^k g2 has an off-diagonal entry alpha + beta * base**k.

    ``zeros`` is the exact set of integers k where that entry vanishes, or
    ``None`` when it vanishes for infinitely many k.  Outside ``zeros`` the
    product g1 v^k g2 is certainly not diagonal.
    """

    entry: str
    alpha: Fraction
    beta: Fraction
    base: Fraction
    zeros: frozenset | None

    @property
    def finite(self) -> bool:
        return self.zeros is not None

    def entry_at(self, k: int) -> Fraction:
        return self.alpha + self.beta * self.base ** k

    def admits(self, ks, bound: int) -> bool:
        """Whether the brute-force set ``ks`` is exactly the certified zeros in range."""
        if not self.finite:
            return False
        return frozenset(ks) == frozenset(k for k in self.zeros if abs(k) <= bound)


@dataclass(frozen=True)
class ExceptionalSet:
    ks: frozenset
    bound: int
    certificate: Certificate | None

    @property
    def certified(self) -> bool:
        return self.certificate is not None and self.certificate.admits(self.ks, self.bound)


def _integer_log(base: Fraction, r: Fraction) -> int | None:
    """k with base**k == r, if any (|base| != 1)."""
    if r == 0:
        return None
    if r == 1:
        return 0
    approx = (math.log(abs(r.numerator)) - math.log(r.denominator)) / (
        math.log(abs(base.numerator)) - math.log(base.denominator))
    for k in range(round(approx) - 1, round(approx) + 2):
        if base ** k == r:
            return k
    return None


def _zeros(alpha: Fraction, beta: Fraction, base: Fraction) -> frozenset | None:
    if beta == 0 or base == 1:
        c = alpha + beta if base == 1 else alpha
        return frozenset() if c != 0 else None
    if base == -1:
        # the entry alternates between alpha + beta and alpha - beta
        return frozenset() if alpha + beta != 0 and alpha - beta != 0 else None
    root = _integer_log(base, -alpha / beta)
    return frozenset() if root is None else frozenset({root})


def _certificate(g1: GroupElement, g2: GroupElement, v: GroupElement) -> Certificate | None:
    fam = g1.family
    if isinstance(fam, TwoByTwo):
        f1, x1 = g1.data
        _, x2 = g2.data
        entries = [("x", x1, f1 * x2, v.data[0])]
    elif isinstance(fam, ThreeByThree):
        x1, y1, _, _ = g1.data
        x2, y2, f2, gg2 = g2.data
        entries = [("x", x2, x1 * f2, v.data[2]), ("y", y2, y1 * gg2, v.data[3])]
    else:
        return None
    certs = [Certificate(name, a, b, base, _zeros(a, b, base)) for name, a, b, base in entries]
    finite = [c for c in certs if c.finite]
    if finite:
        return min(finite, key=lambda c: len(c.zeros))
    return certs[0]


def exceptional_k_set(g1: GroupElement, g2: GroupElement, v: GroupElement,
                      bound: int = 20) -> ExceptionalSet:
    """{k : |k| <= bound, g1 v^k g2 in H}, with a finiteness certificate when one exists."""
    if not v.in_H:
        raise DomainError(f"{v!r} is not in H")
    if g1.family != g2.family or g1.family != v.family:
        raise StructuralError("elements from different families")
    ks = frozenset(k for k in range(-bound, bound + 1) if (g1 * power(v, k) * g2).in_H)
    return ExceptionalSet(ks, bound, _certificate(g1, g2, v))
