"""The measure-multiplicity invariant (Y, [eta], m) and its calculus.

Every measure class met here is Haar measure on an annihilator K^perp in a
product of dual groups, so a component is recorded by its kernel K (a
``SubgroupSpec``) and never by a concrete measure.  Two components on the same
pair of atoms are equivalent when their kernels are equal and mutually
singular when K1 K2 / (K1 ∩ K2) is infinite; anything in between is refused.

The space Y is a disjoint union of atoms, each the dual of an abelian group
given by its coordinates.  Atom weights are carried along for bookkeeping but
play no role in measure classes.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace
from fractions import Fraction
from itertools import permutations
from typing import Iterable

from .cosets import CosetClassification
from .errors import CalculusInapplicable, ConsistencyError, DomainError, StructuralError
from .extnat import INF, ExtNat, PukSet, check, fmt
from .extnat import parse as parse_extnat
from .groups import CoordType
from .subgroups import SubgroupSpec

SCHEMA = 1


@dataclass(frozen=True)
class Atom:
    """One connected piece of Y: the dual of an abelian group H."""

    label: str
    coords: tuple
    group: str = ""
    weight: Fraction = Fraction(1)

    def ctypes(self) -> dict[str, CoordType]:
        return dict(self.coords)

    def diagonal(self) -> SubgroupSpec:
        return SubgroupSpec.anti(self.coords)


@dataclass(frozen=True)
class MeasureComponent:
    """Haar measure on the annihilator of ``kernel`` inside Y_a x Y_b, with multiplicity."""

    pair: tuple
    kernel: SubgroupSpec
    multiplicity: ExtNat

    def flipped(self) -> "MeasureComponent":
        return MeasureComponent((self.pair[1], self.pair[0]), self.kernel.flip(), self.multiplicity)

    def key(self):
        return (self.pair, str(self.kernel))


def _sorted_components(cs: Iterable[MeasureComponent]) -> tuple:
    return tuple(sorted(cs, key=MeasureComponent.key))


@dataclass(frozen=True)
class MMInvariant:
    atoms: tuple
    components: tuple

    def __post_init__(self):
        object.__setattr__(self, "atoms", tuple(sorted(self.atoms, key=lambda a: a.label)))
        object.__setattr__(self, "components", _sorted_components(self.components))
        self._validate()

    def _validate(self):
        labels = [a.label for a in self.atoms]
        if not labels:
            raise DomainError("an MM invariant needs at least one atom")
        if len(set(labels)) != len(labels):
            raise StructuralError(f"duplicate atom labels {labels}")
        if any(not 0 < a.weight <= 1 for a in self.atoms) or sum(a.weight for a in self.atoms) != 1:
            raise DomainError("atom weights must lie in (0, 1] and sum to 1")
        atoms = self.atom_map()
        seen = {}
        for c in self.components:
            check(c.multiplicity)
            a, b = c.pair
            if a not in atoms or b not in atoms:
                raise StructuralError(f"component on unknown atoms {c.pair}")
            ta, tb = atoms[a].ctypes(), atoms[b].ctypes()
            for con in c.kernel.constraints:
                if ta.get(con.coord) != con.ctype or tb.get(con.coord) != con.ctype:
                    raise StructuralError(f"kernel {c.kernel} does not live on {a} x {b}")
            if c.key() in seen:
                raise StructuralError(f"two components with kernel {c.kernel} on {c.pair}: merge them")
            seen[c.key()] = c
        for c in self.components:
            f = seen.get(c.flipped().key())
            if f is None or f.multiplicity != c.multiplicity:
                raise StructuralError(f"component {c.kernel} on {c.pair} lacks its flip")
        for a in self.atoms:
            d = seen.get(((a.label, a.label), str(a.diagonal())))
            if d is None or d.multiplicity != 1:
                raise StructuralError(f"atom {a.label} needs its diagonal with multiplicity 1")
        for pair in {c.pair for c in self.components}:
            _check_singular([c for c in self.components if c.pair == pair])

    def atom_map(self) -> dict[str, Atom]:
        return {a.label: a for a in self.atoms}

    def on(self, a: str, b: str) -> list[MeasureComponent]:
        return [c for c in self.components if c.pair == (a, b)]

    def is_diagonal(self, c: MeasureComponent) -> bool:
        """Whether the support of ``c`` lies inside the diagonal of Y x Y."""
        a, b = c.pair
        return a == b and self.atom_map()[a].diagonal() <= c.kernel

    def off_diagonal(self) -> list[MeasureComponent]:
        return [c for c in self.components if not self.is_diagonal(c)]

    def to_json(self) -> str:
        return to_json(self)


def _check_singular(cs: list[MeasureComponent]) -> None:
    for i, c in enumerate(cs):
        for d in cs[i + 1:]:
            rel = c.kernel.commensurability(d.kernel)
            if rel == "finite":
                raise CalculusInapplicable(
                    f"kernels {c.kernel} and {d.kernel} on {c.pair} are commensurable: "
                    "their Haar measures are neither equivalent nor singular"
                )


def merge_components(cs: Iterable[MeasureComponent]) -> list[MeasureComponent]:
    """Combine components with equal kernels on the same pair by adding multiplicities."""
    out: dict = {}
    for c in cs:
        prev = out.get(c.key())
        out[c.key()] = c if prev is None else replace(prev, multiplicity=prev.multiplicity + c.multiplicity)
    return list(out.values())


def _flip_closure(cs: list[MeasureComponent]) -> list[MeasureComponent]:
    keys = {c.key() for c in cs}
    extra = [c.flipped() for c in cs if c.flipped().key() not in keys]
    return cs + extra


# -- constructions --------------------------------------------------------------


def point() -> MMInvariant:
    """The invariant of the one-point algebra C inside itself."""
    a = Atom("Y", (), "trivial")
    return MMInvariant((a,), (MeasureComponent(("Y", "Y"), a.diagonal(), 1),))


def from_cosets(c: CosetClassification, label: str = "Y") -> MMInvariant:
    """One atom; the diagonal with multiplicity 1 plus one component per coset class."""
    fam = c.family
    atom = Atom(label, fam.coordinates(), fam.name)
    pair = (label, label)
    cs = [MeasureComponent(pair, atom.diagonal(), 1)]
    cs += [MeasureComponent(pair, cl.stabilizer, cl.coset_count) for cl in c.classes]
    return MMInvariant((atom,), tuple(_flip_closure(merge_components(cs))))


def _relabel(inv: MMInvariant, names: dict[str, str], scale: Fraction) -> tuple[list, list]:
    atoms = [replace(a, label=names[a.label], weight=a.weight * scale) for a in inv.atoms]
    comps = [replace(c, pair=(names[c.pair[0]], names[c.pair[1]])) for c in inv.components]
    return atoms, comps


def direct_sum(summands: list[tuple[MMInvariant, Fraction]]) -> MMInvariant:
    """Disjoint union of the spaces; each summand keeps its own components.

    Atoms of the i-th summand are renamed ``Xi`` (or ``Xi.label`` when the
    summand has several atoms).  A single summand is returned unchanged.
    """
    if not summands:
        raise DomainError("direct_sum needs at least one summand")
    weights = [Fraction(w) for _, w in summands]
    if sum(weights) != 1 or any(w <= 0 for w in weights):
        raise DomainError(f"weights {list(map(str, weights))} must be positive and sum to 1")
    if len(summands) == 1:
        return summands[0][0]
    atoms, comps = [], []
    for i, (inv, w) in enumerate(summands, 1):
        if len(inv.atoms) == 1:
            names = {inv.atoms[0].label: f"X{i}"}
        else:
            names = {a.label: f"X{i}.{a.label}" for a in inv.atoms}
        a, c = _relabel(inv, names, Fraction(w))
        atoms += a
        comps += c
    return MMInvariant(tuple(atoms), tuple(comps))


def _tensor_label(a: str, b: str, single: bool) -> str:
    return "Y" if single else f"({a},{b})"


def tensor(a: MMInvariant, b: MMInvariant) -> MMInvariant:
    """Product spaces and kernels; multiplicities multiply.

    Coordinates are prefixed ``1.`` and ``2.`` so that the kernel K1 x K2,
    living in (H1 x H1) x (H2 x H2), is read inside (H1 x H2) x (H1 x H2).  A
    factor without coordinates (the one-point algebra) adds no prefix.
    """
    pa = "1." if any(x.coords for x in a.atoms) and any(x.coords for x in b.atoms) else ""
    pb = "2." if pa else ""
    single = len(a.atoms) == 1 and len(b.atoms) == 1
    atoms = []
    for x in a.atoms:
        for y in b.atoms:
            coords = tuple((pa + n, t) for n, t in x.coords) + tuple((pb + n, t) for n, t in y.coords)
            group = f"Product({x.group}, {y.group})" if x.coords and y.coords else (x.group if x.coords else y.group)
            atoms.append(Atom(_tensor_label(x.label, y.label, single), coords, group, x.weight * y.weight))
    comps = []
    for c in a.components:
        for d in b.components:
            pair = (_tensor_label(c.pair[0], d.pair[0], single), _tensor_label(c.pair[1], d.pair[1], single))
            kernel = c.kernel.prefixed(pa).product(d.kernel.prefixed(pb))
            comps.append(MeasureComponent(pair, kernel, c.multiplicity * d.multiplicity))
    return MMInvariant(tuple(atoms), tuple(merge_components(comps)))


def free_product(a: MMInvariant) -> MMInvariant:
    """Add full Haar measure with multiplicity inf on every pair of atoms."""
    comps = list(a.components)
    for x in a.atoms:
        for y in a.atoms:
            for c in a.on(x.label, y.label):
                if not c.kernel.is_trivial and c.kernel.order() != INF:
                    raise CalculusInapplicable(
                        f"kernel {c.kernel} on {c.pair} is finite and nontrivial: "
                        "its Haar measure is neither equivalent nor singular to full Haar"
                    )
            comps.append(MeasureComponent((x.label, y.label), SubgroupSpec.trivial(), INF))
    return MMInvariant(a.atoms, tuple(merge_components(comps)))


def restrict(a: MMInvariant, onto: Iterable[str]) -> MMInvariant:
    """Keep the atoms in ``onto`` and the components between them; renormalize weights."""
    keep = set(onto)
    if not keep:
        raise DomainError("restrict needs a nonempty set of atoms")
    unknown = keep - set(a.atom_map())
    if unknown:
        raise DomainError(f"unknown atoms {sorted(unknown)}")
    atoms = [x for x in a.atoms if x.label in keep]
    total = sum(x.weight for x in atoms)
    atoms = [replace(x, weight=x.weight / total) for x in atoms]
    comps = [c for c in a.components if set(c.pair) <= keep]
    return MMInvariant(tuple(atoms), tuple(comps))


def puk_of(a: MMInvariant) -> PukSet:
    """Multiplicities taken off the diagonal."""
    return PukSet(c.multiplicity for c in a.off_diagonal())


# -- support projections -----------------------------------------------------------


@dataclass(frozen=True)
class SupportProjection:
    """A union of pieces of atoms; each piece is the annihilator of a kernel in H.

    ``parts`` maps atom labels to the kernels of the pieces; a trivial kernel
    means the whole atom.
    """

    parts: tuple
    atoms: tuple

    def pieces(self, label: str) -> tuple:
        return dict(self.parts).get(label, ())

    def covers(self, label: str) -> bool:
        return any(k.is_trivial for k in self.pieces(label))

    @property
    def is_empty(self) -> bool:
        return not self.parts

    @property
    def is_full(self) -> bool:
        return all(self.covers(a) for a in self.atoms)

    @property
    def pattern(self) -> str:
        if self.is_empty:
            return "empty"
        return "full" if self.is_full else "proper"

    def __str__(self) -> str:
        if self.is_empty:
            return "0"
        if self.is_full:
            return "1"
        terms = []
        for label, kernels in self.parts:
            if any(k.is_trivial for k in kernels):
                terms.append(f"1_{{{label}}}")
            else:
                terms += [f"1_{{{label}: {k}^perp}}" for k in kernels]
        return " + ".join(terms)


def q_n(a: MMInvariant, n: ExtNat) -> SupportProjection:
    """First-coordinate support of the set where m equals ``n`` off the diagonal.

    The projection of K^perp to the first factor is the annihilator of
    {h : (h, e) in K}.
    """
    parts: dict[str, set] = {}
    for c in a.off_diagonal():
        if c.multiplicity == n:
            parts.setdefault(c.pair[0], set()).add(c.kernel.left_part())
    out = []
    for label in sorted(parts):
        ks = parts[label]
        if any(k.is_trivial for k in ks):
            ks = {SubgroupSpec.trivial()}
        out.append((label, tuple(sorted(ks, key=str))))
    return SupportProjection(tuple(out), tuple(x.label for x in a.atoms))


@dataclass(frozen=True)
class Verdict:
    distinguished: bool
    witness: str = ""

    def __str__(self) -> str:
        if self.distinguished:
            return f"DISTINGUISHED: {self.witness}"
        return "NOT DISTINGUISHED (this is not a proof of conjugacy)"


def _order_key(v: ExtNat):
    return (v == INF, v if v != INF else 0)


def distinguish(a: MMInvariant, b: MMInvariant) -> Verdict:
    """Compare invariants preserved by measure-space transformations.

    Uses the Puk set and, for each attained value n, whether q_n is the whole
    space, a proper nonzero part of it, or zero.
    """
    pa, pb = puk_of(a), puk_of(b)
    if pa != pb:
        return Verdict(True, f"Puk {pa} vs {pb}")
    for n in sorted(pa, key=_order_key):
        qa, qb = q_n(a, n), q_n(b, n)
        if qa.pattern != qb.pattern:
            return Verdict(True, f"q_{fmt(n)} {_describe(qa)} vs {_describe(qb)}")
    return Verdict(False)


def _describe(q: SupportProjection) -> str:
    return "full" if q.is_full else str(q)


# -- comparison and serialization ------------------------------------------------------


def relabel(a: MMInvariant, names: dict[str, str]) -> MMInvariant:
    atoms, comps = _relabel(a, names, Fraction(1))
    return MMInvariant(tuple(atoms), tuple(comps))


def equivalent(a: MMInvariant, b: MMInvariant) -> bool:
    """Equality up to renaming atoms."""
    if len(a.atoms) != len(b.atoms):
        return False
    la = [x.label for x in a.atoms]
    for perm in permutations([x.label for x in b.atoms]):
        names = dict(zip(la, perm))
        try:
            if relabel(a, names) == b:
                return True
        except StructuralError:
            continue
    return False


def _mult_json(v: ExtNat):
    return "inf" if v == INF else v


def to_dict(a: MMInvariant) -> dict:
    return {
        "schema": SCHEMA,
        "atoms": [
            {
                "label": x.label,
                "group": x.group,
                "coords": [[n, t.label] for n, t in x.coords],
                "weight": str(x.weight),
            }
            for x in a.atoms
        ],
        "components": [
            {"pair": list(c.pair), "kernel": str(c.kernel), "multiplicity": _mult_json(c.multiplicity)}
            for c in a.components
        ],
    }


def to_json(a: MMInvariant) -> str:
    """Canonical text form: one atom or component per line, stable ordering."""
    d = to_dict(a)

    def rows(items):
        return ",\n".join("    " + json.dumps(x, ensure_ascii=False) for x in items)

    return (
        "{\n"
        f'  "schema": {d["schema"]},\n'
        f'  "atoms": [\n{rows(d["atoms"])}\n  ],\n'
        f'  "components": [\n{rows(d["components"])}\n  ]\n'
        "}\n"
    )


def from_dict(d: dict) -> MMInvariant:
    if d.get("schema") != SCHEMA:
        raise ValueError(f"unsupported MM schema {d.get('schema')!r}")
    atoms = tuple(
        Atom(x["label"], tuple((n, CoordType.parse(t)) for n, t in x["coords"]),
             x.get("group", ""), Fraction(x.get("weight", "1")))
        for x in d["atoms"]
    )
    amap = {x.label: x for x in atoms}
    comps = []
    for c in d["components"]:
        pair = tuple(c["pair"])
        if pair[0] not in amap:
            raise ValueError(f"component on unknown atom {pair[0]!r}")
        kernel = SubgroupSpec.parse(c["kernel"], amap[pair[0]].ctypes())
        comps.append(MeasureComponent(pair, kernel, parse_extnat(c["multiplicity"])))
    return MMInvariant(atoms, tuple(comps))


def from_json(text: str) -> MMInvariant:
    return from_dict(json.loads(text))


def assert_same(a: MMInvariant, b: MMInvariant, what: str) -> None:
    if a != b:
        raise ConsistencyError(f"{what}: the two computations disagree\n{to_json(a)}\n{to_json(b)}")
