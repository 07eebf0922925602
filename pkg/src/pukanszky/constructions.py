"""Recipes: trees of masa constructions, evaluated along two independent paths.

The MM path builds every node with the calculus of ``mm``.  The coset path,
available whenever the recipe is built from group masas by tensor products
and free products, classifies the double cosets of the resulting group
directly (a tensor of group masas is the masa of the product group) and
converts that classification to an MM invariant.  A free product over a
direct sum of group masas is checked against the union formula instead.

Recipe files are JSON objects, one per node::

    {"node": "group_masa", "family": {"family": "two_by_two", "n": 3}}
    {"node": "tensor", "children": [...]}
    {"node": "direct_sum", "children": [...], "weights": ["1/2", "1/2"]}
    {"node": "free_product", "child": {...}, "q": "L(Z)"}
    {"node": "restrict", "child": {...}, "atoms": ["X2"]}

Weights are optional (uniform by default); ``q`` only documents which
diffuse algebra is used and does not affect the result.  Any node may carry a
``"comment"``.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path

from . import mm
from .cosets import classify, free_product_cosets, puk_from_cosets
from .errors import ConsistencyError, RecipeError
from .extnat import INF, ExtNat, PukSet
from .groups import (
    Cyclic,
    GroupFamily,
    InfiniteUT,
    Product,
    ThreeByThree,
    TwoByTwo,
    family_from_descriptor,
)


@dataclass(frozen=True)
class GroupMasa:
    family: GroupFamily


@dataclass(frozen=True)
class Tensor:
    children: tuple


@dataclass(frozen=True)
class DirectSum:
    children: tuple
    weights: tuple = ()

    def __post_init__(self):
        if not self.children:
            raise RecipeError("direct_sum needs children")
        ws = tuple(Fraction(w) for w in self.weights) or tuple(
            Fraction(1, len(self.children)) for _ in self.children)
        if len(ws) != len(self.children):
            raise RecipeError("one weight per child is required")
        if sum(ws) != 1 or any(w <= 0 for w in ws):
            raise RecipeError(f"weights must be positive and sum to 1, got {[str(w) for w in ws]}")
        object.__setattr__(self, "children", tuple(self.children))
        object.__setattr__(self, "weights", ws)


@dataclass(frozen=True)
class FreeProduct:
    child: object
    q: str = "L(Z)"


@dataclass(frozen=True)
class Restrict:
    child: object
    atoms: tuple


Recipe = GroupMasa | Tensor | DirectSum | FreeProduct | Restrict


# -- parsing ------------------------------------------------------------------------


def parse_node(d) -> Recipe:
    if not isinstance(d, dict) or "node" not in d:
        raise RecipeError(f"recipe node must be an object with a 'node' key: {d!r}")
    kind = d["node"]
    try:
        if kind == "group_masa":
            return GroupMasa(family_from_descriptor(d["family"]))
        if kind == "tensor":
            children = tuple(parse_node(c) for c in d["children"])
            if not children:
                raise RecipeError("tensor needs children")
            return Tensor(children)
        if kind == "direct_sum":
            return DirectSum(tuple(parse_node(c) for c in d["children"]),
                             tuple(Fraction(w) for w in d.get("weights", ())))
        if kind == "free_product":
            return FreeProduct(parse_node(d["child"]), str(d.get("q", "L(Z)")))
        if kind == "restrict":
            atoms = tuple(d["atoms"])
            if not atoms:
                raise RecipeError("restrict needs atoms")
            return Restrict(parse_node(d["child"]), atoms)
    except KeyError as exc:
        raise RecipeError(f"{kind} node is missing {exc}") from None
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        if isinstance(exc, RecipeError):
            raise
        raise RecipeError(f"bad {kind} node: {exc}") from None
    raise RecipeError(f"unknown node kind {kind!r}")


def parse_recipe(text: str) -> Recipe:
    if not text.strip():
        raise RecipeError("empty recipe")
    try:
        d = json.loads(text)
    except json.JSONDecodeError as exc:
        raise RecipeError(f"recipe is not valid JSON: {exc}") from None
    return parse_node(d)


def load_recipe(path) -> Recipe:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise RecipeError(f"cannot read recipe {path}: {exc}") from None
    return parse_recipe(text)


def to_node(r: Recipe) -> dict:
    if isinstance(r, GroupMasa):
        return {"node": "group_masa", "family": r.family.descriptor()}
    if isinstance(r, Tensor):
        return {"node": "tensor", "children": [to_node(c) for c in r.children]}
    if isinstance(r, DirectSum):
        return {"node": "direct_sum", "children": [to_node(c) for c in r.children],
                "weights": [str(w) for w in r.weights]}
    if isinstance(r, FreeProduct):
        return {"node": "free_product", "child": to_node(r.child), "q": r.q}
    if isinstance(r, Restrict):
        return {"node": "restrict", "child": to_node(r.child), "atoms": list(r.atoms)}
    raise RecipeError(f"not a recipe node: {r!r}")


def dump_recipe(r: Recipe) -> str:
    return json.dumps(to_node(r), indent=2) + "\n"


# -- evaluation ------------------------------------------------------------------------


@dataclass(frozen=True)
class Evaluation:
    mm: mm.MMInvariant
    puk: PukSet
    coset_puk: PukSet | None = None
    checks: tuple = field(default=())


def _mm_path(r: Recipe) -> mm.MMInvariant:
    if isinstance(r, GroupMasa):
        return mm.from_cosets(classify(r.family))
    if isinstance(r, Tensor):
        out = _mm_path(r.children[0])
        for c in r.children[1:]:
            out = mm.tensor(out, _mm_path(c))
        return out
    if isinstance(r, DirectSum):
        return mm.direct_sum([(_mm_path(c), w) for c, w in zip(r.children, r.weights)])
    if isinstance(r, FreeProduct):
        return mm.free_product(_mm_path(r.child))
    if isinstance(r, Restrict):
        return mm.restrict(_mm_path(r.child), r.atoms)
    raise RecipeError(f"not a recipe node: {r!r}")


def group_of(r: Recipe) -> GroupFamily | None:
    """The group whose diagonal masa ``r`` describes, ignoring free factors, if any."""
    if isinstance(r, GroupMasa):
        return r.family
    if isinstance(r, Tensor):
        fams = [group_of(c) for c in r.children]
        if any(f is None for f in fams):
            return None
        out = fams[0]
        for f in fams[1:]:
            out = Product((out, f))
        return out
    return None


def _coset_path(r: Recipe):
    """(MM invariant, Puk) from double cosets, or (None, Puk) from the union formula."""
    fam = group_of(r)
    if fam is not None:
        c = classify(fam)
        return mm.from_cosets(c), puk_from_cosets(c)
    if isinstance(r, FreeProduct):
        inner = group_of(r.child)
        if inner is not None:
            c = free_product_cosets(classify(inner), r.q)
            return mm.from_cosets(c), puk_from_cosets(c)
        if isinstance(r.child, DirectSum):
            parts = [_coset_path(ch) for ch in r.child.children]
            if all(p is not None for p in parts):
                return None, theorem32_formula([p[1] for p in parts])
    return None


def evaluate(r: Recipe) -> Evaluation:
    """Evaluate ``r``; raise ConsistencyError if the two paths disagree."""
    inv = _mm_path(r)
    puk = mm.puk_of(inv)
    checks = []
    other = _coset_path(r)
    coset_puk = None
    if other is not None:
        other_mm, coset_puk = other
        if other_mm is not None:
            mm.assert_same(inv, other_mm, "MM invariant")
            checks.append("mm")
        if coset_puk != puk:
            raise ConsistencyError(f"Puk from the calculus {puk} differs from the coset path {coset_puk}")
        checks.append("puk")
    return Evaluation(inv, puk, coset_puk, tuple(checks))


def theorem32_formula(children_puks: list[PukSet]) -> PukSet:
    """{inf} together with the union of the summands' Puk sets."""
    if not children_puks:
        raise ValueError("at least one summand is required")
    return PukSet({INF}).union(*children_puks)


# -- builders ----------------------------------------------------------------------------


def theorem33_recipe(S, q: str = "L(Z)") -> Recipe:
    """A free product over the direct sum of ThreeByThree(i), i in S; Puk = S ∪ {inf}.

    For empty S this is the generator masa of a free group.
    """
    S = sorted(set(S))
    if not S:
        return FreeProduct(GroupMasa(Cyclic()), q)
    return FreeProduct(DirectSum(tuple(GroupMasa(ThreeByThree(i)) for i in S)), q)


def ex41_recipe(S) -> Recipe:
    return GroupMasa(InfiniteUT(tuple(S)))


def ex_a(n: ExtNat) -> Recipe:
    return GroupMasa(TwoByTwo(n))


def ex_b(n: int) -> Recipe:
    return Tensor((ex_a(n), ex_a(INF)))


def ex_c(n: int, q: str = "L(Z)") -> Recipe:
    return FreeProduct(ex_b(n), q)


def ex_d(n: int, q: str = "R") -> Recipe:
    return FreeProduct(DirectSum((ex_a(INF), ex_b(n)), (Fraction(1, 2), Fraction(1, 2))), q)
