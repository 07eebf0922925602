import random
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pukanszky import INF, ConsistencyError, PukSet, RecipeError
from pukanszky import constructions as C
from pukanszky.groups import InfiniteUT, ThreeByThree, TwoByTwo
from pukanszky.mm import distinguish, puk_of


def test_free_product_of_direct_sum_recipe():
    assert C.evaluate(C.theorem33_recipe({1, 3})).puk == {1, 3, INF}
    assert C.evaluate(C.theorem33_recipe(set())).puk == {INF}


def test_infinite_ut_recipe():
    ev = C.evaluate(C.ex41_recipe((2, 5)))
    assert ev.puk == {2, 5, INF} == ev.coset_puk
    assert ev.checks == ("mm", "puk")


def test_union_formula():
    assert C.theorem32_formula([PukSet({1}), PukSet({3, INF})]) == {1, 3, INF}
    assert C.theorem32_formula([PukSet({n, INF}) for n in (2, 4)]) == {2, 4, INF}
    with pytest.raises(ValueError):
        C.theorem32_formula([])


def test_union_formula_agrees_with_evaluation():
    r = C.theorem33_recipe({1, 2})
    ev = C.evaluate(r)
    children = [C.evaluate(ch).puk for ch in r.child.children]
    assert ev.puk == C.theorem32_formula(children) == ev.coset_puk


def test_free_product_collapses_the_single_class():
    for n in range(1, 7):
        fp = C.evaluate(C.FreeProduct(C.ex_a(n))).puk
        assert fp == {INF}
        assert fp != C.evaluate(C.ex_a(n)).puk | {INF}


def test_free_group_masas_distinguished():
    c, d = C.evaluate(C.ex_c(2)), C.evaluate(C.ex_d(2))
    assert c.puk == d.puk == {2, INF}
    assert distinguish(c.mm, d.mm).distinguished


def test_restrict_node():
    r = C.Restrict(C.ex_d(3), ("X2",))
    ev = C.evaluate(r)
    assert ev.puk == {3, INF} and ev.coset_puk is None


def test_default_weights_are_uniform():
    r = C.DirectSum((C.ex_a(1), C.ex_a(2), C.ex_a(3)))
    assert r.weights == (Fraction(1, 3),) * 3
    with pytest.raises(RecipeError):
        C.DirectSum((C.ex_a(1), C.ex_a(2)), (Fraction(1, 2), Fraction(1, 3)))


def test_recipe_text_round_trip():
    for r in [C.ex_a(3), C.ex_b(2), C.ex_c(2), C.ex_d(4), C.theorem33_recipe({1, 5}), C.ex41_recipe((2, 5)),
              C.Restrict(C.ex_d(2), ("X1",))]:
        assert C.parse_recipe(C.dump_recipe(r)) == r


@pytest.mark.parametrize("text", [
    "",
    "   ",
    "not json",
    "[]",
    '{"node": "mystery"}',
    '{"node": "group_masa"}',
    '{"node": "group_masa", "family": {"family": "two_by_two", "n": -1}}',
    '{"node": "tensor", "children": []}',
    '{"node": "direct_sum", "children": [{"node": "group_masa", "family": {"family": "cyclic"}}], "weights": ["1/2"]}',
    '{"node": "restrict", "child": {"node": "group_masa", "family": {"family": "cyclic"}}, "atoms": []}',
])
def test_bad_recipes(text):
    with pytest.raises(RecipeError):
        C.parse_recipe(text)


def test_shipped_recipes_parse(recipe_dir):
    names = sorted(p.stem for p in recipe_dir.glob("*.recipe"))
    assert names == ["ex41_S", "ex_a", "ex_b", "ex_c", "ex_d", "thm33_S"]
    assert C.load_recipe(recipe_dir / "ex_d.recipe") == C.ex_d(3, "R")
    assert C.load_recipe(recipe_dir / "ex_c.recipe") == C.ex_c(3)
    assert C.load_recipe(recipe_dir / "thm33_S.recipe") == C.theorem33_recipe({1, 3})
    assert C.load_recipe(recipe_dir / "ex41_S.recipe") == C.ex41_recipe((2, 5))


def test_missing_recipe_file(tmp_path):
    with pytest.raises(RecipeError):
        C.load_recipe(tmp_path / "absent.recipe")


def test_disagreement_is_reported(monkeypatch):
    monkeypatch.setattr(C, "puk_from_cosets", lambda c: PukSet({99}))
    with pytest.raises(ConsistencyError):
        C.evaluate(C.ex_a(2))


leaf = st.one_of(
    st.integers(1, 4).map(lambda n: C.GroupMasa(TwoByTwo(n))),
    st.just(C.GroupMasa(TwoByTwo(INF))),
    st.integers(1, 3).map(lambda n: C.GroupMasa(ThreeByThree(n))),
    st.just(C.GroupMasa(InfiniteUT((1, 2)))),
)
pure = st.one_of(
    leaf,
    st.tuples(leaf, leaf).map(C.Tensor),
    st.tuples(leaf, leaf, leaf).map(C.Tensor),
)


@settings(max_examples=25, deadline=None)
@given(pure, st.booleans())
def test_paths_agree_on_group_recipes(r, fp):
    if fp:
        r = C.FreeProduct(r)
    ev = C.evaluate(r)
    assert "mm" in ev.checks and ev.puk == ev.coset_puk == puk_of(ev.mm)


@settings(max_examples=20, deadline=None)
@given(st.sets(st.integers(1, 9), min_size=1, max_size=4), st.integers(0, 10 ** 6))
def test_union_formula_on_direct_sums(S, seed):
    rng = random.Random(seed)
    raw = [rng.randint(1, 9) for _ in S]
    weights = tuple(Fraction(w, sum(raw)) for w in raw)
    children = tuple(C.GroupMasa(ThreeByThree(i)) for i in sorted(S))
    ev = C.evaluate(C.FreeProduct(C.DirectSum(children, weights)))
    assert ev.puk == PukSet(S) | {INF}
    assert ev.puk == C.theorem32_formula([C.evaluate(ch).puk for ch in children])
