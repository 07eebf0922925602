import random
from fractions import Fraction
from itertools import product

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pukanszky import DomainError, INF, RecipeError, StructuralError
from pukanszky.groups import (
    Cyclic,
    InfiniteUT,
    PnSpec,
    Product,
    ThreeByThree,
    TwoByTwo,
    enumerate_ball,
    family_from_descriptor,
    family_from_shorthand,
    from_h_coordinates,
    h_ball,
    h_coordinates,
    height,
    is_in_H,
    multiply,
    odd_part,
    power,
    random_element,
    to_matrix,
    v2,
)

FAMILIES = [
    TwoByTwo(1),
    TwoByTwo(2),
    TwoByTwo(INF),
    ThreeByThree(1),
    ThreeByThree(3),
    InfiniteUT((2, 5)),
    Product((TwoByTwo(2), TwoByTwo(INF))),
    Cyclic(),
]


def matmul(a, b):
    return [[sum(a[i][k] * b[k][j] for k in range(len(b))) for j in range(len(b[0]))] for i in range(len(a))]


def test_two_by_two_product_matches_matrices():
    G = TwoByTwo(2)
    a = G.element(f=4, x=Fraction(1, 3))
    b = G.element(f=1, x=5)
    c = a * b
    assert c.data == (Fraction(4), Fraction(61, 3))
    assert to_matrix(c) == matmul(to_matrix(a), to_matrix(b))


def test_three_by_three_product_matches_matrices():
    G = ThreeByThree(1)
    rng = random.Random(7)
    for _ in range(50):
        a, b = random_element(G, rng), random_element(G, rng)
        assert to_matrix(a * b) == matmul(to_matrix(a), to_matrix(b))


def test_infinite_ut_product_matches_truncated_matrices():
    G = InfiniteUT((1, 3), window=3)
    rng = random.Random(3)
    for _ in range(30):
        a, b = random_element(G, rng, 2), random_element(G, rng, 2)
        assert to_matrix(a * b, 3) == matmul(to_matrix(a, 3), to_matrix(b, 3))


def test_diagonal_scaling_closed_form():
    # h g k for diagonal h, k rescales x by the first diagonal entry of k
    G = ThreeByThree(1)
    g = G.element(x=Fraction(5, 3), y=7)
    h = G.element(f=2, g=3)
    k = G.element(f=Fraction(1, 4), g=Fraction(5, 7))
    x, y, f, gg = (h * g * k).data
    assert (x, y) == (Fraction(5, 3) * Fraction(1, 4), 7 * Fraction(5, 7))
    assert (f, gg) == (Fraction(2, 4), Fraction(15, 7))


def test_identity_is_neutral():
    for fam in FAMILIES:
        e = fam.identity()
        for g in list(enumerate_ball(fam, 1))[:40]:
            assert e * g == g == g * e


def test_family_mismatch():
    with pytest.raises(StructuralError):
        multiply(TwoByTwo(1).identity(), TwoByTwo(2).identity())


def test_membership_in_H():
    assert is_in_H(ThreeByThree(2).identity())
    assert not TwoByTwo(1).element(x=1).in_H
    assert ThreeByThree(1).element(f=3, g=5).in_H


def test_parameters_are_validated():
    with pytest.raises(DomainError):
        TwoByTwo(2).element(f=2)
    with pytest.raises(DomainError):
        ThreeByThree(1).element(g=2)
    with pytest.raises(TypeError):
        TwoByTwo(1).element(x=0.5)


def test_ball_of_height_zero_is_identity():
    for fam in FAMILIES:
        assert list(enumerate_ball(fam, 0)) == [fam.identity()]


def test_two_by_two_ball_of_height_one():
    ball = list(enumerate_ball(TwoByTwo(1), 1))
    fs = {Fraction(s) * Fraction(2) ** e for s in (1, -1) for e in (-1, 0, 1)}
    xs = {Fraction(0), Fraction(1), Fraction(-1)}
    assert {g.data for g in ball} == set(product(fs, xs))
    assert len(ball) == 18


def test_ball_is_duplicate_free_and_bounded():
    for fam in FAMILIES:
        ball = list(enumerate_ball(fam, 2))
        assert len(set(ball)) == len(ball)
        assert all(height(g) <= 2 for g in ball)


def test_ball_order_is_deterministic():
    fam = ThreeByThree(2)
    assert list(enumerate_ball(fam, 1)) == list(enumerate_ball(fam, 1))


def test_negative_height():
    with pytest.raises(DomainError):
        list(enumerate_ball(TwoByTwo(1), -1))


def test_h_ball_matches_filtered_ball():
    for fam in FAMILIES:
        assert h_ball(fam, 2) == [g for g in enumerate_ball(fam, 2) if g.in_H]


@pytest.mark.parametrize("fam", FAMILIES, ids=lambda f: f.name)
def test_group_axioms_on_ball(fam):
    ball = list(enumerate_ball(fam, 2))
    rng = random.Random(11)
    for a in ball:
        assert a * a.inverse() == fam.identity() == a.inverse() * a
    for _ in range(400):
        a, b, c = rng.choice(ball), rng.choice(ball), rng.choice(ball)
        assert a * (b * c) == (a * b) * c


@pytest.mark.parametrize("fam", FAMILIES, ids=lambda f: f.name)
def test_H_is_abelian(fam):
    hs = h_ball(fam, 2)
    for a in hs[:60]:
        for b in hs[:60]:
            assert a * b == b * a


def test_unipotent_subgroup_is_normal():
    G = ThreeByThree(2)
    rng = random.Random(5)
    for _ in range(100):
        h = random_element(G, rng, 3, in_H=True)
        n = G.element(x=random_element(G, rng).data[0], y=random_element(G, rng).data[1])
        c = h * n * h.inverse()
        assert c.data[2:] == (1, 1)


def test_power():
    g = ThreeByThree(1).element(x=1, f=3, g=5)
    assert power(g, 0) == g.family.identity()
    assert power(g, 3) == g * g * g
    assert power(g, -2) == (g * g).inverse()
    assert g ** 5 == power(g, 5)


odd = st.integers(-40, 40).map(lambda k: 2 * k + 1)
rationals = st.builds(Fraction, st.integers(-200, 200).filter(bool), st.integers(1, 200))


@given(rationals, rationals)
def test_v2_is_a_valuation(r, s):
    assert v2(r * s) == v2(r) + v2(s)
    assert odd_part(r).numerator % 2 and odd_part(r).denominator % 2


def test_v2_of_zero():
    with pytest.raises(DomainError):
        v2(0)


@given(st.integers(1, 6), odd, odd, st.integers(-5, 5), odd, odd, st.integers(-5, 5))
def test_pn_closed_under_products(n, p1, q1, j1, p2, q2, j2):
    P = PnSpec(n)
    f = Fraction(p1, q1) * Fraction(2) ** (n * j1)
    g = Fraction(p2, q2) * Fraction(2) ** (n * j2)
    assert f in P and g in P
    assert f * g in P and 1 / f in P


@given(st.integers(2, 8))
def test_pn_generators(n):
    P = PnSpec(n)
    assert 2 not in P
    assert 2 ** n in P
    assert Fraction(1, 2 ** n) in P
    assert 0 not in P


def test_p_infinity():
    P = PnSpec(INF)
    assert Fraction(3, 7) in P and Fraction(-5) in P
    assert 2 not in P and Fraction(1, 2) not in P
    assert P.label == "Pinf"


@settings(max_examples=50)
@given(st.integers(0, 10 ** 6))
def test_h_coordinates_round_trip(seed):
    rng = random.Random(seed)
    for fam in FAMILIES:
        h = random_element(fam, rng, 2, in_H=True)
        assert from_h_coordinates(fam, h_coordinates(h)) == h


def test_infinite_ut_exponents_cycle():
    G = InfiniteUT((5, 2))
    assert G.S == (2, 5)
    assert [G.exponent(j) for j in range(1, 7)] == [2, 5, 2, 5, 2, 5]
    with pytest.raises(DomainError):
        InfiniteUT(())


def test_descriptors_round_trip():
    for fam in FAMILIES:
        assert family_from_descriptor(fam.descriptor()) == fam


def test_shorthand():
    assert family_from_shorthand("two_by_two:3") == TwoByTwo(3)
    assert family_from_shorthand("three_by_three:inf") == ThreeByThree(INF)
    assert family_from_shorthand("infinite_ut:2,5") == InfiniteUT((2, 5))
    assert family_from_shorthand("cyclic") == Cyclic()


def test_bad_descriptors():
    for bad in [{}, {"family": "nope"}, {"family": "two_by_two"}, {"family": "two_by_two", "n": 0}, [1]]:
        with pytest.raises(RecipeError):
            family_from_descriptor(bad)
