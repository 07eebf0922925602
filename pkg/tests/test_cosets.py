import random
from fractions import Fraction
from itertools import combinations

import pytest

from pukanszky import INF, CriterionInapplicable, DomainError, PukSet
from pukanszky.cosets import (
    CosetClass,
    CosetClassification,
    ball_restriction,
    check_noncommensurable,
    classify,
    coset_invariant,
    coset_representative,
    double_coset_witness,
    exceptional_k_set,
    free_product_cosets,
    puk_from_cosets,
    stabilizer,
    stabilizer_bruteforce,
)
from pukanszky.groups import (
    CoordType,
    Cyclic,
    InfiniteUT,
    Product,
    ThreeByThree,
    TwoByTwo,
    enumerate_ball,
    h_ball,
    h_coordinates,
    random_element,
)
from pukanszky.subgroups import SubgroupSpec

G3 = ThreeByThree(2)


def test_stabilizer_closed_forms():
    f, g = G3.coordinates()
    assert stabilizer(G3.element(x=3)) == SubgroupSpec.anti([g])
    assert stabilizer(G3.element(y=Fraction(1, 5))) == SubgroupSpec.anti([f])
    assert stabilizer(G3.element(x=1, y=2)).is_trivial
    assert stabilizer(TwoByTwo(4).element(x=7, f=16)).is_trivial


def test_stabilizer_for_support_T():
    G = InfiniteUT((2, 5), window=3)
    K = stabilizer(G.element(x={1: 1, 3: 4}))
    assert str(K) == "anti:f2;anti:tail"


def test_stabilizer_of_diagonal_element():
    with pytest.raises(DomainError):
        stabilizer(G3.element(f=4))


def test_stabilizer_outside_window():
    with pytest.raises(DomainError):
        stabilizer(InfiniteUT((1,), window=2).element(x={5: 1}))


def test_bruteforce_trivial_stabilizer():
    G = TwoByTwo(2)
    e = G.identity()
    assert stabilizer_bruteforce(G.element(x=1), 3) == {(e, e)}


def test_bruteforce_matches_first_stabilizer():
    g = ThreeByThree(1).element(x=1)
    found = stabilizer_bruteforce(g, 2)
    assert found == ball_restriction(stabilizer(g), g.family, 2)
    assert len(found) == len({h for h, _ in found}) > 1
    for h, k in found:
        assert h * g * k == g
        assert h.data[2] == 1 and h.data[3] * k.data[3] == 1


EXHAUSTIVE = [TwoByTwo(1), TwoByTwo(2), TwoByTwo(INF), ThreeByThree(1), ThreeByThree(2), ThreeByThree(INF)]


@pytest.mark.parametrize("fam", EXHAUSTIVE, ids=lambda f: f.name)
def test_closed_form_matches_bruteforce_on_ball(fam):
    for g in enumerate_ball(fam, 2):
        if not g.in_H:
            assert stabilizer_bruteforce(g, 3) == ball_restriction(stabilizer(g), fam, 3)


@pytest.mark.parametrize("fam", [InfiniteUT((2, 5)), Product((TwoByTwo(1), TwoByTwo(INF)))],
                         ids=lambda f: f.name)
def test_closed_form_matches_bruteforce_sampled(fam):
    ball = [g for g in enumerate_ball(fam, 2) if not g.in_H]
    for g in random.Random(2).sample(ball, 120):
        assert stabilizer_bruteforce(g, 3) == ball_restriction(stabilizer(g), fam, 3)


def test_stabilizer_is_a_subgroup():
    rng = random.Random(4)
    for fam in [G3, InfiniteUT((1, 3)), Product((TwoByTwo(2), ThreeByThree(1)))]:
        for _ in range(10):
            g = random_element(fam, rng, 2, in_H=False)
            pairs = list(stabilizer_bruteforce(g, 2))
            K = stabilizer(g)
            for (h1, k1), (h2, k2) in zip(pairs, pairs[::-1]):
                h, k = h1 * h2.inverse(), k1 * k2.inverse()
                assert h * g * k == g
                assert K.contains(h_coordinates(h), h_coordinates(k))


def test_two_by_two_classification():
    for n in range(1, 5):
        c = classify(TwoByTwo(n))
        assert len(c.classes) == 1
        (cl,) = c.classes
        assert cl.coset_count == n and cl.stabilizer.is_trivial
        assert puk_from_cosets(c) == {n}


def test_three_by_three_classification():
    c = classify(ThreeByThree(3))
    assert c.counts() == [3, INF, INF]
    assert [str(cl.stabilizer) for cl in c.classes] == ["anti:g", "anti:f", "e"]
    assert puk_from_cosets(c) == {3, INF}
    assert puk_from_cosets(classify(ThreeByThree(INF))) == {INF}


def test_infinite_ut_classification():
    G = InfiniteUT((2, 5))
    c = classify(G)
    singles = [cl for cl in c.classes if cl.coset_count != INF]
    assert sorted(cl.coset_count for cl in singles) == [2, 5]
    assert all(len(cl.label.split(",")) > 1 for cl in c.classes if cl.coset_count == INF)
    assert puk_from_cosets(c) == {2, 5, INF}


def test_cyclic_has_no_nontrivial_cosets():
    assert classify(Cyclic()).classes == ()
    assert puk_from_cosets(classify(Cyclic())) == PukSet()


def test_product_classification():
    c = classify(Product((TwoByTwo(2), TwoByTwo(3))))
    counts = sorted(c.counts())
    assert counts == [2, 3, 6]


def test_finite_class_representatives_are_distinct():
    for fam in [TwoByTwo(3), ThreeByThree(2), InfiniteUT((2, 3))]:
        for cl in classify(fam).classes:
            reps = cl.representatives
            assert len({coset_invariant(r) for r in reps}) == len(reps)
            for r, s in combinations(reps, 2):
                assert double_coset_witness(r, s, 3) is None


def test_infinite_parametrizations_are_injective():
    for fam in [ThreeByThree(2), InfiniteUT((2, 5)), TwoByTwo(INF)]:
        for cl in classify(fam).classes:
            if cl.coset_count == INF:
                sample = cl.sample(6)
                assert len({coset_invariant(g) for g in sample}) == len(sample)
                assert all(stabilizer(g) == cl.stabilizer for g in sample)


def test_representative_lies_in_the_same_double_coset():
    rng = random.Random(8)
    for fam in [TwoByTwo(3), ThreeByThree(2), InfiniteUT((1, 2))]:
        for _ in range(30):
            g = random_element(fam, rng, 3, in_H=False)
            r = coset_representative(g)
            assert coset_invariant(r) == coset_invariant(g)
            assert stabilizer(r) == stabilizer(g)


def test_invariant_is_constant_on_double_cosets():
    rng = random.Random(9)
    fam = ThreeByThree(3)
    for _ in range(50):
        g = random_element(fam, rng, 3, in_H=False)
        h = random_element(fam, rng, 3, in_H=True)
        k = random_element(fam, rng, 3, in_H=True)
        assert coset_invariant(h * g * k) == coset_invariant(g)


def test_ball_partition_into_two_double_cosets():
    # union-find over ball(4) of TwoByTwo(2), joining a with h a k for h, k in the H-ball
    fam = TwoByTwo(2)
    ball = [g for g in enumerate_ball(fam, 4) if not g.in_H]
    index = {g: i for i, g in enumerate(ball)}
    parent = list(range(len(ball)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    hs = h_ball(fam, 4)
    for a in ball:
        for h in hs:
            ha = h * a
            for k in hs:
                j = index.get(ha * k)
                if j is not None:
                    parent[find(j)] = find(index[a])
    assert len({find(i) for i in range(len(ball))}) == 2


def test_guard_fires_on_commensurable_stabilizers():
    P3 = CoordType("P", 3)
    classes = [
        CosetClass("a", SubgroupSpec.of(("f", P3, "anti")), 1, (None,)),
        CosetClass("b", SubgroupSpec.of(("f", P3, "anti", 2)), 1, (None,)),
    ]
    with pytest.raises(CriterionInapplicable):
        check_noncommensurable(classes)


def test_classification_rejects_repeated_stabilizers():
    cl = CosetClass("a", SubgroupSpec.trivial(), 1, (None,))
    with pytest.raises(ValueError):
        CosetClassification(TwoByTwo(1), (cl, cl))


def test_class_count_needs_certificate():
    with pytest.raises(ValueError):
        CosetClass("a", SubgroupSpec.trivial(), INF)
    with pytest.raises(ValueError):
        CosetClass("a", SubgroupSpec.trivial(), 3, (None,))


def test_puk_ignores_class_order():
    c = classify(ThreeByThree(2))
    rev = CosetClassification(c.family, tuple(reversed(c.classes)))
    assert puk_from_cosets(rev) == puk_from_cosets(c)


def test_free_product_cosets():
    for n in range(1, 5):
        c = free_product_cosets(classify(TwoByTwo(n)))
        assert puk_from_cosets(c) == {INF}
    c = free_product_cosets(classify(Cyclic()))
    assert puk_from_cosets(c) == {INF}
    words = c.classes[0].sample(3)
    assert len(set(words)) == len(words)


def test_exceptional_set_generic_pairs():
    rng = random.Random(12)
    G = ThreeByThree(1)
    v = G.element(f=3, g=5)
    for _ in range(40):
        g1 = random_element(G, rng, 3, in_H=False)
        g2 = random_element(G, rng, 3, in_H=False)
        e = exceptional_k_set(g1, g2, v, 20)
        assert len(e.ks) <= 1 and e.certified


def test_exceptional_set_with_a_root():
    G = ThreeByThree(1)
    v = G.element(f=3, g=5)
    g1 = G.element(x=1)
    g2 = G.element(x=-9)
    # x entry: -9 + 3^k vanishes at k = 2, and y stays 0
    e = exceptional_k_set(g1, g2, v, 20)
    assert e.ks == {2} and e.certified
    assert e.certificate.entry_at(2) == 0


def test_exceptional_set_with_identity_v():
    G = ThreeByThree(1)
    g1 = G.element(x=1, y=2)
    e = exceptional_k_set(g1, g1.inverse(), G.identity(), 5)
    assert e.ks == set(range(-5, 6))
    assert not e.certified


def test_exceptional_set_is_stable_in_the_bound():
    rng = random.Random(13)
    G = ThreeByThree(2)
    v = G.element(f=3, g=5)
    for _ in range(20):
        g1 = random_element(G, rng, 2, in_H=False)
        g2 = random_element(G, rng, 2, in_H=False)
        assert exceptional_k_set(g1, g2, v, 10).ks == exceptional_k_set(g1, g2, v, 30).ks


def test_exceptional_set_needs_diagonal_v():
    G = ThreeByThree(1)
    with pytest.raises(DomainError):
        exceptional_k_set(G.element(x=1), G.element(x=1), G.element(x=1))
