from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from molskit.groups import (
    check_group_axioms,
    cyclic,
    direct_product,
    group_from_regular,
    match_regular_group,
    parse_group_spec,
    regular_representation,
)
from molskit.perm import Permutation, compose, inverse, min_distance, parse_cycles


def test_cyclic_basics():
    assert cyclic(1).order == 1
    assert cyclic(35).order == 35
    Z2 = cyclic(2)
    assert Z2.mul(1, 1) == 0
    with pytest.raises(ValueError):
        cyclic(0)


@pytest.mark.parametrize("spec,order", [("Z6xZ2xZ2xZ2", 48), ("Z3xZ21", 63), ("Z2xZ2xZ2xZ2xZ6", 96), ("Z5xZ1", 5)])
def test_products(spec, order):
    G = parse_group_spec(spec)
    assert G.order == order
    assert G.labels[G.identity] == tuple([0] * len(G.labels[0]))
    assert G.is_abelian()


def test_small_products_satisfy_axioms():
    for spec in ["Z2xZ2", "Z3xZ4", "Z2xZ3xZ2"]:
        check_group_axioms(parse_group_spec(spec))


def test_bad_specs():
    for spec in ["Z0", "Q8", "Z3*Z5", ""]:
        with pytest.raises(ValueError):
            parse_group_spec(spec)


def test_regular_representation_examples():
    R2 = regular_representation(cyclic(2))
    assert set(R2) == {Permutation((0, 1)), Permutation((1, 0))}
    # gamma_1 of Z35 under the natural labelling is the 35-cycle x
    x = parse_cycles("(" + ", ".join(str(i) for i in range(1, 36)) + ")", 35)
    assert x in regular_representation(cyclic(35))


def test_regular_representation_is_sharply_transitive():
    for spec in ["Z2", "Z7", "Z2xZ2", "Z3xZ3", "Z2xZ6", "Z24", "Z2xZ2xZ2xZ3"]:
        G = parse_group_spec(spec)
        R = regular_representation(G)
        assert len(set(R)) == G.order
        if G.order > 1:
            assert min_distance(R) == G.order
        # gamma_j gamma_k = gamma_{g_j g_k}
        for j, k in itertools.product(range(G.order), repeat=2):
            assert compose(R[j], R[k]) == R[G.mul(j, k)]


@given(st.sampled_from(["Z6", "Z2xZ3", "Z2xZ2xZ2", "Z4xZ2", "Z9", "Z3xZ3", "Z12", "Z2xZ6"]), st.randoms())
def test_match_regular_group_recovers_conjugates(spec, rnd):
    G = parse_group_spec(spec)
    n = G.order
    R = regular_representation(G)
    sigma = Permutation(tuple(rnd.sample(range(n), n)))
    conj = [compose(compose(inverse(sigma), g), sigma) for g in R]
    lam = match_regular_group(conj, G)
    assert lam is not None
    Rs = set(R)
    moved = {compose(compose(inverse(lam), e), lam) for e in conj}
    assert moved == Rs


def test_match_rejects_wrong_isomorphism_type():
    R = regular_representation(parse_group_spec("Z2xZ2xZ2"))
    assert match_regular_group(R, cyclic(8)) is None
    assert match_regular_group(regular_representation(cyclic(8)), parse_group_spec("Z2xZ4")) is None
    # not regular: a point stabilizer is non-trivial
    e = Permutation.identity(4)
    t = parse_cycles("(1, 2)", 4)
    assert match_regular_group([e, t, parse_cycles("(3, 4)", 4), parse_cycles("(1, 2)(3, 4)", 4)],
                               parse_group_spec("Z2xZ2")) is None


def test_element_formatting():
    G = parse_group_spec("Z3xZ21")
    a = G.index((2, 5))
    assert G.format_element(a) == "(2,5)"
    assert G.parse_element("(2,5)") == a
    assert cyclic(7).format_element(3) == "3"
    with pytest.raises(ValueError):
        G.parse_element("(3,0)")


def test_element_order_and_inverse():
    G = parse_group_spec("Z2xZ6")
    rng = random.Random(1)
    for _ in range(30):
        a = rng.randrange(G.order)
        assert G.mul(a, G.inv(a)) == G.identity
        k = G.element_order(a)
        assert 12 % k == 0


def test_group_from_regular():
    R = regular_representation(parse_group_spec("Z2xZ3"))
    G = group_from_regular(R)
    assert G.order == 6 and G.identity == 0
    assert regular_representation(G) == sorted(R, key=lambda g: g.images[0])
    # a non-abelian regular group: S3 acting on itself
    S3 = [Permutation(p) for p in itertools.permutations(range(3))]
    table = {(a, b): S3.index(compose(a, b)) for a in S3 for b in S3}
    right = [Permutation(tuple(table[(a, g)] for a in S3)) for g in S3]
    H = group_from_regular(right)
    assert H is not None and H.order == 6
    assert any(H.mul(a, b) != H.mul(b, a) for a in range(6) for b in range(6))
    assert group_from_regular(right[:4]) is None
    assert group_from_regular([Permutation.identity(3), Permutation((1, 0, 2)), Permutation((2, 1, 0))]) is None
