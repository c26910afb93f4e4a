from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import iso_elements, perms
from molskit.datasets import assemble, e_group, load_dataset
from molskit.groups import cyclic, parse_group_spec, regular_representation
from molskit.isometry import (
    BlockStructureError,
    GroupTooLarge,
    IsoElement,
    NotInvariant,
    act,
    decompose,
    delta,
    diagonal,
    diagonal_conjugator,
    embed_phi,
    generate_group,
    is_stabilized,
    iso_compose,
    orbit,
    orbit_split,
    phi,
    stabilizer,
    swap_element,
)
from molskit.perm import Permutation, compose, hamming_distance, inverse, parse_cycles


def oracle_act(b: Permutation, g: IsoElement) -> Permutation:
    """b * b1 = b1^-1 b, b * b2 = b phi(b2), b * t = b^-1, applied factor by factor."""
    n = b.degree
    img = g.inner.images
    swap = img[0] >= n
    if swap:
        b1 = [img[i] - n for i in range(n)]
        b2 = [img[n + i] for i in range(n)]
    else:
        b1 = [img[i] for i in range(n)]
        b2 = [img[n + i] - n for i in range(n)]
    c = compose(inverse(Permutation(tuple(b1))), b)
    c = compose(c, Permutation(tuple(b2)))
    return inverse(c) if swap else c


def test_block_structure_validation():
    with pytest.raises(BlockStructureError):
        IsoElement(Permutation((3, 1, 2, 0, 4, 5)))
    with pytest.raises(BlockStructureError):
        IsoElement(parse_cycles("(1, 2)", 5))
    assert IsoElement(parse_cycles("(1, 4)(2, 5)(3, 6)", 6)).block_swap


def test_decompose_examples():
    n = 35
    t = swap_element(n)
    b1, b2, s = decompose(t)
    assert b1.is_identity() and b2.is_identity() and s
    y1 = dict(load_dataset("n35").u_generators)["y_1"]
    assert y1 == t
    x = dict(load_dataset("n35").e_generators)["x"]
    b1, b2, s = decompose(embed_phi(x, n))
    assert b1 == x and b2.is_identity() and not s


def test_phi_examples():
    assert phi(Permutation.identity(10)).is_identity()
    assert phi(parse_cycles("(6, 7)", 10)) == parse_cycles("(1, 2)", 5)
    x = parse_cycles("(1, 2, 3, 4, 5)", 5)
    t = swap_element(5)
    conj = iso_compose(iso_compose(t, embed_phi(x, 5)), t)
    assert phi(conj.inner) == x
    with pytest.raises(BlockStructureError):
        phi(parse_cycles("(1, 2)", 10))


def test_embed_phi():
    assert embed_phi(Permutation.identity(3), 5) == IsoElement.identity(5)
    assert not embed_phi(parse_cycles("(1, 2, 3)", 35), 35).block_swap
    R = regular_representation(cyclic(35))
    assert generate_group([embed_phi(g, 35) for g in R]).order == 35


def test_delta():
    n = 35
    assert delta([Permutation.identity(4)]) == {IsoElement.identity(4)}
    E = e_group(load_dataset("n35"))
    D = delta(E)
    assert len(D) == 35
    t = swap_element(n)
    assert all(iso_compose(d, t) == iso_compose(t, d) for d in D)
    with pytest.raises(NotInvariant):
        delta([parse_cycles("(1, 2, 3)", 3)])


def test_act_examples():
    b = parse_cycles("(1, 3)(2, 4, 5)", 5)
    assert act(b, IsoElement.identity(5)) == b
    assert act(Permutation.identity(5), swap_element(5)).is_identity()


def test_act_exhaustive_s3():
    n = 3
    S3 = [Permutation(p) for p in itertools.permutations(range(n))]
    elems = [IsoElement.from_blocks(a, b, s) for a in S3 for b in S3 for s in (False, True)]
    assert len(elems) == 72
    for b in S3:
        for g in elems:
            assert act(b, g) == oracle_act(b, g)
    rng = random.Random(0)
    for _ in range(2000):
        b = rng.choice(S3)
        g, h = rng.choice(elems), rng.choice(elems)
        assert act(b, iso_compose(g, h)) == act(act(b, g), h)


@given(st.data())
def test_right_action_laws(data):
    n = data.draw(st.integers(1, 7))
    b = data.draw(perms(degree=n))
    g = data.draw(iso_elements(n))
    h = data.draw(iso_elements(n))
    assert act(b, g) == oracle_act(b, g)
    assert act(b, iso_compose(g, h)) == act(act(b, g), h)
    assert act(b, IsoElement.identity(n)) == b
    assert act(act(b, g), ~g) == b


@given(st.data())
def test_action_is_isometry(data):
    n = data.draw(st.integers(2, 8))
    p = data.draw(perms(degree=n))
    q = data.draw(perms(degree=n))
    g = data.draw(iso_elements(n))
    assert hamming_distance(act(p, g), act(q, g)) == hamming_distance(p, q)


@given(st.data())
def test_identity_stabilized_by_delta(data):
    n = data.draw(st.integers(1, 8))
    v = data.draw(perms(degree=n))
    assert is_stabilized(Permutation.identity(n), [diagonal(v)])


def test_group_orders_published():
    for name, order in [("n35", 140), ("n48", 1152), ("n63", 3402), ("n96", 4608), ("n14", 21), ("n20", 80),
                        ("n21", 105), ("n56", 9408)]:
        ds = load_dataset(name)
        assert generate_group(ds.generators(), n=ds.n).order == order


def test_group_too_large():
    gens = load_dataset("n48").generators()
    with pytest.raises(GroupTooLarge) as info:
        generate_group(gens, limit=100)
    assert info.value.partial > 100


def test_orbits_published():
    a35 = assemble(load_dataset("n35"))
    assert a35.orbit_sizes() == [70, 70, 35]
    assert len(a35.e_orbits) == 18 and {len(o) for o in a35.e_orbits} == {1, 2}
    a48 = assemble(load_dataset("n48"))
    assert [len(o) for o in a48.e_orbits] == [24, 12, 12]
    a63 = assemble(load_dataset("n63"))
    assert a63.orbit_sizes() == [378, 63]
    assert [len(o) for o in a63.e_orbits] == [54, 9]


def test_orbit_trivial_group():
    U = generate_group([], n=4)
    assert orbit(Permutation.identity(4), U) == {Permutation.identity(4)}


def test_orbit_split_not_invariant():
    U = generate_group([swap_element(3)])
    with pytest.raises(NotInvariant):
        orbit_split([parse_cycles("(1, 2, 3)", 3)], U)


def test_n96_stabilizer_of_a():
    ds = load_dataset("n96")
    asm = assemble(ds)
    a = dict(ds.representatives)["a"]
    st_a = stabilizer(a, asm.U)
    assert len(st_a) == 8
    assert is_stabilized(a, st_a)
    assert len(st_a) * 576 == asm.U.order


@given(st.sampled_from(["Z6", "Z2xZ2", "Z2xZ4", "Z3xZ3", "Z8"]), st.randoms())
def test_diagonal_conjugator_finds_conjugates(spec, rnd):
    G = parse_group_spec(spec)
    n = G.order
    target = [diagonal(g) for g in regular_representation(G)]
    h = IsoElement.from_blocks(Permutation(tuple(rnd.sample(range(n), n))),
                               Permutation(tuple(rnd.sample(range(n), n))), False)
    K = [iso_compose(iso_compose(~h, k), h) for k in target]
    found = diagonal_conjugator(K, G)
    assert found is not None
    assert {iso_compose(iso_compose(~found, k), found) for k in K} == set(target)


def test_diagonal_conjugator_rejects_non_conjugates():
    G = cyclic(4)
    R = regular_representation(G)
    # block 2 twisted by inversion, an automorphism of Z4: still conjugate
    twisted = [IsoElement.from_blocks(R[j], R[(-j) % 4], False) for j in range(4)]
    assert diagonal_conjugator(twisted, G) is not None
    assert diagonal_conjugator([IsoElement.identity(4)] * 4, G) is None
    assert diagonal_conjugator([IsoElement.from_blocks(g, g, True) for g in R], G) is None


@given(st.data())
def test_orbit_stabilizer_divides(data):
    n = data.draw(st.integers(1, 4))
    gens = [data.draw(iso_elements(n)) for _ in range(data.draw(st.integers(0, 2)))]
    U = generate_group(gens, n=n)
    b = data.draw(perms(degree=n))
    size = len(orbit(b, U))
    assert U.order % size == 0
    assert size * len(stabilizer(b, U)) == U.order
