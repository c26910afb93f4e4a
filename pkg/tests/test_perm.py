from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import perm_pairs, perms
from molskit.datasets import DATASET_NAMES, load_dataset
from molskit.perm import (
    CycleSyntaxError,
    DegreeMismatch,
    Permutation,
    compose,
    cycles,
    format_cycles,
    hamming_distance,
    identity,
    inverse,
    min_distance,
    parse_cycles,
    set_distance,
)


def P(*one_based):
    return Permutation.from_one_based(one_based)


def test_compose_hand_oracle():
    # (1,2) then (2,3): 1 -> 2 -> 3, 2 -> 1 -> 1, 3 -> 3 -> 2
    r = compose(parse_cycles("(1, 2)", 3), parse_cycles("(2, 3)", 3))
    assert r.one_based() == [3, 1, 2]
    assert format_cycles(r) == "(1, 3, 2)"
    assert compose(identity(3), identity(3)) == identity(3)
    t = parse_cycles("(1, 2)", 2)
    assert compose(t, t) == identity(2)


def test_inverse_examples():
    assert inverse(identity(5)) == identity(5)
    assert format_cycles(inverse(parse_cycles("(1, 2, 3)", 3))) == "(1, 3, 2)"


def test_hamming_examples():
    assert hamming_distance(identity(5), identity(5)) == 0
    assert hamming_distance(identity(5), parse_cycles("(1, 2)", 5)) == 2
    assert hamming_distance(parse_cycles("(1, 2)", 3), parse_cycles("(1, 3)", 3)) == 3


def test_min_and_set_distance():
    assert min_distance([identity(2), parse_cycles("(1, 2)", 2)]) == 2
    assert set_distance([identity(3)], [identity(3)]) == 0
    assert set_distance([identity(3)], [parse_cycles("(1, 2, 3)", 3)]) == 3
    with pytest.raises(ValueError):
        min_distance([identity(3)])
    with pytest.raises(ValueError):
        set_distance([], [identity(3)])


def test_min_distance_brute_force_s4():
    rng = random.Random(4)
    s4 = [Permutation(p) for p in itertools.permutations(range(4))]
    for _ in range(200):
        code = rng.sample(s4, 5)
        brute = min(sum(a != b for a, b in zip(p.images, q.images)) for p, q in itertools.combinations(code, 2))
        assert min_distance(code) == brute


def test_min_distance_large_path_matches_loops():
    rng = random.Random(7)
    words = list({Permutation(tuple(rng.sample(range(9), 9))) for _ in range(120)})
    brute = min(hamming_distance(p, q) for p, q in itertools.combinations(words, 2))
    assert min_distance(words) == brute


def test_degree_mismatch():
    with pytest.raises(DegreeMismatch):
        compose(identity(3), identity(4))
    with pytest.raises(DegreeMismatch):
        hamming_distance(identity(3), identity(4))


def test_permutation_validation():
    with pytest.raises(ValueError):
        Permutation((0, 0, 1))
    with pytest.raises(ValueError):
        Permutation(())


@pytest.mark.parametrize(
    "text,degree",
    [
        ("(1, 2", 3),
        ("(1)", 3),
        ("(1, 2)(2, 3)", 3),
        ("(1, 4)", 3),
        ("(0, 1)", 3),
        ("1, 2", 3),
        ("(1, 2) x", 3),
        ("", 3),
    ],
)
def test_parse_errors(text, degree):
    with pytest.raises(CycleSyntaxError):
        parse_cycles(text, degree)


def test_parse_identity_and_whitespace():
    assert parse_cycles("Id", 14) == identity(14)
    p = parse_cycles(" (1,\n 2, 3)\n\t(5 ,6) ", 6)
    assert p.one_based() == [2, 3, 1, 4, 6, 5]


def test_parse_published_n63_examples():
    x1 = load_dataset("n63").e_generators[0][1]
    assert x1.order() == 3 and x1.fixed_points() == 0 and x1.degree == 63
    b = dict(load_dataset("n63").representatives)["b"]
    assert b.degree == 63 and b(0) == 0
    assert format_cycles(b).startswith("(2, 3)(4, 7)(5, 9)(6, 8)(10, 47, 17, 46, 15, 48)")


def test_format_canonical():
    assert format_cycles(identity(7)) == "Id"
    assert format_cycles(P(2, 1, 3)) == "(1, 2)"
    # rotated, unsorted input comes out canonical
    assert format_cycles(parse_cycles("(5, 4)(3, 1, 2)", 5)) == "(1, 2, 3)(4, 5)"
    assert cycles(parse_cycles("(3, 1, 2)", 4)) == [(0, 1, 2)]


def _all_published_texts():
    from molskit.datasets import data_dir

    for name in DATASET_NAMES:
        ds = load_dataset(name)
        for _, p in ds.e_generators + ds.representatives:
            yield p
        for _, g in ds.u_generators + ds.certificate:
            yield g.inner
    assert data_dir().exists()


def test_round_trip_all_published_generators():
    count = 0
    for p in _all_published_texts():
        text = format_cycles(p)
        assert parse_cycles(text, p.degree) == p
        assert format_cycles(parse_cycles(text, p.degree)) == text
        count += 1
    assert count > 30


@given(perms())
def test_format_parse_round_trip(p):
    text = format_cycles(p)
    assert parse_cycles(text, p.degree) == p
    assert format_cycles(parse_cycles(text, p.degree)) == text


@given(perms(min_degree=2))
def test_inverse_property(p):
    assert compose(p, inverse(p)) == identity(p.degree)
    assert compose(inverse(p), p) == identity(p.degree)


@given(perm_pairs(min_degree=2))
def test_hamming_metric_laws(pq):
    p, q = pq
    d = hamming_distance(p, q)
    assert d == hamming_distance(q, p)
    assert (d == 0) == (p == q)
    assert d != 1
    # fixed-point formulation, the tested equivalence
    assert d == p.degree - compose(inverse(p), q).fixed_points()
    assert d == hamming_distance(inverse(p), inverse(q))


@given(st.data())
def test_hamming_left_right_invariance(data):
    n = data.draw(st.integers(2, 9))
    p, q, r = (data.draw(perms(degree=n)) for _ in range(3))
    d = hamming_distance(p, q)
    assert hamming_distance(compose(r, p), compose(r, q)) == d
    assert hamming_distance(compose(p, r), compose(q, r)) == d


@given(st.data())
def test_compose_associative_s8(data):
    p, q, r = (data.draw(perms(degree=8)) for _ in range(3))
    assert compose(compose(p, q), r) == compose(p, compose(q, r))
    e = identity(8)
    assert compose(e, p) == p == compose(p, e)
