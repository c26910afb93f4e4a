"""Permutations of {1..n}, the Hamming metric, and cycle notation.

Internally points are 0-based; everything that crosses the I/O boundary
(cycle notation, Latin squares, reports) is 1-based.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Iterable, Sequence


class DegreeMismatch(ValueError):
    pass


class CycleSyntaxError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class Permutation:
    """A bijection on n points stored as an image tuple.

    ``images[i]`` is the image of point ``i`` (0-based).  Products follow the
    right-action convention: ``p * q`` applies ``p`` first, then ``q``.
    """

    images: tuple[int, ...]

    def __post_init__(self) -> None:
        images = tuple(self.images)
        object.__setattr__(self, "images", images)
        if not images:
            raise ValueError("degree must be at least 1")
        if sorted(images) != list(range(len(images))):
            raise ValueError(f"not a bijection: {images!r}")

    @classmethod
    def _raw(cls, images: tuple[int, ...]) -> "Permutation":
        # hot-path constructor; caller guarantees a valid bijection
        p = object.__new__(cls)
        object.__setattr__(p, "images", images)
        return p

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        if n < 1:
            raise ValueError("degree must be at least 1")
        return cls._raw(tuple(range(n)))

    @classmethod
    def from_one_based(cls, images: Sequence[int]) -> "Permutation":
        return cls(tuple(int(v) - 1 for v in images))

    @property
    def degree(self) -> int:
        return len(self.images)

    def one_based(self) -> list[int]:
        return [v + 1 for v in self.images]

    def __call__(self, i: int) -> int:
        return self.images[i]

    def __mul__(self, other: "Permutation") -> "Permutation":
        return compose(self, other)

    def __invert__(self) -> "Permutation":
        return inverse(self)

    def is_identity(self) -> bool:
        return all(i == v for i, v in enumerate(self.images))

    def fixed_points(self) -> int:
        return sum(1 for i, v in enumerate(self.images) if i == v)

    def order(self) -> int:
        from math import lcm

        return lcm(*(len(c) for c in cycles(self)), 1)

    def __str__(self) -> str:
        return format_cycles(self)

    def __repr__(self) -> str:
        return f"Permutation({format_cycles(self)!r}, degree={self.degree})"


def _check_degrees(p: Permutation, q: Permutation) -> None:
    if len(p.images) != len(q.images):
        raise DegreeMismatch(f"degrees differ: {p.degree} vs {q.degree}")


def identity(n: int) -> Permutation:
    return Permutation.identity(n)


def compose(p: Permutation, q: Permutation) -> Permutation:
    """Apply ``p`` then ``q``: ``i -> q(p(i))``."""
    _check_degrees(p, q)
    qi = q.images
    return Permutation._raw(tuple(qi[v] for v in p.images))


def inverse(p: Permutation) -> Permutation:
    inv = [0] * len(p.images)
    for i, v in enumerate(p.images):
        inv[v] = i
    return Permutation._raw(tuple(inv))


def hamming_distance(p: Permutation, q: Permutation) -> int:
    _check_degrees(p, q)
    return sum(1 for a, b in zip(p.images, q.images) if a != b)


def min_distance(code: Iterable[Permutation]) -> int:
    words = list(dict.fromkeys(code))
    if len(words) < 2:
        raise ValueError("minimum distance needs at least 2 distinct codewords")
    n = words[0].degree
    if any(w.degree != n for w in words):
        raise DegreeMismatch("codewords have mixed degrees")
    # large codes go through the vectorised path in codes.py
    if len(words) > 64:
        from .codes import distance_matrix

        import numpy as np

        d = distance_matrix(words)
        np.fill_diagonal(d, n + 1)
        return int(d.min())
    return min(hamming_distance(a, b) for a, b in itertools.combinations(words, 2))


def set_distance(S: Iterable[Permutation], T: Iterable[Permutation]) -> int:
    S, T = list(S), list(T)
    if not S or not T:
        raise ValueError("set distance of an empty set is undefined")
    return min(hamming_distance(a, b) for a in S for b in T)


def cycles(p: Permutation) -> list[tuple[int, ...]]:
    """Nontrivial cycles (0-based), each starting at its least point, sorted."""
    seen = [False] * p.degree
    out = []
    for start in range(p.degree):
        if seen[start] or p.images[start] == start:
            seen[start] = True
            continue
        cyc = [start]
        seen[start] = True
        j = p.images[start]
        while j != start:
            cyc.append(j)
            seen[j] = True
            j = p.images[j]
        out.append(tuple(cyc))
    return out


_CYCLE = re.compile(r"\(([^()]*)\)")
_CYCLES_FULL = re.compile(r"\s*(?:\(\s*\d+(?:\s*,\s*\d+)*\s*\)\s*)+")


def parse_cycles(text: str, degree: int) -> Permutation:
    """Parse disjoint-cycle notation such as ``(1, 2, 3)(4, 5)`` or ``Id``."""
    if degree < 1:
        raise ValueError("degree must be at least 1")
    src = text.strip()
    if src == "Id":
        return Permutation.identity(degree)
    if not _CYCLES_FULL.fullmatch(src):
        raise CycleSyntaxError(f"malformed cycle notation: {text[:60]!r}")
    images = list(range(degree))
    used: set[int] = set()
    for body in _CYCLE.findall(src):
        pts = [int(tok) for tok in body.split(",")]
        if len(pts) < 2:
            raise CycleSyntaxError(f"cycle of length 1: ({body.strip()})")
        for a in pts:
            if a < 1 or a > degree:
                raise CycleSyntaxError(f"point {a} outside 1..{degree}")
            if a in used:
                raise CycleSyntaxError(f"point {a} repeated (cycles not disjoint)")
            used.add(a)
        for a, b in zip(pts, pts[1:] + pts[:1]):
            images[a - 1] = b - 1
    return Permutation._raw(tuple(images))


def format_cycles(p: Permutation) -> str:
    cs = cycles(p)
    if not cs:
        return "Id"
    return "".join("(" + ", ".join(str(v + 1) for v in c) + ")" for c in cs)
