"""Permutation arrays, separability, and the code <-> MOLS correspondence."""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

from .perm import DegreeMismatch, Permutation


class SeparabilityError(ValueError):
    """Raised when a code is not separable; ``witness`` names the offending pair."""

    def __init__(self, message: str, witness: tuple[Permutation, ...] = ()):
        super().__init__(message)
        self.witness = witness


class NotLatin(ValueError):
    pass


@dataclass(frozen=True)
class PermutationCode:
    n: int
    words: frozenset[Permutation]

    def __post_init__(self) -> None:
        words = frozenset(self.words)
        object.__setattr__(self, "words", words)
        for w in words:
            if w.degree != self.n:
                raise DegreeMismatch(f"codeword of degree {w.degree} in a length-{self.n} code")

    @classmethod
    def from_words(cls, words: Iterable[Permutation]) -> "PermutationCode":
        """Build a code, rejecting duplicated words instead of silently merging them."""
        words = list(words)
        if not words:
            raise ValueError("empty code")
        seen: dict[Permutation, int] = {}
        for i, w in enumerate(words):
            if w in seen:
                raise SeparabilityError(
                    f"codeword {i + 1} duplicates codeword {seen[w] + 1} (distance 0)", (w, w)
                )
            seen[w] = i
        return cls(words[0].degree, frozenset(words))

    def __len__(self) -> int:
        return len(self.words)

    def sorted_words(self) -> list[Permutation]:
        return sorted(self.words)


def as_array(words: Sequence[Permutation]) -> np.ndarray:
    return np.array([w.images for w in words], dtype=np.int32)


def agreement_matrix(words: Sequence[Permutation]) -> np.ndarray:
    """``A[i, j]`` = number of points where words i and j agree."""
    W = as_array(words)
    N, n = W.shape
    A = np.zeros((N, N), dtype=np.int32)
    for k in range(n):
        col = W[:, k]
        A += col[:, None] == col[None, :]
    return A


def distance_matrix(words: Sequence[Permutation]) -> np.ndarray:
    words = list(words)
    n = words[0].degree
    return n - agreement_matrix(words)


def cross_distance(A: Sequence[Permutation], B: Sequence[Permutation]) -> np.ndarray:
    WA, WB = as_array(A), as_array(B)
    n = WA.shape[1]
    agree = np.zeros((len(WA), len(WB)), dtype=np.int32)
    for k in range(n):
        agree += WA[:, k][:, None] == WB[:, k][None, :]
    return n - agree


@dataclass(frozen=True)
class PAReport:
    size: int
    min_distance: int
    ok: bool
    witness: Optional[tuple[Permutation, Permutation]] = None


def verify_pa(code: PermutationCode, d: int) -> PAReport:
    words = code.sorted_words()
    if len(words) < 2:
        raise ValueError("a permutation array needs at least 2 codewords")
    D = distance_matrix(words)
    np.fill_diagonal(D, code.n + 1)
    i, j = np.unravel_index(int(np.argmin(D)), D.shape)
    md = int(D[i, j])
    return PAReport(len(words), md, md >= d, (words[i], words[j]))


@dataclass(frozen=True)
class SeparabilityPartition:
    r: int
    m: int
    classes: tuple[tuple[Permutation, ...], ...]

    @property
    def n(self) -> int:
        return self.classes[0][0].degree


def distance_classes(words: Sequence[Permutation]) -> list[tuple[Permutation, ...]]:
    """Classes of the "distance n or equal" relation, for codes of min distance >= n-1.

    Class sizes may differ; :func:`separability_partition` adds that check.
    Classes come back sorted by their least word, each class sorted.
    """
    words = sorted(set(words))
    n = words[0].degree
    D = distance_matrix(words)
    N = len(words)
    np.fill_diagonal(D, n)
    low = np.argwhere(D < n - 1)
    if len(low):
        i, j = low[0]
        raise SeparabilityError(
            f"distance {D[i, j]} < n-1 between two codewords", (words[i], words[j])
        )
    rel = D == n
    label = [-1] * N
    classes = []
    for i in range(N):
        if label[i] >= 0:
            continue
        members = np.flatnonzero(rel[i])
        cid = len(classes)
        for j in members:
            if label[j] >= 0:
                raise SeparabilityError(
                    "distance-n relation is not transitive", (words[i], words[j])
                )
            label[j] = cid
        block = rel[np.ix_(members, members)]
        if not block.all():
            a, b = np.argwhere(~block)[0]
            raise SeparabilityError(
                f"distance-n relation is not transitive: both at distance n from "
                f"{words[i]} but at distance n-1 from each other",
                (words[members[a]], words[members[b]]),
            )
        classes.append(tuple(words[j] for j in members))
    return classes


def separability_partition(code: PermutationCode | Iterable[Permutation]) -> SeparabilityPartition:
    words = code.words if isinstance(code, PermutationCode) else code
    classes = distance_classes(list(words))
    sizes = {len(c) for c in classes}
    if len(sizes) != 1:
        small = min(classes, key=len)
        big = max(classes, key=len)
        raise SeparabilityError(
            f"classes have unequal sizes {sorted(sizes)}", (small[0], big[0])
        )
    return SeparabilityPartition(sizes.pop(), len(classes), tuple(classes))


@dataclass(frozen=True)
class LatinSquare:
    """An n x n array over symbols 1..n with every row and column a permutation."""

    cells: tuple[tuple[int, ...], ...]

    def __post_init__(self) -> None:
        cells = tuple(tuple(int(v) for v in row) for row in self.cells)
        object.__setattr__(self, "cells", cells)
        n = len(cells)
        full = set(range(1, n + 1))
        for i, row in enumerate(cells):
            if len(row) != n or set(row) != full:
                raise NotLatin(f"row {i + 1} is not a permutation of 1..{n}")
        for j in range(n):
            if {row[j] for row in cells} != full:
                raise NotLatin(f"column {j + 1} is not a permutation of 1..{n}")

    @property
    def n(self) -> int:
        return len(self.cells)


@dataclass(frozen=True)
class MolsSet:
    n: int
    squares: tuple[LatinSquare, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "squares", tuple(self.squares))
        for s in self.squares:
            if s.n != self.n:
                raise DegreeMismatch(f"square of order {s.n} in a set of order {self.n}")
        for a in range(len(self.squares)):
            for b in range(a + 1, len(self.squares)):
                if not verify_orthogonal(self.squares[a], self.squares[b]):
                    raise NotLatin(f"squares {a + 1} and {b + 1} are not orthogonal")

    def __len__(self) -> int:
        return len(self.squares)


def verify_orthogonal(A: LatinSquare, B: LatinSquare) -> bool:
    if A.n != B.n:
        raise DegreeMismatch(f"orders differ: {A.n} vs {B.n}")
    pairs = {(a, b) for ra, rb in zip(A.cells, B.cells) for a, b in zip(ra, rb)}
    return len(pairs) == A.n * A.n


def class_to_square(cls: Sequence[Permutation]) -> LatinSquare:
    """Each word is the cell set of one symbol: ``L[i][w(i)] = symbol(w)``.

    Words are ordered by the image of point 1, so the word with ``w(1) = k``
    carries symbol ``k`` and the first row of the square reads ``1..n``.
    Two words agreeing in exactly one point then share exactly one cell, which
    is what makes squares from different classes orthogonal.
    """
    n = cls[0].degree
    if len(cls) != n:
        raise SeparabilityError(f"class has {len(cls)} words, need n={n} for a Latin square")
    cells = [[0] * n for _ in range(n)]
    for w in sorted(cls, key=lambda w: w.images[0]):
        sym = w.images[0] + 1
        for i, j in enumerate(w.images):
            if cells[i][j]:
                raise NotLatin(f"cell ({i + 1}, {j + 1}) is covered twice")
            cells[i][j] = sym
    return LatinSquare(tuple(tuple(r) for r in cells))


def square_to_words(sq: LatinSquare) -> list[Permutation]:
    """Inverse of :func:`class_to_square`: one word per symbol, ``i -> column of the symbol in row i``."""
    n = sq.n
    pos = [[0] * n for _ in range(n)]
    for i, row in enumerate(sq.cells):
        for j, sym in enumerate(row):
            pos[sym - 1][i] = j
    return [Permutation(tuple(p)) for p in pos]


def code_to_mols(part: SeparabilityPartition) -> MolsSet:
    n = part.n
    if part.r != n:
        raise SeparabilityError(f"class size r={part.r} differs from n={n}; no MOLS")
    squares = tuple(class_to_square(c) for c in sorted(part.classes, key=min))
    return MolsSet(n, squares)


def mols_to_code(mols: MolsSet) -> PermutationCode:
    words = []
    for s in mols.squares:
        words.extend(square_to_words(s))
    return PermutationCode.from_words(words)


def mols_to_json(mols: MolsSet) -> str:
    return json.dumps([[list(row) for row in s.cells] for s in mols.squares])


def mols_from_json(text: str) -> MolsSet:
    data = json.loads(text)
    squares = tuple(LatinSquare(tuple(tuple(r) for r in sq)) for sq in data)
    if not squares:
        raise ValueError("no squares in input")
    return MolsSet(squares[0].n, squares)


def mols_to_text(mols: MolsSet) -> str:
    blocks = ["\n".join(" ".join(str(v) for v in row) for row in s.cells) for s in mols.squares]
    return "\n\n".join(blocks) + "\n"


def mols_from_text(text: str) -> MolsSet:
    squares = []
    for block in text.strip().split("\n\n"):
        rows = [tuple(int(t) for t in line.split()) for line in block.strip().splitlines() if line.strip()]
        squares.append(LatinSquare(tuple(rows)))
    return MolsSet(squares[0].n, tuple(squares))


def prime_power_factors(n: int) -> list[int]:
    out = []
    p = 2
    while p * p <= n:
        if n % p == 0:
            q = 1
            while n % p == 0:
                n //= p
                q *= p
            out.append(q)
        p += 1
    if n > 1:
        out.append(n)
    return out


def macneish_bound(n: int) -> int:
    """``min(q_i) - 1`` over the prime-power factorisation of ``n``."""
    if n < 2:
        raise ValueError("MacNeish bound needs n >= 2")
    return min(prime_power_factors(n)) - 1
