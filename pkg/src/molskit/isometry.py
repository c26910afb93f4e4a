"""The isometry group Iso(n) of (S_n, Hamming) realised inside S_2n.

Points ``0..n-1`` form the lower block, ``n..2n-1`` the upper block.  An
element is stored as a degree-2n permutation; :func:`decompose` views it as
``b1 * b2 * t^eps`` with ``b1`` on the lower block, ``b2`` on the upper block
and ``t`` the block swap ``(1, n+1)(2, n+2)...(n, 2n)``.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Iterable, Optional, Sequence

from .groups import FiniteGroup, match_regular_group, regular_representation
from .perm import DegreeMismatch, Permutation, compose, inverse, parse_cycles


class BlockStructureError(ValueError):
    pass


class GroupTooLarge(RuntimeError):
    def __init__(self, limit: int, partial: int):
        super().__init__(f"closure exceeded limit {limit} (reached {partial} elements)")
        self.limit = limit
        self.partial = partial


class NotInvariant(ValueError):
    pass


@dataclass(frozen=True, order=True)
class IsoElement:
    inner: Permutation
    block_swap: bool = field(init=False, compare=False)

    def __post_init__(self) -> None:
        deg = self.inner.degree
        if deg % 2:
            raise BlockStructureError(f"degree {deg} is odd")
        n = deg // 2
        img = self.inner.images
        swap = img[0] >= n
        for i in range(deg):
            lower_in = i < n
            lower_out = img[i] < n
            if (lower_in == lower_out) == swap:
                raise BlockStructureError(
                    f"point {i + 1} maps to {img[i] + 1}, breaking the block structure"
                )
        object.__setattr__(self, "block_swap", swap)

    @classmethod
    def _raw(cls, inner: Permutation, swap: bool) -> "IsoElement":
        g = object.__new__(cls)
        object.__setattr__(g, "inner", inner)
        object.__setattr__(g, "block_swap", swap)
        return g

    @property
    def n(self) -> int:
        return self.inner.degree // 2

    @classmethod
    def identity(cls, n: int) -> "IsoElement":
        return cls._raw(Permutation.identity(2 * n), False)

    @classmethod
    def parse(cls, text: str, n: int) -> "IsoElement":
        return cls(parse_cycles(text, 2 * n))

    @classmethod
    def from_blocks(cls, b1: Permutation, b2: Permutation, swap: bool = False) -> "IsoElement":
        """Recompose ``b1 * b2' * t^swap`` where ``b2'`` is ``b2`` moved to the upper block."""
        if b1.degree != b2.degree:
            raise DegreeMismatch("block permutations differ in degree")
        n = b1.degree
        lower = b1.images
        upper = b2.images
        if swap:
            images = tuple(v + n for v in lower) + tuple(upper)
        else:
            images = tuple(lower) + tuple(v + n for v in upper)
        return cls._raw(Permutation._raw(images), swap)

    def __mul__(self, other: "IsoElement") -> "IsoElement":
        return iso_compose(self, other)

    def __invert__(self) -> "IsoElement":
        return IsoElement._raw(inverse(self.inner), self.block_swap)

    def __str__(self) -> str:
        return str(self.inner)


def iso_compose(g: IsoElement, h: IsoElement) -> IsoElement:
    return IsoElement._raw(compose(g.inner, h.inner), g.block_swap != h.block_swap)


def swap_element(n: int) -> IsoElement:
    """The block swap ``t_n``."""
    return IsoElement._raw(Permutation._raw(tuple(range(n, 2 * n)) + tuple(range(n))), True)


def decompose(g: IsoElement) -> tuple[Permutation, Permutation, bool]:
    n = g.n
    img = g.inner.images
    if g.block_swap:
        b1 = tuple(v - n for v in img[:n])
        b2 = tuple(img[n:])
    else:
        b1 = tuple(img[:n])
        b2 = tuple(v - n for v in img[n:])
    return Permutation._raw(b1), Permutation._raw(b2), g.block_swap


def phi(p: Permutation) -> Permutation:
    """Move a pure upper-block permutation of degree 2n down to degree n."""
    if p.degree % 2:
        raise DegreeMismatch(f"degree {p.degree} is odd")
    n = p.degree // 2
    img = p.images
    if any(img[i] != i for i in range(n)):
        raise BlockStructureError("permutation moves a point of the lower block")
    return Permutation._raw(tuple(v - n for v in img[n:]))


def embed_phi(p: Permutation, n: int) -> IsoElement:
    """Place a permutation of degree m <= n on the first m points of the lower block."""
    m = p.degree
    if m > n:
        raise DegreeMismatch(f"cannot embed degree {m} into Iso({n})")
    images = tuple(p.images) + tuple(range(m, 2 * n))
    return IsoElement._raw(Permutation._raw(images), False)


def diagonal(v: Permutation) -> IsoElement:
    """``v * v^t``: ``v`` acting simultaneously on both blocks."""
    n = v.degree
    return IsoElement._raw(Permutation._raw(tuple(v.images) + tuple(x + n for x in v.images)), False)


def delta(V: Iterable[Permutation]) -> set[IsoElement]:
    V = list(dict.fromkeys(V))
    if not V:
        raise ValueError("delta of an empty set")
    Vs = set(V)
    if Permutation.identity(V[0].degree) not in Vs:
        raise NotInvariant("V does not contain the identity")
    for a in V:
        for b in V:
            if compose(a, b) not in Vs:
                raise NotInvariant(f"V not closed: {a} * {b} is missing")
    return {diagonal(v) for v in V}


def act(b: Permutation, g: IsoElement) -> Permutation:
    """The right action ``b * g`` of Iso(n) on S_n.

    With ``g = b1 * b2 * t^eps`` this is ``c = b1^-1 * b * phi(b2)``, inverted when
    the element swaps blocks.
    """
    n = b.degree
    if g.inner.degree != 2 * n:
        raise DegreeMismatch(f"cannot act with Iso({g.n}) on degree {n}")
    img = g.inner.images
    bi = b.images
    c = [0] * n
    if g.block_swap:
        # b1^-1(i) = j where img[j] - n == i ; b2(v) = img[n + v]
        for j in range(n):
            c[img[j] - n] = img[n + bi[j]]
        inv = [0] * n
        for i, v in enumerate(c):
            inv[v] = i
        return Permutation._raw(tuple(inv))
    for j in range(n):
        c[img[j]] = img[n + bi[j]] - n
    return Permutation._raw(tuple(c))


@dataclass
class IsoGroup:
    n: int
    generators: tuple[IsoElement, ...]
    elements: Optional[tuple[IsoElement, ...]] = None
    order: Optional[int] = None

    def __post_init__(self) -> None:
        self.generators = tuple(self.generators)
        for g in self.generators:
            if g.n != self.n:
                raise DegreeMismatch(f"generator of Iso({g.n}) in a subgroup of Iso({self.n})")

    def __contains__(self, g: IsoElement) -> bool:
        if self.elements is None:
            raise ValueError("group elements are not materialised")
        cached = self.__dict__.get("_set")
        if cached is None:
            cached = self.__dict__["_set"] = frozenset(self.elements)
        return g in cached

    def __len__(self) -> int:
        if self.order is None:
            raise ValueError("group order is unknown")
        return self.order


def generate_group(gens: Sequence[IsoElement], limit: int = 10_000_000, n: Optional[int] = None) -> IsoGroup:
    """Breadth-first closure of ``gens``; elements listed in discovery order."""
    gens = tuple(gens)
    if n is None:
        if not gens:
            raise ValueError("need generators or an explicit n")
        n = gens[0].n
    ordered = sorted(set(gens))
    ident = IsoElement.identity(n)
    seen = {ident}
    out = [ident]
    queue = deque([ident])
    while queue:
        e = queue.popleft()
        for g in ordered:
            h = iso_compose(e, g)
            if h not in seen:
                seen.add(h)
                out.append(h)
                if len(out) > limit:
                    raise GroupTooLarge(limit, len(out))
                queue.append(h)
    return IsoGroup(n, gens, tuple(out), len(out))


def orbit(b: Permutation, U: IsoGroup) -> frozenset[Permutation]:
    if b.degree != U.n:
        raise DegreeMismatch(f"codeword of degree {b.degree} under Iso({U.n})")
    seen = {b}
    queue = deque([b])
    while queue:
        c = queue.popleft()
        for g in U.generators:
            d = act(c, g)
            if d not in seen:
                seen.add(d)
                queue.append(d)
    return frozenset(seen)


def orbit_split(S: Iterable[Permutation], U: IsoGroup) -> list[frozenset[Permutation]]:
    remaining = set(S)
    full = frozenset(remaining)
    out = []
    while remaining:
        b = min(remaining)
        o = orbit(b, U)
        if not o <= full:
            witness = min(o - full)
            raise NotInvariant(f"set is not U-invariant: {b} reaches {witness}")
        out.append(o)
        remaining -= o
    out.sort(key=lambda o: (-len(o), min(o)))
    return out


def is_stabilized(b: Permutation, S: Iterable[IsoElement]) -> bool:
    return all(act(b, s) == b for s in S)


def stabilizer(b: Permutation, U: IsoGroup) -> list[IsoElement]:
    if U.elements is None:
        raise ValueError("stabilizer needs a materialised group")
    return [g for g in U.elements if act(b, g) == b]


def diagonal_conjugator(K: Sequence[IsoElement], G: FiniteGroup) -> Optional[IsoElement]:
    """Find ``h`` in B1 x B2 with ``h^-1 K h = Delta(Phi(R(G)))``, if one exists.

    ``K`` must be a swap-free group whose projections to both blocks are
    regular and isomorphic to ``G``; the block-1 isomorphism is transported to
    block 2 through ``K`` so the two relabellings agree.
    """
    K = list(dict.fromkeys(K))
    if not K or any(k.block_swap for k in K):
        return None
    n = K[0].n
    if G.order != n or len(K) != n:
        return None
    pairs = [decompose(k)[:2] for k in K]
    V1 = [p for p, _ in pairs]
    lam1 = match_regular_group(V1, G)
    if lam1 is None:
        return None
    twin = dict(pairs)
    if len(twin) != n:
        return None
    R = regular_representation(G)
    # gamma_j corresponds to v = lam1 * gamma_j * lam1^-1 in V1, and to twin[v] in V2
    lam1_inv = inverse(lam1)
    lam2 = [0] * n
    base2 = {}
    for j, gam in enumerate(R):
        v = compose(compose(lam1, gam), lam1_inv)
        if v not in twin:
            return None
        base2[j] = twin[v].images[0]
    if sorted(base2.values()) != list(range(n)):
        return None
    # point 0^{twin(v_j)} of block 2 gets label g_j
    for j, point in base2.items():
        lam2[point] = j
    h = IsoElement.from_blocks(lam1, Permutation(tuple(lam2)), False)
    h_inv = ~h
    target = {diagonal(g) for g in R}
    for k in K:
        if iso_compose(iso_compose(h_inv, k), h) not in target:
            return None
    return h
