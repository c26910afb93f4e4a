"""Finite groups as explicit tables, and their right regular representations."""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Optional, Sequence

from .perm import Permutation, compose


@dataclass(frozen=True)
class FiniteGroup:
    """A finite group given by its multiplication table.

    Elements are indices ``0..order-1`` into ``labels``.  Groups built by
    :func:`cyclic` / :func:`direct_product` label elements by residue tuples in
    lexicographic order, so the identity is index 0.  ``moduli`` records the
    cyclic factors for such groups and is ``None`` for arbitrary tables.
    """

    labels: tuple[tuple[int, ...], ...]
    table: tuple[tuple[int, ...], ...]
    identity: int = 0
    name: str = ""
    moduli: Optional[tuple[int, ...]] = None

    @property
    def order(self) -> int:
        return len(self.labels)

    def mul(self, a: int, b: int) -> int:
        return self.table[a][b]

    def inv(self, a: int) -> int:
        row = self.table[a]
        return row.index(self.identity)

    def index(self, label: Sequence[int]) -> int:
        return self._index_map()[tuple(label)]

    def _index_map(self) -> dict[tuple[int, ...], int]:
        cached = self.__dict__.get("_idx")
        if cached is None:
            cached = {lab: i for i, lab in enumerate(self.labels)}
            object.__setattr__(self, "_idx", cached)
        return cached

    def element_order(self, a: int) -> int:
        k, x = 1, a
        while x != self.identity:
            x = self.mul(x, a)
            k += 1
        return k

    def is_abelian(self) -> bool:
        n = self.order
        return all(self.table[a][b] == self.table[b][a] for a in range(n) for b in range(a))

    def format_element(self, a: int) -> str:
        lab = self.labels[a]
        if len(lab) == 1:
            return str(lab[0])
        return "(" + ",".join(str(v) for v in lab) + ")"

    def parse_element(self, token: str) -> int:
        token = token.strip()
        if token.startswith("("):
            vals = tuple(int(t) for t in token.strip("()").split(","))
        else:
            vals = (int(token),)
        try:
            return self.index(vals)
        except KeyError:
            raise ValueError(f"{token!r} is not an element of {self.name}") from None


def check_group_axioms(G: FiniteGroup) -> None:
    """Raise ValueError unless ``G.table`` is a group operation."""
    n = G.order
    rng = range(n)
    for a in rng:
        if sorted(G.table[a]) != list(rng):
            raise ValueError(f"row {a} of the table is not a permutation")
        if G.table[G.identity][a] != a or G.table[a][G.identity] != a:
            raise ValueError("identity is not two-sided neutral")
    t = G.table
    for a, b, c in itertools.product(rng, repeat=3):
        if t[t[a][b]][c] != t[a][t[b][c]]:
            raise ValueError(f"not associative at {a}, {b}, {c}")


def cyclic(m: int) -> FiniteGroup:
    if m < 1:
        raise ValueError("cyclic group order must be positive")
    table = tuple(tuple((a + b) % m for b in range(m)) for a in range(m))
    return FiniteGroup(tuple((k,) for k in range(m)), table, 0, f"Z{m}", (m,))


def direct_product(gs: Sequence[FiniteGroup]) -> FiniteGroup:
    if not gs:
        raise ValueError("direct product of an empty list")
    idx_tuples = list(itertools.product(*(range(g.order) for g in gs)))
    labels = [tuple(itertools.chain.from_iterable(g.labels[i] for g, i in zip(gs, t))) for t in idx_tuples]
    # lexicographic on residue tuples; identity (all zeros) sorts first
    order = sorted(range(len(labels)), key=lambda k: labels[k])
    pos = {idx_tuples[k]: new for new, k in enumerate(order)}
    table = []
    for k in order:
        a = idx_tuples[k]
        row = []
        for k2 in order:
            b = idx_tuples[k2]
            row.append(pos[tuple(g.table[x][y] for g, x, y in zip(gs, a, b))])
        table.append(tuple(row))
    ident = pos[tuple(g.identity for g in gs)]
    moduli = None
    if all(g.moduli is not None for g in gs):
        moduli = tuple(itertools.chain.from_iterable(g.moduli for g in gs))
    name = "x".join(g.name for g in gs)
    return FiniteGroup(tuple(labels[k] for k in order), tuple(table), ident, name, moduli)


def parse_group_spec(spec: str) -> FiniteGroup:
    """``Z35`` or ``x``-separated products such as ``Z6xZ2xZ2xZ2``."""
    parts = spec.strip().split("x")
    mods = []
    for part in parts:
        m = re.fullmatch(r"\s*Z(\d+)\s*", part)
        if not m or int(m.group(1)) < 1:
            raise ValueError(f"bad group spec {spec!r}; expected e.g. Z3xZ21")
        mods.append(int(m.group(1)))
    if len(mods) == 1:
        return cyclic(mods[0])
    return direct_product([cyclic(m) for m in mods])


def regular_representation(G: FiniteGroup) -> list[Permutation]:
    """``[gamma_1, ..., gamma_n]`` with ``gamma_j : g_k -> g_k g_j``."""
    n = G.order
    return [Permutation._raw(tuple(G.table[k][j] for k in range(n))) for j in range(n)]


def match_regular_group(elements: Sequence[Permutation], G: FiniteGroup) -> Optional[Permutation]:
    """Find a relabelling conjugating a regular abelian group onto ``R(G)``.

    Returns ``lam`` with ``inverse(lam) * e * lam`` in ``regular_representation(G)``
    for every ``e`` in ``elements`` (and the two sets equal), or ``None`` when the
    group is not regular or not isomorphic to ``G``.  ``G`` must come from
    :func:`cyclic` / :func:`direct_product`.
    """
    if G.moduli is None:
        raise ValueError("matching needs a group with known cyclic factors")
    elems = list(dict.fromkeys(elements))
    n = G.order
    if len(elems) != n or any(e.degree != n for e in elems):
        return None
    # regular: the orbit map e -> 0^e is a bijection onto the points
    base_image = {e.images[0]: e for e in elems}
    if len(base_image) != n:
        return None
    elem_set = set(elems)
    if any(compose(a, b) != compose(b, a) for a, b in itertools.combinations(elems, 2)):
        return None
    if any(compose(a, b) not in elem_set for a in elems for b in elems):
        return None

    ident = Permutation.identity(n)
    by_order: dict[int, list[Permutation]] = {}
    for e in elems:
        by_order.setdefault(e.order(), []).append(e)

    def powers(e: Permutation, m: int) -> list[Permutation]:
        out, x = [ident], ident
        for _ in range(m - 1):
            x = compose(x, e)
            out.append(x)
        return out

    def search(i: int, span: dict[tuple[int, ...], Permutation]):
        if i == len(G.moduli):
            return span
        m = G.moduli[i]
        for cand in by_order.get(m, []) if m > 1 else [ident]:
            pw = powers(cand, m)
            new = {}
            for coords, x in span.items():
                for k, p in enumerate(pw):
                    new[coords + (k,)] = compose(x, p)
            if len(set(new.values())) == len(new):
                found = search(i + 1, new)
                if found is not None:
                    return found
        return None

    iso = search(0, {(): ident})
    if iso is None:
        return None
    # point 0^psi(g) is labelled by g
    lam = [0] * n
    for coords, e in iso.items():
        lam[e.images[0]] = G.index(coords)
    return Permutation(tuple(lam))


def group_from_regular(elements: Sequence[Permutation]) -> Optional[FiniteGroup]:
    """The abstract group of a regular permutation group, labelled by orbit points.

    Element ``k`` is the unique member sending point 0 to point ``k``, so under
    this labelling the input group is exactly :func:`regular_representation` of
    the result.  Returns ``None`` if the set is not a regular group.
    """
    elems = list(dict.fromkeys(elements))
    n = len(elems)
    if n == 0 or any(e.degree != n for e in elems):
        return None
    by_point = {e.images[0]: e for e in elems}
    if len(by_point) != n:
        return None
    table = []
    for a in range(n):
        row = []
        for b in range(n):
            c = compose(by_point[a], by_point[b])
            if by_point.get(c.images[0]) != c:
                return None
            row.append(c.images[0])
        table.append(tuple(row))
    return FiniteGroup(tuple((k,) for k in range(n)), tuple(table), 0, f"regular group of order {n}")
