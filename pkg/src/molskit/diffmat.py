"""Difference matrices over finite groups and their permutation-code form.

A normalized ``(G, m+1; 1)`` difference matrix with rows ``0..m`` gives the
permutations ``theta_i : g_k -> d_ik`` and the code ``U_i theta_i R(G)`` whose
words are the rows ``k -> d_ik g_j``.  That code contains ``R(G)`` (row 1),
has minimum distance ``|G| - 1`` and is closed under right multiplication by
``R(G)``.  Its inverse image is the left-closed form, i.e. the code invariant
under ``Phi(R(G))`` acting on the lower block.
"""

from __future__ import annotations

import re
import warnings
from collections import Counter
from dataclasses import dataclass
from typing import Optional

from .codes import PermutationCode, SeparabilityError, distance_classes
from .groups import FiniteGroup, group_from_regular, parse_group_spec, regular_representation
from .perm import Permutation, compose, inverse


class DifferenceMatrixError(ValueError):
    pass


class PartialNormalization(UserWarning):
    """Only row 0 could be normalized (lambda > 1)."""


@dataclass(frozen=True)
class DifferenceMatrix:
    G: FiniteGroup
    rows: tuple[tuple[int, ...], ...]
    lam: int = 1
    group_spec: str = ""

    def __post_init__(self) -> None:
        rows = tuple(tuple(int(v) for v in r) for r in self.rows)
        object.__setattr__(self, "rows", rows)
        if self.lam < 1:
            raise DifferenceMatrixError("lambda must be positive")
        if len(rows) < 2:
            raise DifferenceMatrixError("a difference matrix needs at least 2 rows")
        cols = self.lam * self.G.order
        for i, r in enumerate(rows):
            if len(r) != cols:
                raise DifferenceMatrixError(
                    f"row {i} has {len(r)} entries, expected lambda*|G| = {cols}"
                )
            if any(v < 0 or v >= self.G.order for v in r):
                raise DifferenceMatrixError(f"row {i} has an entry outside G")

    @property
    def m(self) -> int:
        return len(self.rows) - 1

    @property
    def cols(self) -> int:
        return len(self.rows[0])

    def is_normalized(self) -> bool:
        e = self.G.identity
        if any(v != e for v in self.rows[0]):
            return False
        return self.lam != 1 or list(self.rows[1]) == list(range(self.G.order))


@dataclass(frozen=True)
class DMReport:
    ok: bool
    witness: Optional[tuple[int, int, int, int]] = None  # (i, j, element, count)


def verify_dm(D: DifferenceMatrix) -> DMReport:
    G = D.G
    for i in range(len(D.rows)):
        for j in range(i + 1, len(D.rows)):
            cnt = Counter(G.mul(G.inv(a), b) for a, b in zip(D.rows[i], D.rows[j]))
            for g in range(G.order):
                if cnt.get(g, 0) != D.lam:
                    return DMReport(False, (i, j, g, cnt.get(g, 0)))
    return DMReport(True)


def normalize_dm(D: DifferenceMatrix) -> DifferenceMatrix:
    """Canonical normalized form.

    Columns are left-multiplied so row 0 is the identity.  For lambda = 1 the
    columns are then ordered so row 1 reads ``g_1..g_n``, each row ``i >= 2`` is
    right-multiplied so its first entry is the identity, and rows ``2..m`` are
    sorted.  All steps preserve the difference property.
    """
    rep = verify_dm(D)
    if not rep.ok:
        raise DifferenceMatrixError(f"not a difference matrix: witness {rep.witness}")
    G = D.G
    cols = list(zip(*D.rows))
    cols = [tuple(G.mul(G.inv(c[0]), v) for v in c) for c in cols]
    if D.lam != 1:
        warnings.warn("lambda > 1: only row 0 normalized", PartialNormalization, stacklevel=2)
        cols.sort(key=lambda c: c[1:])
        return DifferenceMatrix(G, tuple(zip(*cols)), D.lam, D.group_spec)
    cols.sort(key=lambda c: c[1])
    rows = [tuple(r) for r in zip(*cols)]
    rest = []
    for r in rows[2:]:
        fix = G.inv(r[0])
        rest.append(tuple(G.mul(v, fix) for v in r))
    rest.sort()
    return DifferenceMatrix(G, tuple(rows[:2] + rest), 1, D.group_spec)


def thetas(D: DifferenceMatrix) -> list[Permutation]:
    """``theta_i`` for rows 1..m: ``g_k -> d_ik`` as permutations of G's indices."""
    return [Permutation(r) for r in D.rows[1:]]


def dm_to_code(D: DifferenceMatrix) -> PermutationCode:
    if D.lam != 1:
        raise DifferenceMatrixError("conversion is only defined for lambda = 1")
    if not D.is_normalized():
        raise DifferenceMatrixError("difference matrix is not normalized")
    rep = verify_dm(D)
    if not rep.ok:
        raise DifferenceMatrixError(f"not a difference matrix: witness {rep.witness}")
    R = regular_representation(D.G)
    words = [compose(t, g) for t in thetas(D) for g in R]
    return PermutationCode.from_words(words)


def code_to_dm(code: PermutationCode, G: FiniteGroup, group_spec: str = "") -> DifferenceMatrix:
    n = G.order
    if code.n != n:
        raise DifferenceMatrixError(f"code length {code.n} differs from |G| = {n}")
    if len(code) % n:
        raise DifferenceMatrixError(f"|C| = {len(code)} is not a multiple of |G| = {n}")
    R = regular_representation(G)
    words = code.words
    if not set(R) <= words:
        missing = next(g for g in R if g not in words)
        raise DifferenceMatrixError(f"code does not contain R(G): {missing} missing")
    # minimum distance n-1 and the distance-n classes
    distance_classes(list(words))
    reps = []
    remaining = set(words)
    for w in sorted(words):
        if w not in remaining:
            continue
        coset = {compose(w, g) for g in R}
        if not coset <= words:
            bad = min(coset - words)
            raise DifferenceMatrixError(f"code is not a union of cosets theta*R(G): {bad} missing")
        remaining -= coset
        # representative with theta(g_1) = 1_G
        reps.append(compose(w, R[G.inv(w.images[G.identity])]))
    ident = Permutation.identity(n)
    others = sorted(tuple(t.images) for t in reps if t != ident)
    rows = [tuple([G.identity] * n), tuple(range(n))] + others
    D = DifferenceMatrix(G, tuple(rows), 1, group_spec)
    rep = verify_dm(D)
    if not rep.ok:
        raise DifferenceMatrixError(f"recovered matrix fails verification: witness {rep.witness}")
    return D


def recover_dm(code: PermutationCode) -> Optional[DifferenceMatrix]:
    """Look for a lambda = 1 difference matrix behind a code, up to isometry.

    Each translate ``w^-1 C``, ``C w^-1`` (and their inverses) contains the
    identity; if the distance-n class of the identity there is a regular group
    ``V``, the translate is handed to :func:`code_to_dm` with ``G`` the abstract
    group of ``V``.  Returns the first matrix that verifies, else ``None``.
    """
    words = code.sorted_words()
    tried = set()
    for w in words:
        wi = inverse(w)
        for T in ([compose(wi, c) for c in words], [compose(c, wi) for c in words]):
            for variant in (T, [inverse(c) for c in T]):
                key = frozenset(variant)
                if key in tried:
                    continue
                tried.add(key)
                try:
                    classes = distance_classes(variant)
                except SeparabilityError:
                    continue
                ident = Permutation.identity(code.n)
                (cls,) = [c for c in classes if ident in c]
                G = group_from_regular(cls)
                if G is None:
                    continue
                try:
                    return code_to_dm(PermutationCode(code.n, key), G)
                except DifferenceMatrixError:
                    continue
    return None


_HEADER = re.compile(r"group=(\S+)\s+lambda=(\d+)\s+rows=(\d+)\s+cols=(\d+)")
_TOKEN = re.compile(r"\([^)]*\)|-?\d+")


def format_dm(D: DifferenceMatrix) -> str:
    spec = D.group_spec or D.G.name
    lines = [f"group={spec} lambda={D.lam} rows={len(D.rows)} cols={D.cols}"]
    for r in D.rows:
        lines.append(" ".join(D.G.format_element(v) for v in r))
    return "\n".join(lines) + "\n"


def parse_dm(text: str) -> DifferenceMatrix:
    lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
    lines = [ln for ln in lines if ln]
    if not lines:
        raise DifferenceMatrixError("empty difference-matrix file")
    m = _HEADER.fullmatch(lines[0])
    if not m:
        raise DifferenceMatrixError(f"bad header line: {lines[0]!r}")
    spec, lam, nrows, ncols = m.group(1), int(m.group(2)), int(m.group(3)), int(m.group(4))
    G = parse_group_spec(spec)
    body = lines[1:]
    if len(body) != nrows:
        raise DifferenceMatrixError(f"header says {nrows} rows, found {len(body)}")
    rows = []
    for ln in body:
        toks = _TOKEN.findall(ln)
        if len(toks) != ncols:
            raise DifferenceMatrixError(f"row has {len(toks)} entries, header says {ncols}")
        rows.append(tuple(G.parse_element(t) for t in toks))
    return DifferenceMatrix(G, tuple(rows), lam, spec)
