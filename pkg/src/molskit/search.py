"""Separable U-orbits and a backtrack search joining them into an (n, m)-separable PA.

The search visits subsets of candidate orbits in lexicographic depth-first
order.  Extending a partial union by an orbit only inspects cross pairs
between the orbit and the orbits already chosen; the classes of the
"distance n" relation are merged incrementally.  A subset counts as a
solution once every class is complete (size n); ``m`` is then the number of
classes.
"""

from __future__ import annotations

import json
import logging
import multiprocessing as mp
import os
from collections import Counter, defaultdict
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .codes import (
    PermutationCode,
    SeparabilityError,
    SeparabilityPartition,
    cross_distance,
    distance_classes,
    separability_partition,
    verify_pa,
)
from .isometry import IsoElement, IsoGroup, decompose, generate_group, orbit
from .perm import Permutation, format_cycles, inverse

log = logging.getLogger(__name__)

CHECKPOINT_VERSION = 1
REPORT_VERSION = 1


class NodeLimitReached(RuntimeError):
    pass


@dataclass(frozen=True)
class OrbitCandidate:
    representative: Permutation
    words: tuple[Permutation, ...]
    classes: tuple[tuple[int, ...], ...]
    stabilizer_order: int

    @property
    def n(self) -> int:
        return self.representative.degree

    def __len__(self) -> int:
        return len(self.words)

    def class_of(self) -> list[int]:
        out = [0] * len(self.words)
        for q, cls in enumerate(self.classes):
            for i in cls:
                out[i] = q
        return out


def make_candidate(words: Iterable[Permutation], group_order: int) -> OrbitCandidate:
    """Wrap an orbit; raises SeparabilityError if it cannot be part of a separable PA."""
    ws = tuple(sorted(set(words)))
    if len(ws) == 1:
        classes: tuple[tuple[int, ...], ...] = ((0,),)
    else:
        index = {w: i for i, w in enumerate(ws)}
        classes = tuple(tuple(index[w] for w in c) for c in distance_classes(ws))
    if group_order % len(ws):
        raise ValueError(f"orbit size {len(ws)} does not divide |U| = {group_order}")
    return OrbitCandidate(ws[0], ws, classes, group_order // len(ws))


@dataclass
class SearchConfig:
    U: IsoGroup
    required_stabilizer: tuple[IsoElement, ...] = ()
    target_m: Optional[int] = None
    seed_orbits: tuple[Permutation, ...] = ()
    node_limit: int = 10**8
    checkpoint_path: Optional[str] = None
    checkpoint_every: int = 10**6
    workers: int = 1

    def __post_init__(self) -> None:
        self.required_stabilizer = tuple(self.required_stabilizer)
        self.seed_orbits = tuple(self.seed_orbits)
        if self.U.elements is not None:
            for s in self.required_stabilizer:
                if s not in self.U:
                    raise ValueError(f"stabilizer element {s} is not in U")
        if self.node_limit < 1:
            raise ValueError("node_limit must be positive")


def _constraints(S: Sequence[IsoElement]):
    out = []
    for s in S:
        s1, s2, swap = decompose(s)
        out.append((s1.images, inverse(s1).images, s2.images, inverse(s2).images, swap))
    return out


def stabilized_permutations(
    S: Sequence[IsoElement], n: int, node_limit: int = 10**8
) -> Iterator[Permutation]:
    """All ``b`` in S_n with ``act(b, s) == b`` for every ``s`` in ``S``.

    Built point by point: fixing ``b(j)`` forces further images through each
    stabilizer element (``b(s1(j)) = s2(b(j))`` for block-preserving ``s``,
    ``b(s2(b(j))) = s1(j)`` for block-swapping ``s``), so only consistent
    partial maps are ever extended.  Raises NodeLimitReached after
    ``node_limit`` partial assignments.
    """
    cons = _constraints(S)
    nodes = 0

    def assign(b: list[int], used: list[bool], j: int, v: int) -> bool:
        queue = [(j, v)]
        while queue:
            x, y = queue.pop()
            if b[x] >= 0:
                if b[x] != y:
                    return False
                continue
            if used[y]:
                return False
            b[x] = y
            used[y] = True
            for s1, s1i, s2, s2i, swap in cons:
                if swap:
                    queue.append((s2[y], s1[x]))
                    queue.append((s1i[y], s2i[x]))
                else:
                    queue.append((s1[x], s2[y]))
                    queue.append((s1i[x], s2i[y]))
        return True

    def rec(b: list[int], used: list[bool]) -> Iterator[Permutation]:
        nonlocal nodes
        nodes += 1
        if nodes > node_limit:
            raise NodeLimitReached(f"stabilizer enumeration exceeded {node_limit} nodes")
        try:
            j = b.index(-1)
        except ValueError:
            yield Permutation._raw(tuple(b))
            return
        for v in range(n):
            if used[v]:
                continue
            b2, u2 = b[:], used[:]
            if assign(b2, u2, j, v):
                yield from rec(b2, u2)

    yield from rec([-1] * n, [False] * n)


@dataclass
class Enumeration:
    candidates: list[OrbitCandidate]
    complete: bool
    considered: int
    rejected: int


def enumerate_orbits(cfg: SearchConfig, universe: Optional[Iterable[Permutation]] = None) -> Enumeration:
    U = cfg.U
    if U.order is None:
        U = generate_group(U.generators, n=U.n)
    reps: list[Iterable[Permutation]] = [cfg.seed_orbits]
    if universe is not None:
        reps.append(universe)
    elif cfg.required_stabilizer or not cfg.seed_orbits:
        reps.append(stabilized_permutations(cfg.required_stabilizer, U.n, cfg.node_limit))
    seen: set[Permutation] = set()
    out = []
    considered = rejected = 0
    complete = True
    try:
        for source in reps:
            for b in source:
                if b in seen:
                    continue
                considered += 1
                o = orbit(b, U)
                seen |= o
                try:
                    out.append(make_candidate(o, U.order))
                except SeparabilityError:
                    rejected += 1
    except NodeLimitReached as exc:
        log.warning("%s; returning partial candidate list", exc)
        complete = False
    out.sort(key=lambda c: (-len(c), c.representative))
    return Enumeration(out, complete, considered, rejected)


def compatible(A: OrbitCandidate, B: OrbitCandidate) -> bool:
    """Whether two orbits can coexist in a separable PA.

    Class sizes are not required to match here: orbits that each hold part of
    a class (e.g. the small orbits of a regular subgroup) only complete it
    together.  Equal class sizes are enforced on finished solutions.
    """
    if A is B:
        return True
    if A.n != B.n:
        return False
    try:
        distance_classes(A.words + B.words)
    except SeparabilityError:
        return False
    return len(set(A.words) & set(B.words)) == 0


@dataclass
class JoinResult:
    m: int
    chosen: tuple[int, ...]
    code: Optional[PermutationCode]
    partition: Optional[SeparabilityPartition]
    node_count: int
    complete: bool
    candidates: tuple[OrbitCandidate, ...] = field(repr=False, default=())

    def report(self) -> dict:
        return {
            "version": REPORT_VERSION,
            "candidates": [
                {
                    "representative": format_cycles(c.representative),
                    "size": len(c),
                    "stabilizer_order": c.stabilizer_order,
                }
                for c in self.candidates
            ],
            "chosen": list(self.chosen),
            "m_found": self.m,
            "words": 0 if self.code is None else len(self.code),
            "node_count": self.node_count,
            "complete": self.complete,
        }


class _Joiner:
    """Incremental state for the depth-first join over sorted candidates."""

    def __init__(self, cands: Sequence[OrbitCandidate], n: int):
        self.cands = cands
        self.n = n
        N = len(cands)
        self.class_of = [c.class_of() for c in cands]
        self.ok = np.ones((N, N), dtype=bool)
        self.npairs: dict[tuple[int, int], np.ndarray] = {}
        for i in range(N):
            for j in range(i + 1, N):
                D = cross_distance(cands[i].words, cands[j].words)
                if D.min() < n - 1:
                    self.ok[i, j] = self.ok[j, i] = False
                    continue
                self.npairs[(i, j)] = np.argwhere(D == n)
        self.suffix = [0] * (N + 1)
        for i in range(N - 1, -1, -1):
            self.suffix[i] = self.suffix[i + 1] + len(cands[i])
        self.chosen: list[int] = []
        self.gid: dict[int, list[int]] = {}
        self.size: dict[int, int] = {}
        self.next_gid = 0
        self.words = 0
        self.undo: list[tuple[int, list[int], list[int]]] = []
        # pairwise-incompatible orbits are ruled out before the search starts
        for i in range(N):
            for j in range(i + 1, N):
                if self.ok[i, j] and not self._pair_ok(i, j):
                    self.ok[i, j] = self.ok[j, i] = False

    def _pair_ok(self, i: int, j: int) -> bool:
        good = self.push(i) and self.push(j)
        self.reset()
        return good

    def _merge_plan(self, x: int) -> Optional[dict[int, int]]:
        xc = self.class_of[x]
        touch: dict[int, set[int]] = defaultdict(set)
        count: Counter = Counter()
        for y in self.chosen:
            if not self.ok[y, x]:
                return None
            if y < x:
                pairs = self.npairs[(y, x)]
                ya, xb = pairs[:, 0], pairs[:, 1]
            else:
                pairs = self.npairs[(x, y)]
                xb, ya = pairs[:, 0], pairs[:, 1]
            gy = self.gid[y]
            for a, b in zip(ya.tolist(), xb.tolist()):
                q = xc[b]
                g = gy[a]
                touch[q].add(g)
                count[(q, g)] += 1
        plan: dict[int, int] = {}
        used: set[int] = set()
        classes = self.cands[x].classes
        for q, gs in touch.items():
            if len(gs) != 1:
                return None
            g = next(iter(gs))
            if g in used:
                return None
            if count[(q, g)] != len(classes[q]) * self.size[g]:
                return None
            if len(classes[q]) + self.size[g] > self.n:
                return None
            used.add(g)
            plan[q] = g
        return plan

    def push(self, x: int) -> bool:
        plan = self._merge_plan(x)
        if plan is None:
            return False
        classes = self.cands[x].classes
        ids = []
        new_ids = []
        for q, cls in enumerate(classes):
            g = plan.get(q)
            if g is None:
                g = self.next_gid
                self.next_gid += 1
                self.size[g] = 0
                new_ids.append(g)
            self.size[g] += len(cls)
            ids.append(g)
        self.gid[x] = [ids[q] for q in self.class_of[x]]
        self.chosen.append(x)
        self.words += len(self.cands[x])
        self.undo.append((x, ids, new_ids))
        return True

    def pop(self) -> None:
        x, ids, new_ids = self.undo.pop()
        for q, cls in enumerate(self.cands[x].classes):
            self.size[ids[q]] -= len(cls)
        for g in new_ids:
            del self.size[g]
            self.next_gid -= 1
        del self.gid[x]
        self.chosen.pop()
        self.words -= len(self.cands[x])

    def reset(self) -> None:
        while self.chosen:
            self.pop()

    def complete_m(self) -> int:
        if not self.size or any(s != self.n for s in self.size.values()):
            return 0
        return len(self.size)


class _Search:
    def __init__(self, joiner: _Joiner, cfg: SearchConfig, shared_best=None):
        self.j = joiner
        self.cfg = cfg
        self.nodes = 0
        self.best_m = 0
        self.best: tuple[int, ...] = ()
        self.done = False
        self.aborted = False
        self.shared_best = shared_best

    def _target_hit(self) -> bool:
        return self.cfg.target_m is not None and self.best_m >= self.cfg.target_m

    def _pruned(self, start: int) -> bool:
        bound = (self.j.words + self.j.suffix[start]) // self.j.n
        if bound <= self.best_m:
            return True
        # another worker's incumbent prunes only strictly, keeping ties deterministic
        return self.shared_best is not None and bound < self.shared_best.value

    def _checkpoint(self) -> None:
        path = self.cfg.checkpoint_path
        if not path:
            return
        state = {
            "version": CHECKPOINT_VERSION,
            "path": list(self.j.chosen),
            "nodes": self.nodes,
            "best_m": self.best_m,
            "best": list(self.best),
            "n_candidates": len(self.j.cands),
            "candidate_reps": [format_cycles(c.representative) for c in self.j.cands],
        }
        tmp = path + ".tmp"
        with open(tmp, "w") as fh:
            json.dump(state, fh)
        os.replace(tmp, path)

    def visit(self) -> None:
        """Evaluate the current subset, then extend it in index order."""
        if self.done:
            return
        self.nodes += 1
        if self.nodes > self.cfg.node_limit:
            self.done = self.aborted = True
            return
        if self.nodes % self.cfg.checkpoint_every == 0:
            self._checkpoint()
        m = self.j.complete_m()
        if m > self.best_m:
            self.best_m = m
            self.best = tuple(self.j.chosen)
            if self.shared_best is not None:
                with self.shared_best.get_lock():
                    if m > self.shared_best.value:
                        self.shared_best.value = m
            if self._target_hit():
                self.done = True
                return
        start = self.j.chosen[-1] + 1 if self.j.chosen else 0
        for x in range(start, len(self.j.cands)):
            if self.done or self._pruned(x):
                return
            if self.j.push(x):
                self.visit()
                self.j.pop()

    def resume(self, path: Sequence[int]) -> None:
        """Continue a depth-first run whose next node to visit is ``path``."""
        for x in path:
            if not self.j.push(x):
                raise ValueError("checkpoint path is not a consistent partial join")
        self.nodes -= 1
        self.visit()
        for k in range(len(path) - 1, -1, -1):
            x = path[k]
            self.j.pop()
            for y in range(x + 1, len(self.j.cands)):
                if self.done or self._pruned(y):
                    break
                if self.j.push(y):
                    self.visit()
                    self.j.pop()


def _order(candidates: Sequence[OrbitCandidate]) -> list[OrbitCandidate]:
    return sorted(candidates, key=lambda c: (-len(c), c.representative))


_worker_state: dict = {}


def _worker_init(cands, cfg, shared):
    _worker_state["joiner"] = _Joiner(cands, cands[0].n)
    _worker_state["cfg"] = cfg
    _worker_state["shared"] = shared


def _run_branch(i: int):
    joiner = _worker_state["joiner"]
    s = _Search(joiner, _worker_state["cfg"], _worker_state["shared"])
    s.nodes = 1  # the shared empty root is counted once by the parent
    if joiner.push(i):
        s.visit()
        joiner.reset()
    return i, s.best_m, s.best, s.nodes - 1, s.aborted


def backtrack_join(
    candidates: Sequence[OrbitCandidate],
    cfg: SearchConfig,
    resume_from: Optional[str] = None,
) -> JoinResult:
    if not candidates:
        raise ValueError("no candidate orbits")
    cands = _order(candidates)
    n = cands[0].n
    if cfg.workers > 1:
        if cfg.checkpoint_path or resume_from:
            raise ValueError("checkpointing is only supported with a single worker")
        best_m, best, nodes, aborted = _parallel(cands, cfg)
    else:
        joiner = _Joiner(cands, n)
        s = _Search(joiner, cfg)
        if resume_from:
            with open(resume_from) as fh:
                state = json.load(fh)
            if state.get("version") != CHECKPOINT_VERSION:
                raise ValueError(f"unsupported checkpoint version {state.get('version')}")
            if state["candidate_reps"] != [format_cycles(c.representative) for c in cands]:
                raise ValueError("checkpoint was written for a different candidate list")
            s.nodes, s.best_m, s.best = state["nodes"], state["best_m"], tuple(state["best"])
            s.resume(state["path"])
        else:
            s.visit()
        best_m, best, nodes, aborted = s.best_m, s.best, s.nodes, s.aborted
    return _finish(cands, best_m, best, nodes, not aborted)


def _parallel(cands: list[OrbitCandidate], cfg: SearchConfig):
    ctx = mp.get_context("fork") if "fork" in mp.get_all_start_methods() else mp.get_context()
    shared = ctx.Value("i", 0)
    results = []
    with ProcessPoolExecutor(cfg.workers, mp_context=ctx, initializer=_worker_init,
                             initargs=(cands, cfg, shared)) as ex:
        results = list(ex.map(_run_branch, range(len(cands))))
    best_m, best, aborted = 0, (), False
    nodes = 1
    for i, m, chosen, cnt, ab in sorted(results):
        nodes += cnt
        aborted |= ab
        if m > best_m:
            best_m, best = m, chosen
    if cfg.target_m is not None:
        # mirror the sequential early exit: first branch (in order) reaching the target
        for i, m, chosen, cnt, ab in sorted(results):
            if m >= cfg.target_m:
                best_m, best = m, chosen
                break
    return best_m, best, nodes, aborted


def _finish(cands, best_m, best, nodes, complete) -> JoinResult:
    if best_m == 0:
        return JoinResult(0, (), None, None, nodes, complete, tuple(cands))
    words = [w for i in best for w in cands[i].words]
    code = PermutationCode.from_words(words)
    n = code.n
    rep = verify_pa(code, n - 1)
    if not rep.ok:
        raise AssertionError(f"search produced a code of min distance {rep.min_distance}")
    part = separability_partition(code)
    if part.r != n or part.m != best_m:
        raise AssertionError(f"search produced ({part.r}, {part.m}), expected ({n}, {best_m})")
    return JoinResult(best_m, tuple(best), code, part, nodes, complete, tuple(cands))
