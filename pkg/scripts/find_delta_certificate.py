#!/usr/bin/env python3
"""Search U for a subgroup conjugate to Delta(Phi(R(G))) and print it as @K blocks.

Elements of Delta(Phi(R(G))) move every point of both blocks, so only such
elements of U are candidates.  Abelian subgroups of order |G| built from them
are grown by backtracking and each one found is tested with
``diagonal_conjugator``.  Slow (minutes for n=96); the result ships in the
dataset file so the test suite only has to check it.
"""
from __future__ import annotations

import argparse
import sys

from molskit.datasets import load_dataset
from molskit.groups import parse_group_spec
from molskit.isometry import decompose, diagonal_conjugator, generate_group, iso_compose
from molskit.perm import format_cycles


def fixed_point_free(g) -> bool:
    b1, b2, swap = decompose(g)
    return not swap and b1.fixed_points() == 0 and b2.fixed_points() == 0


def commute(a, b) -> bool:
    return iso_compose(a, b) == iso_compose(b, a)


def find_subgroup(U, order: int, n: int, G):
    cands = [g for g in U.elements if fixed_point_free(g)]
    allowed = set(cands)
    ident = U.elements[0]

    def grow(gens, elems, start):
        if len(elems) == order:
            return gens if diagonal_conjugator(list(elems), G) is not None else None
        for i in range(start, len(cands)):
            c = cands[i]
            if c in elems or not all(commute(c, g) for g in gens):
                continue
            H = generate_group(gens + [c], n=n).elements
            if order % len(H) or not all(h == ident or h in allowed for h in H):
                continue
            found = grow(gens + [c], set(H), i + 1)
            if found:
                return found
        return None

    return grow([], {ident}, 0)


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("dataset", nargs="?", default="n96")
    ap.add_argument("--group", help="group spec (default: the dataset's)")
    args = ap.parse_args(argv)
    ds = load_dataset(args.dataset)
    G = parse_group_spec(args.group or ds.group_spec)
    U = generate_group(ds.generators(), n=ds.n)
    print(f"# |U| = {U.order}, looking for a conjugate of Delta(Phi(R({G.name}))) of order {G.order}",
          file=sys.stderr)
    gens = find_subgroup(U, G.order, ds.n, G)
    if gens is None:
        print("no such subgroup", file=sys.stderr)
        return 1
    for i, g in enumerate(gens, 1):
        print(f"@K k_{i}\n{format_cycles(g.inner)}")
    print(f"# index {U.order // G.order}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
