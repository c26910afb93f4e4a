#!/usr/bin/env python3
"""Rerun the orbit search on a shipped dataset's candidate orbits.

The candidates are the orbits of the published representatives plus the
orbits of the translation group E where the dataset has one; the search then
looks for the largest compatible union.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

from molskit.datasets import assemble, format_code, load_dataset
from molskit.search import SearchConfig, backtrack_join, enumerate_orbits


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("dataset", nargs="?", default="n35")
    ap.add_argument("--workers", type=int, default=1)
    ap.add_argument("--target-m", type=int)
    ap.add_argument("--node-limit", type=int, default=10**8)
    ap.add_argument("--code-out", help="write the best code here")
    args = ap.parse_args(argv)

    ds = load_dataset(args.dataset)
    asm = assemble(ds)
    seeds = tuple(b for _, b in ds.representatives) + tuple(min(o) for o in asm.e_orbits)
    cfg = SearchConfig(asm.U, seed_orbits=seeds, target_m=args.target_m,
                       node_limit=args.node_limit, workers=args.workers)
    t0 = time.perf_counter()
    cands = enumerate_orbits(cfg).candidates
    res = backtrack_join(cands, cfg)
    rep = res.report()
    rep["seconds"] = round(time.perf_counter() - t0, 3)
    print(json.dumps(rep, indent=2))
    if args.code_out and res.code is not None:
        with open(args.code_out, "w") as fh:
            fh.write(format_code(res.code, f"search result for {args.dataset}, m = {res.m}"))
    return 0 if res.code is not None else 1


if __name__ == "__main__":
    sys.exit(main())
