#!/usr/bin/env python3
"""Rebuild every shipped dataset and print the verification numbers as a table."""
from __future__ import annotations

import argparse
import json
import sys
import time

from molskit.codes import code_to_mols, separability_partition
from molskit.datasets import DATASET_NAMES, DatasetMismatch, assemble, load_dataset, reproduce


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("names", nargs="*", default=list(DATASET_NAMES))
    ap.add_argument("--json", action="store_true", help="one JSON report per line")
    args = ap.parse_args(argv)
    failed = 0
    if not args.json:
        print(f"{'set':>4} {'|U|':>6} {'|C|':>5} {'d':>3} {'r':>3} {'m':>3} {'mols':>4} {'sec':>6}  orbits")
    for name in args.names:
        t0 = time.perf_counter()
        ds = load_dataset(name)
        try:
            rep = reproduce(ds)
        except DatasetMismatch as exc:
            print(f"{name}: MISMATCH {exc.diffs}", file=sys.stderr)
            failed += 1
            continue
        rep["mols"] = len(code_to_mols(separability_partition(assemble(ds).code)))
        rep["seconds"] = round(time.perf_counter() - t0, 2)
        if args.json:
            print(json.dumps(rep))
            continue
        orbits = "/".join(str(v) for v in sorted(rep["orbit_sizes"].values(), reverse=True))
        print(f"{name:>4} {rep['group_order']:>6} {rep['code_size']:>5} {rep['min_distance']:>3} {rep['r']:>3} "
              f"{rep['m']:>3} {rep['mols']:>4} {rep['seconds']:>6}  {orbits}")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main())
