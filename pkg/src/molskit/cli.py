"""Command-line front end: verify, convert, search, bound, orbits.

Exit codes: 0 success, 1 a verification failed, 2 bad input.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional

from . import __version__
from .codes import (
    NotLatin,
    PermutationCode,
    SeparabilityError,
    code_to_mols,
    macneish_bound,
    mols_from_json,
    mols_from_text,
    mols_to_code,
    mols_to_json,
    mols_to_text,
    separability_partition,
    verify_pa,
)
from .datasets import (
    DATASET_NAMES,
    DatasetError,
    DatasetMismatch,
    assemble,
    format_code,
    load_code,
    load_dataset,
    reproduce,
)
from .diffmat import DifferenceMatrixError, code_to_dm, dm_to_code, format_dm, normalize_dm, parse_dm
from .groups import parse_group_spec
from .isometry import IsoElement, IsoGroup, generate_group
from .perm import format_cycles, parse_cycles
from .search import SearchConfig, backtrack_join, enumerate_orbits

REPORT_VERSION = 1
OK, FAILED, BAD_INPUT = 0, 1, 2


@dataclass
class CommandOutcome:
    exit_code: int
    report: dict = field(default_factory=dict)


class InputError(Exception):
    pass


def _witness(w) -> list[str]:
    return [format_cycles(p) for p in w] if w else []


def _check_code(code: PermutationCode, mols: bool) -> CommandOutcome:
    rep = verify_pa(code, code.n - 1)
    report = {"n": code.n, "code_size": len(code), "min_distance": rep.min_distance}
    if not rep.ok:
        report["error"] = f"minimum distance {rep.min_distance} < n-1"
        report["witness"] = _witness(rep.witness)
        return CommandOutcome(FAILED, report)
    part = separability_partition(code)
    report.update(r=part.r, m=part.m)
    if mols:
        report["mols"] = len(code_to_mols(part))
    return CommandOutcome(OK, report)


def cmd_verify(args) -> CommandOutcome:
    src = args.source
    try:
        if src in DATASET_NAMES and not Path(src).exists():
            ds = load_dataset(src)
            report = reproduce(ds)
            if args.mols:
                part = separability_partition(assemble(ds, check=False).code)
                report["mols"] = len(code_to_mols(part))
            return CommandOutcome(OK, report)
        code = load_code(src)
    except DatasetMismatch as exc:
        return CommandOutcome(FAILED, {"error": str(exc), "diffs": [list(map(str, d)) for d in exc.diffs]})
    except SeparabilityError as exc:
        return CommandOutcome(FAILED, {"error": str(exc), "witness": _witness(exc.witness)})
    except NotLatin as exc:
        return CommandOutcome(FAILED, {"error": str(exc)})
    except (DatasetError, ValueError, OSError) as exc:
        raise InputError(str(exc)) from exc
    try:
        return _check_code(code, args.mols)
    except (SeparabilityError, NotLatin) as exc:
        return CommandOutcome(FAILED, {"error": str(exc), "witness": _witness(getattr(exc, "witness", ()))})


def _read(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    return Path(path).read_text()


def _write(path: Optional[str], text: str) -> None:
    if not path or path == "-":
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def _read_mols(text: str):
    return mols_from_json(text) if text.lstrip().startswith("[") else mols_from_text(text)


def cmd_convert(args) -> CommandOutcome:
    d = args.direction
    try:
        if d == "dm-to-code":
            D = parse_dm(_read(args.input))
            if not D.is_normalized():
                D = normalize_dm(D)
            code = dm_to_code(D)
            out = format_code(code, f"code of the {D.G.name} difference matrix, m={D.m}")
            report = {"words": len(code), "m": D.m}
        elif d == "code-to-dm":
            if not args.group:
                raise InputError("code-to-dm needs --group, e.g. --group Z7")
            G = parse_group_spec(args.group)
            code = load_code(args.input)
            D = code_to_dm(code, G, args.group)
            out = format_dm(D)
            report = {"rows": len(D.rows), "cols": D.cols}
        elif d == "code-to-mols":
            code = load_code(args.input)
            mols = code_to_mols(separability_partition(code))
            out = mols_to_json(mols) + "\n" if args.format == "json" else mols_to_text(mols)
            report = {"squares": len(mols), "n": mols.n}
        elif d == "mols-to-code":
            mols = _read_mols(_read(args.input))
            code = mols_to_code(mols)
            out = format_code(code, f"code of {len(mols)} MOLS of order {mols.n}")
            report = {"words": len(code), "n": code.n}
        else:  # argparse restricts choices
            raise InputError(f"unknown direction {d}")
        if d in ("dm-to-code", "mols-to-code"):
            check = _check_code(code, mols=False)
            if check.exit_code != OK:
                return check
    except SeparabilityError as exc:
        return CommandOutcome(FAILED, {"error": str(exc), "witness": _witness(exc.witness)})
    except (DifferenceMatrixError, NotLatin) as exc:
        return CommandOutcome(FAILED, {"error": str(exc)})
    except (DatasetError, ValueError, OSError, json.JSONDecodeError) as exc:
        raise InputError(str(exc)) from exc
    _write(args.output, out)
    report["direction"] = d
    return CommandOutcome(OK, report)


def _search_setup(cfg_json: dict, workers: int):
    """Build (SearchConfig, universe) from a search config document.

    Keys: ``dataset`` (take U, seeds and E orbits from a shipped dataset) or
    ``n`` + ``generators`` (degree-2n cycle strings); optional ``seeds``,
    ``universe``, ``required_stabilizer``, ``target_m``, ``node_limit``,
    ``checkpoint``, ``checkpoint_every``, ``include_e_orbits``.
    """
    seeds = []
    if "dataset" in cfg_json:
        ds = load_dataset(cfg_json["dataset"])
        asm = assemble(ds)
        U = asm.U
        n = ds.n
        seeds += [b for _, b in ds.representatives]
        if cfg_json.get("include_e_orbits", True):
            seeds += [min(o) for o in asm.e_orbits]
    else:
        n = int(cfg_json["n"])
        gens = [IsoElement(parse_cycles(s, 2 * n)) for s in cfg_json["generators"]]
        U = generate_group(gens, n=n)
    seeds += [parse_cycles(s, n) for s in cfg_json.get("seeds", [])]
    universe = None
    if "universe" in cfg_json:
        universe = [parse_cycles(s, n) for s in cfg_json["universe"]]
    stab = tuple(IsoElement(parse_cycles(s, 2 * n)) for s in cfg_json.get("required_stabilizer", []))
    cfg = SearchConfig(
        U,
        required_stabilizer=stab,
        target_m=cfg_json.get("target_m"),
        seed_orbits=tuple(seeds),
        node_limit=int(cfg_json.get("node_limit", 10**8)),
        checkpoint_path=cfg_json.get("checkpoint"),
        checkpoint_every=int(cfg_json.get("checkpoint_every", 10**6)),
        workers=workers,
    )
    return cfg, universe


def cmd_search(args) -> CommandOutcome:
    try:
        cfg_json = json.loads(_read(args.config))
        cfg, universe = _search_setup(cfg_json, args.workers)
    except (DatasetError, ValueError, KeyError, OSError, json.JSONDecodeError) as exc:
        raise InputError(f"bad search config: {exc}") from exc
    if args.resume and not cfg.checkpoint_path:
        cfg.checkpoint_path = args.resume
    en = enumerate_orbits(cfg, universe)
    if not en.candidates:
        return CommandOutcome(OK, {"version": REPORT_VERSION, "candidates": [], "m_found": 0,
                                   "words": 0, "node_count": 0, "complete": en.complete})
    try:
        res = backtrack_join(en.candidates, cfg, resume_from=args.resume)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    report = res.report()
    report["complete"] = res.complete and en.complete
    if res.code is not None and args.code_out:
        Path(args.code_out).write_text(format_code(res.code, f"search result, m={res.m}"))
    return CommandOutcome(OK, report)


def cmd_bound(args) -> CommandOutcome:
    if args.n < 2:
        raise InputError("n must be at least 2")
    return CommandOutcome(OK, {"n": args.n, "macneish_bound": macneish_bound(args.n)})


def cmd_orbits(args) -> CommandOutcome:
    try:
        ds = load_dataset(args.dataset)
        asm = assemble(ds, check=False)
    except (DatasetError, ValueError) as exc:
        raise InputError(str(exc)) from exc
    rows = [
        {"name": name, "size": len(o), "stabilizer_order": asm.U.order // len(o)}
        for name, o in asm.orbits
    ]
    rows += [
        {"name": f"E[{i}]", "size": len(o), "stabilizer_order": asm.U.order // len(o)}
        for i, o in enumerate(asm.e_orbits)
    ]
    return CommandOutcome(OK, {"dataset": ds.name, "n": ds.n, "group_order": asm.U.order, "orbits": rows})


def _human(report: dict) -> str:
    lines = []
    for k, v in report.items():
        if k == "orbits":
            lines.append(f"{'orbit':<10}{'size':>8}{'|stab|':>8}")
            lines += [f"{r['name']:<10}{r['size']:>8}{r['stabilizer_order']:>8}" for r in v]
        elif k == "candidates":
            lines.append(f"candidates: {len(v)} (sizes {', '.join(str(c['size']) for c in v)})")
        elif isinstance(v, dict):
            lines.append(f"{k}: " + ", ".join(f"{a}={b}" for a, b in v.items()))
        else:
            lines.append(f"{k}: {v}")
    return "\n".join(lines)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="molskit", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=f"molskit {__version__}")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--json", action="store_true", help="print the JSON report")
        sp.add_argument("--quiet", action="store_true", help="print nothing; use the exit code")

    v = sub.add_parser("verify", help="verify a shipped dataset or a code file")
    v.add_argument("source", help=f"dataset ({', '.join(DATASET_NAMES)}) or path")
    v.add_argument("--mols", action="store_true", help="also build the Latin squares")
    common(v)
    v.set_defaults(func=cmd_verify)

    c = sub.add_parser("convert", help="convert between DMs, codes and MOLS")
    c.add_argument("direction", choices=["dm-to-code", "code-to-dm", "code-to-mols", "mols-to-code"])
    c.add_argument("input")
    c.add_argument("output", nargs="?", default="-")
    c.add_argument("--group", help="group spec such as Z7 or Z3xZ21")
    c.add_argument("--format", choices=["json", "text"], default="text")
    common(c)
    c.set_defaults(func=cmd_convert)

    s = sub.add_parser("search", help="orbit enumeration and backtrack join")
    s.add_argument("config", help="search config JSON")
    s.add_argument("--resume", help="checkpoint file to resume from")
    s.add_argument("--workers", type=int, default=1)
    s.add_argument("--code-out", help="write the best code here")
    common(s)
    s.set_defaults(func=cmd_search)

    b = sub.add_parser("bound", help="MacNeish lower bound for N(n)")
    b.add_argument("n", type=int)
    common(b)
    b.set_defaults(func=cmd_bound)

    o = sub.add_parser("orbits", help="orbit table of a dataset")
    o.add_argument("dataset")
    common(o)
    o.set_defaults(func=cmd_orbits)
    return p


def run(argv=None) -> CommandOutcome:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        outcome = args.func(args)
    except InputError as exc:
        outcome = CommandOutcome(BAD_INPUT, {"error": str(exc)})
    outcome.report = {"version": REPORT_VERSION, "command": args.command, "exit_code": outcome.exit_code,
                      **{k: v for k, v in outcome.report.items() if k != "version"}}
    if not args.quiet:
        stream = sys.stdout if outcome.exit_code == OK else sys.stderr
        if args.json:
            print(json.dumps(outcome.report, indent=2, sort_keys=True), file=stream)
        else:
            print(_human(outcome.report), file=stream)
    return outcome


def main(argv=None) -> int:
    try:
        return run(argv).exit_code
    except SystemExit as exc:  # argparse usage errors
        return BAD_INPUT if exc.code else OK


if __name__ == "__main__":
    sys.exit(main())
