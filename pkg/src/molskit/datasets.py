"""Shipped constructions: dataset files, loading, and code assembly.

File grammar (see ``docs/data_format.md``)::

    file     := (comment | header | block | blank)*
    header   := key ":" value            # before the first block
    block    := "@" kind name NEWLINE cycletext
    kind     := "E" | "U" | "R" | "K"
    cycletext:= "Id" | cycle+            # may continue over several lines

``@E`` generators have degree n and generate E_G (they enter U diagonally and
the whole of E_G joins the code), ``@U`` are further generators of U (degree
2n), ``@R`` are orbit representatives (degree n), and ``@K`` generate a
certificate subgroup of U (degree 2n).
"""

from __future__ import annotations

import os
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Optional

from .codes import PermutationCode, separability_partition, verify_pa
from .groups import FiniteGroup, match_regular_group, parse_group_spec
from .isometry import (
    IsoElement,
    IsoGroup,
    decompose,
    diagonal,
    diagonal_conjugator,
    generate_group,
    orbit,
    orbit_split,
)
from .perm import Permutation, compose, format_cycles, parse_cycles

DATASET_NAMES = ("n14", "n20", "n21", "n35", "n48", "n56", "n63", "n96")
FORMAT_VERSION = 1


class DatasetError(ValueError):
    pass


class DatasetMismatch(AssertionError):
    """Computed values disagree with the values recorded in the dataset."""

    def __init__(self, name: str, diffs: list[tuple[str, object, object]]):
        lines = [f"  {k}: expected {e}, computed {c}" for k, e, c in diffs]
        super().__init__(f"dataset {name} mismatch:\n" + "\n".join(lines))
        self.diffs = diffs


@dataclass(frozen=True)
class Expected:
    group_order: Optional[int] = None
    orbit_sizes: tuple[int, ...] = ()
    e_split: Optional[tuple[int, ...]] = None
    code_size: Optional[int] = None
    min_distance: Optional[int] = None
    r: Optional[int] = None
    m: Optional[int] = None
    delta_index: Optional[int] = None


@dataclass
class Dataset:
    name: str
    n: int
    group_spec: Optional[str]
    e_generators: list[tuple[str, Permutation]] = field(default_factory=list)
    u_generators: list[tuple[str, IsoElement]] = field(default_factory=list)
    representatives: list[tuple[str, Permutation]] = field(default_factory=list)
    certificate: list[tuple[str, IsoElement]] = field(default_factory=list)
    expected: Expected = field(default_factory=Expected)

    def group(self) -> Optional[FiniteGroup]:
        return parse_group_spec(self.group_spec) if self.group_spec else None

    def generators(self) -> list[IsoElement]:
        """Generators of U: Delta of the E generators first, then the rest."""
        return [diagonal(p) for _, p in self.e_generators] + [g for _, g in self.u_generators]


_INT_KEYS = {"group_order", "code_size", "min_distance", "r", "m", "delta_index"}
_LIST_KEYS = {"orbit_sizes", "e_split"}


def parse_dataset_text(text: str, name: str = "<text>") -> Dataset:
    header: dict[str, str] = {}
    blocks: list[tuple[str, str, list[str], int]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("@"):
            m = re.fullmatch(r"@([EURK])\s+(\S+)", line)
            if not m:
                raise DatasetError(f"{name}:{lineno}: bad block line {raw!r}")
            blocks.append((m.group(1), m.group(2), [], lineno))
        elif blocks:
            blocks[-1][2].append(line)
        else:
            key, sep, value = line.partition(":")
            if not sep:
                raise DatasetError(f"{name}:{lineno}: expected 'key: value', got {raw!r}")
            header[key.strip()] = value.strip()

    if int(header.get("format", FORMAT_VERSION)) != FORMAT_VERSION:
        raise DatasetError(f"{name}: unsupported format version {header['format']}")
    try:
        n = int(header["n"])
    except (KeyError, ValueError):
        raise DatasetError(f"{name}: header needs an integer 'n'") from None

    exp: dict[str, object] = {}
    for key, value in header.items():
        if not key.startswith("expected."):
            continue
        k = key[len("expected."):]
        if k in _INT_KEYS:
            exp[k] = int(value)
        elif k in _LIST_KEYS:
            exp[k] = tuple(int(v) for v in value.split())
        else:
            raise DatasetError(f"{name}: unknown header key {key!r}")

    ds = Dataset(name, n, header.get("group"), expected=Expected(**exp))
    for kind, bname, lines, lineno in blocks:
        body = " ".join(lines)
        try:
            if kind in "ER":
                p = parse_cycles(body, n)
                (ds.e_generators if kind == "E" else ds.representatives).append((bname, p))
            else:
                g = IsoElement(parse_cycles(body, 2 * n))
                (ds.u_generators if kind == "U" else ds.certificate).append((bname, g))
        except ValueError as exc:
            raise DatasetError(f"{name}:{lineno}: block @{kind} {bname}: {exc}") from exc
    if ds.group_spec and ds.group().order != n:
        raise DatasetError(f"{name}: group {ds.group_spec} does not have order {n}")
    return ds


def data_dir() -> Path:
    env = os.environ.get("MOLSKIT_DATA")
    if env:
        return Path(env)
    return Path(str(resources.files("molskit") / "data"))


def load_dataset(name: str) -> Dataset:
    path = data_dir() / f"{name}.txt"
    if name not in DATASET_NAMES and not path.exists():
        raise DatasetError(f"unknown dataset {name!r}; choose from {', '.join(DATASET_NAMES)}")
    try:
        text = path.read_text()
    except FileNotFoundError:
        raise DatasetError(f"dataset file {path} not found") from None
    return parse_dataset_text(text, name)


def e_group(ds: Dataset) -> list[Permutation]:
    """Elements of E_G generated by the @E entries (degree n)."""
    gens = [p for _, p in ds.e_generators]
    ident = Permutation.identity(ds.n)
    seen = {ident}
    frontier = [ident]
    while frontier:
        nxt = []
        for e in frontier:
            for g in gens:
                h = compose(e, g)
                if h not in seen:
                    seen.add(h)
                    nxt.append(h)
        frontier = nxt
    return sorted(seen)


@dataclass
class Assembly:
    dataset: Dataset
    U: IsoGroup
    orbits: list[tuple[str, frozenset[Permutation]]]
    e_orbits: list[frozenset[Permutation]]
    code: PermutationCode

    def orbit_sizes(self) -> list[int]:
        return [len(o) for _, o in self.orbits]


def assemble(ds: Dataset, check: bool = True) -> Assembly:
    U = generate_group(ds.generators(), n=ds.n)
    orbits = [(name, orbit(b, U)) for name, b in ds.representatives]
    words: set[Permutation] = set()
    for _, o in orbits:
        words |= o
    e_orbits: list[frozenset[Permutation]] = []
    if ds.e_generators:
        E = e_group(ds)
        e_orbits = orbit_split(E, U)
        words |= set(E)
    code = PermutationCode(ds.n, frozenset(words))
    asm = Assembly(ds, U, orbits, e_orbits, code)
    if check:
        ex = ds.expected
        diffs = []
        if ex.group_order is not None and U.order != ex.group_order:
            diffs.append(("group_order", ex.group_order, U.order))
        if ex.orbit_sizes and tuple(asm.orbit_sizes()) != ex.orbit_sizes:
            diffs.append(("orbit_sizes", ex.orbit_sizes, tuple(asm.orbit_sizes())))
        split = tuple(len(o) for o in e_orbits)
        if ex.e_split is not None and split != ex.e_split:
            diffs.append(("e_split", ex.e_split, split))
        if ex.code_size is not None and len(code) != ex.code_size:
            diffs.append(("code_size", ex.code_size, len(code)))
        if diffs:
            raise DatasetMismatch(ds.name, diffs)
    return asm


def assemble_code(ds: Dataset) -> PermutationCode:
    return assemble(ds).code


def e_is_regular(ds: Dataset) -> bool:
    """E_G is a regular group isomorphic to the dataset's G."""
    G = ds.group()
    if G is None or not ds.e_generators:
        return False
    return match_regular_group(e_group(ds), G) is not None


@dataclass
class DeltaCertificate:
    order: int
    in_U: bool
    index: int
    conjugator: Optional[IsoElement]

    @property
    def ok(self) -> bool:
        return self.in_U and self.conjugator is not None


def check_delta_certificate(ds: Dataset, U: IsoGroup) -> DeltaCertificate:
    """Check that the @K elements generate a conjugate of Delta(Phi(R(G))) inside U."""
    G = ds.group()
    if G is None or not ds.certificate:
        raise DatasetError(f"{ds.name}: no group or certificate to check")
    K = generate_group([g for _, g in ds.certificate], n=ds.n)
    in_U = all(k in U for k in K.elements)
    h = diagonal_conjugator(K.elements, G) if K.order == G.order else None
    return DeltaCertificate(K.order, in_U, U.order // K.order, h)


def is_double_coset(words: frozenset[Permutation], H: list[Permutation], K: list[Permutation]) -> bool:
    """``words == H * Id * K`` as a set of products ``h k`` (apply h, then k)."""
    prods = {compose(h, k) for h in H for k in K}
    return prods == set(words)


def cyclic_closure(p: Permutation) -> list[Permutation]:
    out = [Permutation.identity(p.degree)]
    x = p
    while not x.is_identity():
        out.append(x)
        x = compose(x, p)
    return out


def block_projections(g: IsoElement) -> tuple[Permutation, Permutation]:
    b1, b2, _ = decompose(g)
    return b1, b2


def reproduce(ds: Dataset) -> dict:
    """Full verification chain for a dataset; returns a plain report dict."""
    asm = assemble(ds)
    code = asm.code
    rep = verify_pa(code, ds.n - 1)
    part = separability_partition(code)
    out = {
        "dataset": ds.name,
        "n": ds.n,
        "group_order": asm.U.order,
        "orbit_sizes": {name: len(o) for name, o in asm.orbits},
        "e_split": [len(o) for o in asm.e_orbits],
        "code_size": len(code),
        "min_distance": rep.min_distance,
        "r": part.r,
        "m": part.m,
    }
    ex = ds.expected
    diffs = []
    for key, want in (("min_distance", ex.min_distance), ("r", ex.r), ("m", ex.m)):
        if want is not None and out[key] != want:
            diffs.append((key, want, out[key]))
    if ds.certificate:
        cert = check_delta_certificate(ds, asm.U)
        out["delta"] = {"order": cert.order, "in_U": cert.in_U, "index": cert.index, "conjugate": cert.ok}
        if not cert.ok or (ex.delta_index is not None and cert.index != ex.delta_index):
            diffs.append(("delta_index", ex.delta_index, cert.index if cert.ok else None))
    if diffs:
        raise DatasetMismatch(ds.name, diffs)
    return out


def format_code(code: PermutationCode, comment: str = "") -> str:
    lines = []
    if comment:
        lines += [f"# {ln}" for ln in comment.splitlines()]
    lines += [f"format: {FORMAT_VERSION}", f"n: {code.n}", f"expected.code_size: {len(code)}", ""]
    for i, w in enumerate(code.sorted_words(), 1):
        lines += [f"@R w_{i}", format_cycles(w)]
    return "\n".join(lines) + "\n"


def parse_code(text: str, name: str = "<code>") -> PermutationCode:
    """Read a code file: every @R word is a codeword (duplicates are rejected)."""
    ds = parse_dataset_text(text, name)
    if ds.u_generators or ds.e_generators:
        return assemble_code(ds)
    if not ds.representatives:
        raise DatasetError(f"{name}: no codewords")
    return PermutationCode.from_words([p for _, p in ds.representatives])


def load_code(source: str) -> PermutationCode:
    """A dataset name or a path to a code/dataset file."""
    if source in DATASET_NAMES and not Path(source).exists():
        return assemble_code(load_dataset(source))
    return parse_code(Path(source).read_text(), source)
