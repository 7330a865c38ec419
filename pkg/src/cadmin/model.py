"""The CAD data model.

A decomposition is stored in two layers.  :class:`AtomicCad` is what lifting
produces: every cell with an exact sample point, the indexed root defining
each section, and which basis polynomials vanish on the cell.  :class:`Cad`
is a coarsening of an atomic CAD, given by a map sending every atomic index
to the index of the current cell that contains it.  Reductions only rewrite
that map, so cells, stacks and bound functions of a reduced CAD are derived
views over the atomic data.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping, Sequence

from .exact.algebraic import (
    AlgebraicNumber,
    CurtainFibre,
    ExtendedReal,
    real_roots_at,
    sign_at,
)
from .exact.poly import Polynomial

Index = tuple[int, ...]

FORMAT_NAME = "cadmin.cad"
FORMAT_VERSION = 1

SECTION, SECTOR = "SECTION", "SECTOR"


class ComparisonFailure(RuntimeError):
    """Refinement between two CADs could not be decided exactly."""


# -- index helpers ------------------------------------------------------------

def is_even(idx: Index) -> bool:
    return bool(idx) and idx[-1] % 2 == 0


def kind_of(idx: Index) -> str:
    return SECTION if is_even(idx) else SECTOR


def shift(idx: Index, level: int, amount: int) -> Index:
    """Add ``amount`` times the unit vector of ``level`` (1-based)."""
    out = list(idx)
    out[level - 1] += amount
    return tuple(out)


def parity_profile(idx: Index) -> tuple[int, ...]:
    return tuple(e % 2 for e in idx)


def index_str(idx: Index) -> str:
    return "(" + ",".join(map(str, idx)) + ")"


# -- atomic layer -------------------------------------------------------------

@dataclass(frozen=True)
class IndexedRoot:
    """The ``root_number``-th distinct real root (1-based) of ``poly`` in its
    last variable, over each point of some base cell."""

    poly: Polynomial
    root_number: int

    def value_at(self, point: Sequence[AlgebraicNumber]) -> AlgebraicNumber:
        roots = real_roots_at(self.poly, point)
        if len(roots) < self.root_number:
            raise ValueError(f"fewer than {self.root_number} roots over the point")
        return roots[self.root_number - 1]

    def to_json(self) -> dict:
        return {"poly": self.poly.to_json(), "rootNumber": self.root_number}

    @classmethod
    def from_json(cls, data: dict, nvars: int) -> IndexedRoot:
        return cls(Polynomial.from_json(data["poly"], nvars), int(data["rootNumber"]))


ZeroKey = tuple[int, int]  # (level, position in that level's basis)


@dataclass(frozen=True)
class AtomicCell:
    index: Index
    sample: tuple[AlgebraicNumber, ...]
    root: IndexedRoot | None
    zeros: frozenset[ZeroKey]

    @property
    def kind(self) -> str:
        return kind_of(self.index)

    @property
    def base(self) -> Index:
        return self.index[:-1]


@dataclass(frozen=True, eq=False)
class AtomicCad:
    """Output of projection and lifting: one stack per base cell.

    ``nullified[b]`` lists basis positions of level ``len(b)+1`` that vanish
    identically over base cell ``b`` (curtain fibres); they contribute no
    sections there.
    """

    dimension: int
    variables: tuple[str, ...]
    basis: tuple[tuple[Polynomial, ...], ...]
    cells: Mapping[Index, AtomicCell]
    nullified: Mapping[Index, frozenset[int]]

    @cached_property
    def children(self) -> dict[Index, tuple[Index, ...]]:
        out: dict[Index, list[Index]] = {}
        for idx in self.cells:
            if idx:
                out.setdefault(idx[:-1], []).append(idx)
        return {b: tuple(sorted(v)) for b, v in out.items()}

    def stack_size(self, base: Index) -> int:
        return (len(self.children.get(base, ())) - 1) // 2

    def level(self, k: int) -> list[Index]:
        return sorted(i for i in self.cells if len(i) == k)

    def roots_over(self, base: Index, prefix: Sequence[AlgebraicNumber]) -> list[AlgebraicNumber]:
        """Distinct roots of the next level's basis at a point of cell ``base``."""
        k = len(base) + 1
        skip = self.nullified.get(base, frozenset())
        found: list[AlgebraicNumber] = []
        for pos, p in enumerate(self.basis[k - 1]):
            if pos in skip:
                continue
            try:
                roots = real_roots_at(p, prefix)
            except CurtainFibre:
                continue
            for r in roots:
                if r not in found:
                    found.append(r)
        found.sort()
        return found

    def locate(self, point: Sequence[AlgebraicNumber], depth: int | None = None) -> Index:
        """Atomic cell containing ``point`` (restricted to its first ``depth`` coordinates)."""
        depth = len(point) if depth is None else depth
        idx: Index = ()
        for k in range(1, depth + 1):
            roots = self.roots_over(idx, point[: k - 1])
            if len(roots) != self.stack_size(idx):
                raise ValueError(
                    f"root count {len(roots)} over {index_str(idx)} disagrees with stack size"
                )
            x = point[k - 1]
            pos = 1
            for r in roots:
                c = x.compare(r)
                if c < 0:
                    break
                if c == 0:
                    pos += 1
                    break
                pos += 2
            idx = idx + (pos,)
        return idx

    @cached_property
    def serial(self) -> dict:
        cells = []
        for idx in sorted(self.cells):
            c = self.cells[idx]
            cells.append(
                {
                    "index": list(idx),
                    "sample": [a.to_json() for a in c.sample],
                    "root": None if c.root is None else c.root.to_json(),
                    "zeros": sorted([list(z) for z in c.zeros]),
                }
            )
        return {
            "dimension": self.dimension,
            "variables": list(self.variables),
            "basis": [[p.to_json() for p in lvl] for lvl in self.basis],
            "nullified": [
                {"base": list(b), "positions": sorted(v)}
                for b, v in sorted(self.nullified.items())
                if v
            ],
            "cells": cells,
        }

    @cached_property
    def fingerprint(self) -> str:
        return json.dumps(self.serial, sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_serial(cls, data: dict) -> AtomicCad:
        n = int(data["dimension"])
        basis = tuple(
            tuple(Polynomial.from_json(p, k + 1) for p in lvl) for k, lvl in enumerate(data["basis"])
        )
        cells = {}
        for c in data["cells"]:
            idx = tuple(c["index"])
            root = None if c["root"] is None else IndexedRoot.from_json(c["root"], len(idx))
            cells[idx] = AtomicCell(
                idx,
                tuple(AlgebraicNumber.from_json(a) for a in c["sample"]),
                root,
                frozenset(tuple(z) for z in c["zeros"]),
            )
        nullified = {tuple(e["base"]): frozenset(e["positions"]) for e in data["nullified"]}
        return cls(n, tuple(data["variables"]), basis, cells, nullified)


# -- certificates -------------------------------------------------------------

@dataclass(frozen=True)
class CertificateCheck:
    boundary_cell: Index
    adjacent_cell: Index
    limit: ExtendedReal | None
    matched_value: ExtendedReal | None
    verdict: bool
    note: str = ""

    def to_json(self) -> dict:
        return {
            "boundaryCell": list(self.boundary_cell),
            "adjacentCell": list(self.adjacent_cell),
            "limit": None if self.limit is None else self.limit.to_json(),
            "matchedValue": None if self.matched_value is None else self.matched_value.to_json(),
            "verdict": self.verdict,
            "note": self.note,
        }

    @classmethod
    def from_json(cls, d: dict) -> CertificateCheck:
        return cls(
            tuple(d["boundaryCell"]),
            tuple(d["adjacentCell"]),
            None if d["limit"] is None else ExtendedReal.from_json(d["limit"]),
            None if d["matchedValue"] is None else ExtendedReal.from_json(d["matchedValue"]),
            bool(d["verdict"]),
            d.get("note", ""),
        )


@dataclass(frozen=True)
class ContinuityCertificate:
    site: Index
    section: Index
    checks: tuple[CertificateCheck, ...]

    @property
    def verdict(self) -> bool:
        return all(c.verdict for c in self.checks)

    def to_json(self) -> dict:
        return {
            "site": list(self.site),
            "section": list(self.section),
            "checks": [c.to_json() for c in self.checks],
        }

    @classmethod
    def from_json(cls, d: dict) -> ContinuityCertificate:
        return cls(
            tuple(d["site"]), tuple(d["section"]), tuple(CertificateCheck.from_json(c) for c in d["checks"])
        )


# -- current cells ------------------------------------------------------------

@dataclass(frozen=True)
class BoundFunction:
    """Piecewise indexed roots, keyed by atomic base cell."""

    pieces: tuple[tuple[Index, IndexedRoot], ...]

    def as_dict(self) -> dict[Index, IndexedRoot]:
        return dict(self.pieces)

    def __len__(self):
        return len(self.pieces)

    def polynomials(self) -> set[Polynomial]:
        return {r.poly for _, r in self.pieces}


@dataclass(frozen=True)
class Cell:
    index: Index
    kind: str
    base: Index
    sample: tuple[AlgebraicNumber, ...]
    bound: BoundFunction | None = None
    lower: BoundFunction | None = None  # None means -inf for sectors
    upper: BoundFunction | None = None  # None means +inf for sectors


@dataclass(frozen=True, eq=False)
class Cad:
    atomic: AtomicCad
    relabel: Mapping[Index, Index]
    stack_sizes: Mapping[Index, int]
    certificates: Mapping[frozenset, ContinuityCertificate] = field(default_factory=dict)

    @classmethod
    def from_atomic(cls, atomic: AtomicCad) -> Cad:
        relabel = {i: i for i in atomic.cells if i}
        sizes = {b: atomic.stack_size(b) for b in atomic.children}
        return cls(atomic, relabel, sizes, {})

    @property
    def dimension(self) -> int:
        return self.atomic.dimension

    @cached_property
    def constituents(self) -> dict[Index, tuple[Index, ...]]:
        out: dict[Index, list[Index]] = {(): [()]}
        for a, c in self.relabel.items():
            out.setdefault(c, []).append(a)
        return {c: tuple(sorted(v)) for c, v in out.items()}

    @cached_property
    def children(self) -> dict[Index, tuple[Index, ...]]:
        out: dict[Index, set[Index]] = {}
        for c in self.constituents:
            if c:
                out.setdefault(c[:-1], set()).add(c)
        return {b: tuple(sorted(v)) for b, v in out.items()}

    def level(self, k: int) -> list[Index]:
        return sorted(c for c in self.constituents if len(c) == k)

    def level_counts(self) -> list[int]:
        return [len(self.level(k)) for k in range(1, self.dimension + 1)]

    @property
    def cell_count(self) -> int:
        return len(self.level(self.dimension))

    @property
    def total_cells(self) -> int:
        return len(self.constituents) - 1

    def representative(self, idx: Index) -> Index:
        """An atomic constituent whose parity profile matches ``idx``."""
        prof = parity_profile(idx)
        for a in self.constituents[idx]:
            if parity_profile(a) == prof:
                return a
        return self.constituents[idx][0]

    def sample(self, idx: Index) -> tuple[AlgebraicNumber, ...]:
        return self.atomic.cells[self.representative(idx)].sample if idx else ()

    def bound(self, idx: Index) -> BoundFunction:
        if not is_even(idx):
            raise ValueError(f"{index_str(idx)} is not a section")
        pieces = []
        for a in self.constituents[idx]:
            pieces.append((a[:-1], self.atomic.cells[a].root))
        return BoundFunction(tuple(sorted(pieces, key=lambda p: p[0])))

    def cell(self, idx: Index) -> Cell:
        base = idx[:-1]
        if is_even(idx):
            return Cell(idx, SECTION, base, self.sample(idx), bound=self.bound(idx))
        u = self.stack_sizes.get(base, 0)
        j = idx[-1]
        lower = self.bound(base + (j - 1,)) if j > 1 else None
        upper = self.bound(base + (j + 1,)) if j < 2 * u + 1 else None
        return Cell(idx, SECTOR, base, self.sample(idx), lower=lower, upper=upper)

    def cells(self, k: int | None = None) -> list[Cell]:
        k = self.dimension if k is None else k
        return [self.cell(i) for i in self.level(k)]

    def locate(self, point: Sequence[AlgebraicNumber]) -> Index:
        a = self.atomic.locate(point)
        return self.relabel[a] if a else ()

    # -- identity -----------------------------------------------------------
    @cached_property
    def partition_key(self) -> tuple:
        return tuple(sorted(self.relabel.items()))

    @cached_property
    def canonical_hash(self) -> str:
        import hashlib

        h = hashlib.sha256(self.atomic.fingerprint.encode())
        h.update(repr(self.partition_key).encode())
        return h.hexdigest()

    def __eq__(self, other):
        return isinstance(other, Cad) and self.canonical_hash == other.canonical_hash

    def __hash__(self):
        return hash(self.canonical_hash)

    # -- serialization --------------------------------------------------------
    def to_json(self) -> dict:
        current = []
        for k in range(1, self.dimension + 1):
            for idx in self.level(k):
                entry = {"index": list(idx), "kind": kind_of(idx)}
                if is_even(idx):
                    entry["pieces"] = [
                        {"base": list(b), **r.to_json()} for b, r in self.bound(idx).pieces
                    ]
                current.append(entry)
        return {
            "format": FORMAT_NAME,
            "version": FORMAT_VERSION,
            "atomic": self.atomic.serial,
            "relabel": [[list(a), list(c)] for a, c in sorted(self.relabel.items())],
            "stackSizes": [[list(b), u] for b, u in sorted(self.stack_sizes.items())],
            "certificates": [
                {"constituents": sorted(list(i) for i in key), "certificate": cert.to_json()}
                for key, cert in sorted(
                    self.certificates.items(), key=lambda kv: sorted(kv[0])
                )
            ],
            "cells": current,
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True, indent=1)

    @classmethod
    def from_json(cls, data: dict) -> Cad:
        if data.get("format") != FORMAT_NAME:
            raise ValueError("not a serialized CAD")
        if data.get("version") != FORMAT_VERSION:
            raise ValueError(f"unsupported CAD format version {data.get('version')}")
        atomic = AtomicCad.from_serial(data["atomic"])
        relabel = {tuple(a): tuple(c) for a, c in data["relabel"]}
        sizes = {tuple(b): int(u) for b, u in data["stackSizes"]}
        certs = {
            frozenset(tuple(i) for i in e["constituents"]): ContinuityCertificate.from_json(e["certificate"])
            for e in data["certificates"]
        }
        return cls(atomic, relabel, sizes, certs)

    @classmethod
    def loads(cls, text: str) -> Cad:
        return cls.from_json(json.loads(text))


def cell_membership(c: Cad, point: Sequence[AlgebraicNumber]) -> Index:
    if len(point) != c.dimension:
        raise ValueError("point dimension differs from the CAD dimension")
    pt = [p if isinstance(p, AlgebraicNumber) else AlgebraicNumber.from_rational(p) for p in point]
    return c.locate(pt)


# -- validation ---------------------------------------------------------------

@dataclass
class ValidationReport:
    violations: list[str]

    @property
    def ok(self) -> bool:
        return not self.violations

    def __bool__(self):
        return self.ok


def validate_cad(c: Cad) -> ValidationReport:
    v: list[str] = []
    at = c.atomic
    n = c.dimension
    if set(c.relabel) != {i for i in at.cells if i}:
        v.append("relabel does not cover the atomic cells")
        return ValidationReport(v)
    for a, cur in c.relabel.items():
        if len(a) != len(cur):
            v.append(f"relabel changes the level of {index_str(a)}")
        elif len(a) > 1 and c.relabel[a[:-1]] != cur[:-1]:
            v.append(f"relabel of {index_str(a)} is not prefix consistent")
    if v:
        return ValidationReport(v)

    bases = [b for b in c.constituents if len(b) < n]
    for b in bases:
        kids = c.children.get(b, ())
        u = c.stack_sizes.get(b)
        lasts = [k[-1] for k in kids]
        if lasts != list(range(1, len(kids) + 1)) or len(kids) % 2 == 0:
            v.append(f"stack over {index_str(b)} is not 1..2u+1")
        if u is None or 2 * u + 1 != len(kids):
            v.append(f"stack arity: {index_str(b)} claims u={u} but has {len(kids)} cells")
    extra = set(c.stack_sizes) - set(bases)
    if extra:
        v.append(f"stack arity: sizes given for unknown cells {sorted(extra)}")

    for b in bases:
        base_atoms = set(c.constituents[b])
        for a in base_atoms:
            kids = at.children.get(a, ())
            cur = [c.relabel[k][-1] for k in kids]
            if any(x > y for x, y in zip(cur, cur[1:])):
                v.append(f"stack order broken over atomic {index_str(a)}")
            if set(cur) != {k[-1] for k in c.children.get(b, ())}:
                v.append(f"stack over atomic {index_str(a)} misses current cells of {index_str(b)}")
        for s in c.children.get(b, ()):
            if not is_even(s):
                continue
            cons = c.constituents[s]
            if any(not is_even(x) for x in cons):
                v.append(f"section {index_str(s)} contains a sector")
                continue
            piece_bases = [x[:-1] for x in cons]
            if sorted(piece_bases) != sorted(base_atoms) or len(set(piece_bases)) != len(piece_bases):
                v.append(f"section {index_str(s)} needs exactly one piece per base cell")
            if len(cons) > 1:
                cert = c.certificates.get(frozenset(cons))
                if cert is None:
                    v.append(f"merged bound {index_str(s)} has no continuity certificate")
                elif not cert.verdict:
                    v.append(f"merged bound {index_str(s)} has a failing certificate")

    v.extend(_atomic_violations(at))
    return ValidationReport(v)


def _atomic_violations(at: AtomicCad) -> list[str]:
    out = []
    for b, kids in at.children.items():
        base_sample = at.cells[b].sample if b else ()
        prev = None
        for k in kids:
            cell = at.cells[k]
            if cell.sample[:-1] != base_sample:
                out.append(f"sample of atomic {index_str(k)} does not extend its base")
            x = cell.sample[-1]
            if prev is not None and not prev < x:
                out.append(f"samples over atomic {index_str(b)} not strictly increasing")
            prev = x
            if is_even(k):
                if cell.root is None or sign_at(cell.root.poly, cell.sample) != 0:
                    out.append(f"atomic section {index_str(k)} sample is not on its bound")
    return out


# -- refinement order ---------------------------------------------------------

def refines(coarse: Cad, fine: Cad) -> bool:
    """True iff every cell of ``coarse`` is a union of cells of ``fine``."""
    if coarse.dimension != fine.dimension:
        raise ValueError("CADs of different dimensions")
    if coarse.atomic is fine.atomic or coarse.atomic.fingerprint == fine.atomic.fingerprint:
        owner: dict[Index, Index] = {}
        for a, cur in fine.relabel.items():
            target = coarse.relabel[a]
            prev = owner.setdefault(cur, target)
            if prev != target:
                return False
        return True
    return _refines_foreign(coarse, fine)


def _refines_foreign(coarse: Cad, fine: Cad) -> bool:
    at = fine.atomic
    owner: dict[Index, Index] = {}
    for a, cell in at.cells.items():
        if not a:
            continue
        target = coarse.locate(cell.sample)
        prev = owner.setdefault(fine.relabel[a], target)
        if prev != target:
            return False
    # a coarse section crossing a fine sector at a fine base sample
    for a in [()] + sorted(at.cells):
        if len(a) == coarse.dimension:
            continue
        sample = at.cells[a].sample if a else ()
        kids = at.children[a]
        roots = [at.cells[k].sample[-1] for k in kids if is_even(k)]
        cur_kids = [fine.relabel[k] for k in kids]
        coarse_atom = coarse.atomic.locate(sample)
        for ck in coarse.atomic.children.get(coarse_atom, ()):
            if not is_even(coarse.relabel[ck]):
                continue
            value = coarse.atomic.cells[ck].root.value_at(sample)
            pos = 0
            while pos < len(roots) and roots[pos] < value:
                pos += 1
            on_root = pos < len(roots) and roots[pos] == value
            holder = cur_kids[2 * pos + 1] if on_root else cur_kids[2 * pos]
            if not is_even(holder):
                return False
    fine_polys = {p for lvl in at.basis for p in lvl}
    for k in range(1, coarse.dimension + 1):
        for s in coarse.level(k):
            if is_even(s) and not coarse.bound(s).polynomials() <= fine_polys:
                raise ComparisonFailure(
                    f"coarse bound {index_str(s)} uses polynomials outside the fine basis"
                )
    return True


# -- label trees --------------------------------------------------------------

Label = tuple


class LabelTree:
    """Prefix tree of cell indices with membership labels.

    Leaves carry bit tuples; an internal node's label is the tuple of its
    children's labels in stack order.
    """

    def __init__(self, dimension: int, leaves: Mapping[Index, tuple[int, ...]]):
        self.dimension = dimension
        self.leaves = dict(leaves)
        if any(len(i) != dimension for i in self.leaves):
            raise ValueError("leaves must all sit at the top level")

    @cached_property
    def nodes(self) -> frozenset[Index]:
        out = {()}
        for leaf in self.leaves:
            for k in range(1, len(leaf) + 1):
                out.add(leaf[:k])
        return frozenset(out)

    @cached_property
    def children(self) -> dict[Index, tuple[Index, ...]]:
        out: dict[Index, list[Index]] = {}
        for n in self.nodes:
            if n:
                out.setdefault(n[:-1], []).append(n)
        return {b: tuple(sorted(v)) for b, v in out.items()}

    @cached_property
    def _labels(self) -> dict[Index, Label]:
        labels: dict[Index, Label] = dict(self.leaves)
        for k in range(self.dimension - 1, -1, -1):
            for n in self.nodes:
                if len(n) == k:
                    labels[n] = tuple(labels[c] for c in self.children.get(n, ()))
        return labels

    def label(self, idx: Index) -> Label:
        return self._labels[idx]

    def __contains__(self, idx: Index) -> bool:
        return idx in self.nodes

    def __eq__(self, other):
        return (
            isinstance(other, LabelTree)
            and self.dimension == other.dimension
            and self.leaves == other.leaves
        )

    def __hash__(self):
        return hash((self.dimension, tuple(sorted(self.leaves.items()))))

    def __repr__(self):
        return f"LabelTree(dim={self.dimension}, leaves={len(self.leaves)})"

    def leaf_labels(self) -> list[tuple[int, ...]]:
        return [self.leaves[i] for i in sorted(self.leaves)]


def labels_from_atomic(c: Cad, atomic_leaf_labels: Mapping[Index, tuple[int, ...]]) -> LabelTree:
    """Transport atomic leaf labels to the current cells of ``c``.

    Raises if two atomic constituents of one current leaf disagree.
    """
    leaves: dict[Index, tuple[int, ...]] = {}
    for a, cur in c.relabel.items():
        if len(a) != c.dimension:
            continue
        lab = atomic_leaf_labels[a]
        prev = leaves.setdefault(cur, lab)
        if prev != lab:
            raise ValueError(f"current cell {index_str(cur)} mixes labels")
    return LabelTree(c.dimension, leaves)


def iter_even_nodes(indices: Iterable[Index]) -> list[Index]:
    return sorted(i for i in indices if is_even(i))
