"""Projection, lifting and labelling of an initial adapted CAD."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .exact.algebraic import (
    AlgebraicNumber,
    CurtainFibre,
    rational_above,
    rational_below,
    rational_between,
    real_roots_at,
    sign_at,
)
from .exact.basis import DegenerateFamily, irreducible_factors, poly_sort_key
from .exact.poly import Polynomial
from .exact.resultant import psc
from .model import AtomicCad, AtomicCell, Cad, Index, IndexedRoot, LabelTree, labels_from_atomic

ALGEBRAIC = "ALGEBRAIC"


@dataclass(frozen=True)
class SetDefinition:
    """The common real zero set of ``polynomials``."""

    name: str
    polynomials: tuple[Polynomial, ...]
    mode: str = ALGEBRAIC


@dataclass(frozen=True)
class Family:
    dimension: int
    sets: tuple[SetDefinition, ...]
    variables: tuple[str, ...] = ()

    def __post_init__(self):
        if not self.sets:
            raise ValueError("a family needs at least one set")
        if not 1 <= self.dimension <= 3:
            raise ValueError("dimension must be 1, 2 or 3")
        for s in self.sets:
            if s.mode != ALGEBRAIC:
                raise ValueError(f"unsupported set mode {s.mode!r}")
            for p in s.polynomials:
                if p.nvars != self.dimension:
                    raise ValueError(f"polynomial of set {s.name!r} has the wrong variable count")
        if not self.variables:
            object.__setattr__(self, "variables", tuple(f"x{i + 1}" for i in range(self.dimension)))

    @property
    def polynomials(self) -> list[Polynomial]:
        return [p for s in self.sets for p in s.polynomials]


@dataclass(frozen=True)
class ProjectionBasis:
    """``per_level[k-1]`` holds the level-``k`` basis, in ``k`` variables."""

    per_level: tuple[tuple[Polynomial, ...], ...]

    def level(self, k: int) -> tuple[Polynomial, ...]:
        return self.per_level[k - 1]

    @property
    def dimension(self) -> int:
        return len(self.per_level)


# -- projection ---------------------------------------------------------------

def _reducta(f: Polynomial, var: int) -> list[Polynomial]:
    out = []
    g = f
    while not g.is_zero() and g.degree(var) >= 1:
        out.append(g)
        lc = g.leading_coeff(var)
        if lc.is_constant():
            break  # leading coefficient never vanishes; lower reducta are never needed
        g = g.reductum(var)
    return out


def collins_projection(polys: Sequence[Polynomial]) -> list[Polynomial]:
    """Collins' projection set of polynomials whose main variable is the last one."""
    if not polys:
        return []
    var = polys[0].nvars - 1
    out: list[Polynomial] = []
    reds = []
    for f in polys:
        out.extend(c for c in f.coeffs_in(var) if not c.is_constant())
        rs = _reducta(f, var)
        reds.append(rs)
        for g in rs:
            d = g.degree(var)
            if d >= 2:
                dg = g.derivative(var)
                out.extend(psc(g, dg, var, j) for j in range(d - 1))
    for i in range(len(polys)):
        for j in range(i + 1, len(polys)):
            for g1 in reds[i]:
                for g2 in reds[j]:
                    m = min(g1.degree(var), g2.degree(var))
                    out.extend(psc(g1, g2, var, jj) for jj in range(m))
    return [p for p in out if not p.is_constant()]


def _distribute(polys, pending: dict[int, set[Polynomial]]) -> None:
    for p in polys:
        if p.is_zero() or p.is_constant():
            continue
        for f in irreducible_factors(p):
            k = f.main_var() + 1
            pending[k].add(f.with_nvars(k))


def build_projection_basis(family: Family, extra: Sequence[Polynomial] = ()) -> ProjectionBasis:
    """Closed projection basis; ``extra`` polynomials join the top level.

    Zero polynomials describe the whole space and contribute nothing.
    """
    n = family.dimension
    inputs = list(family.polynomials) + list(extra)
    if not inputs or all(p.is_zero() for p in inputs):
        raise DegenerateFamily("degenerate family: every polynomial is zero")
    pending: dict[int, set[Polynomial]] = {k: set() for k in range(1, n + 1)}
    _distribute(inputs, pending)
    levels: dict[int, tuple[Polynomial, ...]] = {}
    for k in range(n, 0, -1):
        basis = tuple(sorted(pending[k], key=poly_sort_key))
        levels[k] = basis
        if k > 1:
            _distribute([q.with_nvars(k - 1) for q in collins_projection(basis)], pending)
    return ProjectionBasis(tuple(levels[k] for k in range(1, n + 1)))


# -- lifting ------------------------------------------------------------------

def _sector_samples(roots: list[AlgebraicNumber]) -> list[AlgebraicNumber]:
    if not roots:
        return [AlgebraicNumber.from_rational(0)]
    pts = [rational_below(roots[0])]
    pts += [rational_between(a, b) for a, b in zip(roots, roots[1:])]
    pts.append(rational_above(roots[-1]))
    return [AlgebraicNumber.from_rational(p) for p in pts]


def lift_cad(basis: ProjectionBasis, variables: Sequence[str] = ()) -> AtomicCad:
    n = basis.dimension
    cells: dict[Index, AtomicCell] = {}
    nullified: dict[Index, frozenset[int]] = {}
    frontier: list[tuple[Index, tuple, frozenset]] = [((), (), frozenset())]
    for k in range(1, n + 1):
        polys = basis.level(k)
        nxt = []
        for base, sample, zeros in frontier:
            null: set[int] = set()
            entries: list[tuple[AlgebraicNumber, list[tuple[int, int]]]] = []
            for pos, p in enumerate(polys):
                try:
                    roots = real_roots_at(p, sample)
                except CurtainFibre:
                    null.add(pos)
                    continue
                for rank, r in enumerate(roots, start=1):
                    for value, owners in entries:
                        if value == r:
                            owners.append((pos, rank))
                            break
                    else:
                        entries.append((r, [(pos, rank)]))
            entries.sort(key=lambda e: e[0])
            nullified[base] = frozenset(null)
            stack_zeros = zeros | {(k, pos) for pos in null}
            sectors = _sector_samples([e[0] for e in entries])
            j = 1
            for i, sec in enumerate(sectors):
                idx = base + (j,)
                cell = AtomicCell(idx, sample + (sec,), None, stack_zeros)
                cells[idx] = cell
                nxt.append((idx, cell.sample, cell.zeros))
                j += 1
                if i < len(entries):
                    value, owners = entries[i]
                    pos, rank = owners[0]
                    idx = base + (j,)
                    cz = stack_zeros | {(k, o) for o, _ in owners}
                    cell = AtomicCell(idx, sample + (value,), IndexedRoot(polys[pos], rank), cz)
                    cells[idx] = cell
                    nxt.append((idx, cell.sample, cell.zeros))
                    j += 1
        frontier = nxt
    variables = tuple(variables) or tuple(f"x{i + 1}" for i in range(n))
    return AtomicCad(n, variables, basis.per_level, cells, nullified)


def build_cad(family: Family, extra: Sequence[Polynomial] = ()) -> Cad:
    basis = build_projection_basis(family, extra)
    return Cad.from_atomic(lift_cad(basis, family.variables))


# -- labelling ----------------------------------------------------------------

def _factor_keys(atomic: AtomicCad, p: Polynomial):
    """``True``/``False`` for polynomials that vanish everywhere/nowhere,
    otherwise the zero-set keys of its irreducible factors."""
    if p.is_zero():
        return True
    if p.is_constant():
        return False
    keys = []
    for f in irreducible_factors(p):
        k = f.main_var() + 1
        g = f.with_nvars(k)
        try:
            keys.append((k, atomic.basis[k - 1].index(g)))
        except ValueError:
            raise ValueError(f"factor {g} of a family polynomial is not in the basis") from None
    return keys


def atomic_leaf_labels(atomic: AtomicCad, family: Family) -> dict[Index, tuple[int, ...]]:
    per_set = [[_factor_keys(atomic, p) for p in s.polynomials] for s in family.sets]
    out = {}
    for idx in atomic.level(atomic.dimension):
        zeros = atomic.cells[idx].zeros
        bits = []
        for polys in per_set:
            inside = all(
                keys if isinstance(keys, bool) else any(k in zeros for k in keys) for keys in polys
            )
            bits.append(int(inside))
        out[idx] = tuple(bits)
    return out


def label_cells(c: Cad, family: Family) -> LabelTree:
    return labels_from_atomic(c, atomic_leaf_labels(c.atomic, family))


def _sample_bits(atomic: AtomicCad, idx: Index, family: Family) -> tuple[int, ...]:
    cache = atomic.__dict__.setdefault("_sign_cache", {})
    sample = atomic.cells[idx].sample
    bits = []
    for s in family.sets:
        inside = True
        for p in s.polynomials:
            key = (idx, p)
            if key not in cache:
                cache[key] = sign_at(p, sample)
            if cache[key] != 0:
                inside = False
                break
        bits.append(int(inside))
    return tuple(bits)


def adaptedness_check(c: Cad, tree: LabelTree, family: Family) -> bool:
    """Every set is a union of label-1 cells.

    Sign invariance comes from every factor of every family polynomial being
    in the basis; labels are then confirmed by exact signs at every atomic
    sample of every current cell.
    """
    try:
        for p in family.polynomials:
            _factor_keys(c.atomic, p)
    except ValueError:
        return False
    for a, cur in c.relabel.items():
        if len(a) != c.dimension:
            continue
        if tree.leaves.get(cur) != _sample_bits(c.atomic, a, family):
            return False
    return True
