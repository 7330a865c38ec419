"""Curtain detection, boundary limits of section bounds, and continuity
certificates for merged bounds."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .exact.algebraic import (
    EXT_NEG_INF,
    EXT_POS_INF,
    AlgebraicNumber,
    CurtainFibre,
    ExtendedReal,
    real_roots_at,
    sign_at,
)
from .exact.poly import Polynomial
from .model import (
    Cad,
    CertificateCheck,
    ContinuityCertificate,
    Index,
    IndexedRoot,
    LabelTree,
    index_str,
    is_even,
    shift,
)

STEP_BUDGET = 64  # halvings of the approach parameter
STREAK = 6  # consecutive agreeing steps needed to decide a limit


class ContinuityUndecided(RuntimeError):
    """A boundary limit could not be decided within the step budget."""


class CurtainAtBoundary(RuntimeError):
    """The bound's polynomial vanishes on the whole fibre over the boundary point."""


# -- curtains -----------------------------------------------------------------

@dataclass(frozen=True)
class CurtainLocus:
    """Base points over which a set contains the whole vertical line.

    ``generators`` are the nonzero coefficients (in the last variable) of the
    set's polynomials, as polynomials in the remaining variables.  An empty
    generator list means every polynomial is zero, so the locus is everything.
    """

    generators: tuple[Polynomial, ...]
    cells: frozenset[Index]
    arity: int

    @property
    def is_whole_space(self) -> bool:
        return not self.generators

    @property
    def is_empty(self) -> bool:
        return bool(self.generators) and not self.cells


def curtain_locus(s, dimension: int) -> CurtainLocus:
    from .builder import Family, SetDefinition, build_cad

    last = dimension - 1
    gens: list[Polynomial] = []
    for p in s.polynomials:
        for cf in p.coeffs_in(last):
            if not cf.is_zero():
                g = cf.with_nvars(last) if last else cf
                if g not in gens:
                    gens.append(g)
    gens_t = tuple(gens)
    if not gens:
        return CurtainLocus((), frozenset(), last)
    if any(g.is_constant() for g in gens) or last == 0:
        return CurtainLocus(gens_t, frozenset(), last)
    fam = Family(last, (SetDefinition("curtain generators", gens_t),))
    cad = build_cad(fam)
    cells = frozenset(
        idx
        for idx in cad.level(last)
        if all(sign_at(g, cad.sample(idx)) == 0 for g in gens)
    )
    return CurtainLocus(gens_t, cells, last)


def has_curtain_at(locus: CurtainLocus, point: Sequence[AlgebraicNumber]) -> bool:
    if len(point) != locus.arity:
        raise ValueError("point dimension differs from the locus arity")
    pt = [p if isinstance(p, AlgebraicNumber) else AlgebraicNumber.from_rational(p) for p in point]
    for g in locus.generators:
        if g.is_constant():
            return False
        if sign_at(g, pt) != 0:
            return False
    return True


# -- limits -------------------------------------------------------------------

def near(p: AlgebraicNumber, side: int, t: Fraction) -> AlgebraicNumber:
    """A rational strictly on ``side`` of ``p`` at distance below ``t``."""
    if p.rational is not None:
        return AlgebraicNumber.from_rational(p.rational + side * t / 2)
    lo, hi = p.refined(t / 4)
    return AlgebraicNumber.from_rational(lo - t / 2 if side < 0 else hi + t / 2)


def decide_limit(
    values: Iterable[AlgebraicNumber | None],
    candidates: Sequence[AlgebraicNumber],
    allow_infinite: bool,
    streak: int = STREAK,
) -> ExtendedReal:
    """Decide where a sequence of values along an approach path converges.

    A finite limit must be one of ``candidates`` (exact roots over the
    boundary point).  It is accepted once ``streak`` consecutive values stay
    nearest to the same candidate, inside a quarter of the minimal candidate
    gap, without moving away.  Divergence is accepted after ``streak``
    consecutive values growing in absolute value beyond every candidate, and
    only when ``allow_infinite`` holds.  ``None`` entries are skipped.
    """
    digits = 40
    approx = [c.approx(digits) for c in candidates]
    if len(approx) >= 2:
        ordered = sorted(approx)
        rho = min(b - a for a, b in zip(ordered, ordered[1:])) / 4
    else:
        rho = Fraction(1)
    big = max((abs(a) for a in approx), default=Fraction(0)) + 1
    fin_run, fin_best, fin_dist = 0, None, None
    inf_run, inf_sign, inf_abs = 0, 0, None
    for v in values:
        if v is None:
            continue
        x = v.approx(digits)
        if approx:
            best = min(range(len(approx)), key=lambda i: abs(x - approx[i]))
            dist = abs(x - approx[best])
            if dist < rho and best == fin_best and fin_dist is not None and dist <= fin_dist:
                fin_run += 1
            elif dist < rho:
                fin_run = 1
            else:
                fin_run = 0
            fin_best, fin_dist = best, dist
            if fin_run >= streak:
                return ExtendedReal.finite(candidates[best])
        s = 1 if x > 0 else -1
        if abs(x) > big and s == inf_sign and inf_abs is not None and abs(x) > inf_abs:
            inf_run += 1
        elif abs(x) > big:
            inf_run = 1
        else:
            inf_run = 0
        inf_sign, inf_abs = s, abs(x)
        if allow_infinite and inf_run >= streak:
            return EXT_POS_INF if s > 0 else EXT_NEG_INF
    raise ContinuityUndecided("continuity undecided: limit not settled within the step budget")


def _candidates(polys: Sequence[Polynomial], point, witness: Sequence[Polynomial] = ()):
    """Exact candidate limit values over ``point`` and whether infinity is possible."""
    cands: list[AlgebraicNumber] = []
    allow_inf = False
    usable = False
    for q in list(polys) + list(witness):
        try:
            roots = real_roots_at(q, point)
        except CurtainFibre:
            continue
        usable = True
        lc = q.leading_coeff(q.nvars - 1)
        if sign_at(lc, point) == 0:
            allow_inf = True
        for r in roots:
            if r not in cands:
                cands.append(r)
    if not usable:
        raise CurtainAtBoundary("curtain at boundary: every candidate polynomial vanishes there")
    cands.sort()
    return cands, allow_inf


def boundary_limit(
    root: IndexedRoot,
    boundary_point: Sequence,
    inside_point: Sequence,
    witness: Sequence[Polynomial] = (),
) -> ExtendedReal:
    """Limit of an indexed root function approaching ``boundary_point``.

    The approach runs along the straight segment from ``inside_point`` (a
    point of the base cell, rational coordinates) to the boundary point.
    """
    p = [a if isinstance(a, AlgebraicNumber) else AlgebraicNumber.from_rational(a) for a in boundary_point]
    q = [Fraction(v) for v in inside_point]
    cands, allow_inf = _candidates([root.poly], p, witness)

    def values():
        t = Fraction(1, 2)
        for _ in range(STEP_BUDGET):
            pt = []
            for pi, qi in zip(p, q):
                if pi.rational is not None:
                    pt.append(AlgebraicNumber.from_rational(pi.rational + t * (qi - pi.rational)))
                else:
                    lo, _ = pi.refined(t * t)
                    pt.append(AlgebraicNumber.from_rational(lo + t * (qi - lo)))
            try:
                roots = real_roots_at(root.poly, pt)
            except CurtainFibre:
                roots = []
            yield roots[root.root_number - 1] if len(roots) >= root.root_number else None
            t /= 2

    return decide_limit(values(), cands, allow_inf)


# -- continuity of merged bounds ----------------------------------------------

def section_value(c: Cad, section: Index, point: Sequence[AlgebraicNumber]) -> AlgebraicNumber | None:
    """Value of current section ``section`` over ``point``, or None if the
    point is outside the section's base."""
    a = c.atomic.locate(point)
    if a and c.relabel[a] != section[:-1]:
        return None
    if not a and section[:-1] != ():
        return None
    for s in c.constituents[section]:
        if s[:-1] == a:
            return c.atomic.cells[s].root.value_at(point)
    return None


def _path_point(c: Cad, base: Index, p, level: int, side: int, t: Fraction):
    """A point of current cell ``base`` near boundary point ``p``."""
    if len(p) == 1:
        pt = (near(p[0], side, t),)
    elif level == 2:
        pt = (p[0], near(p[1], side, t))
    else:
        x1 = near(p[0], side, t)
        if is_even(base):
            y = section_value(c, base, (x1,))
            if y is None:
                return None
        else:
            y = p[1]
        pt = (x1, y)
    a = c.atomic.locate(pt)
    return pt if c.relabel[a] == base else None


def section_limit(
    c: Cad,
    section: Index,
    boundary_point: Sequence[AlgebraicNumber],
    level: int,
    side: int,
    witness: Sequence[Polynomial] = (),
) -> ExtendedReal:
    """Limit of the current section's bound approaching ``boundary_point``
    from within its base, moving along coordinate ``level`` from ``side``."""
    base = section[:-1]
    polys = sorted({c.atomic.cells[s].root.poly for s in c.constituents[section]}, key=repr)
    cands, allow_inf = _candidates(polys, boundary_point, witness)

    def values():
        t = Fraction(1, 2)
        for _ in range(STEP_BUDGET):
            pt = _path_point(c, base, boundary_point, level, side, t)
            yield None if pt is None else section_value(c, section, pt)
            t /= 2

    return decide_limit(values(), cands, allow_inf)


def find_witness(c: Cad, tree: LabelTree, loci, leaf: Index, point) -> int | None:
    """A set containing ``leaf`` with no curtain at ``point``."""
    bits = tree.leaves.get(leaf)
    if bits is None:
        return None
    for i, bit in enumerate(bits):
        if bit and not has_curtain_at(loci[i], point):
            return i
    return None


def continuity_check(
    c: Cad,
    tree: LabelTree,
    family,
    site: Index,
    section: Index,
    loci=None,
) -> ContinuityCertificate:
    """Certificate for the union of sections ``section``, ``+e_k`` and ``+2e_k``.

    The middle piece's base is the boundary cell between the two outer
    bases; one exact check per side at one sample of the boundary cell.
    """
    k = len(site)
    if loci is None:
        loci = [curtain_locus(s, c.dimension) for s in family.sets]
    left_base = section[:-1]
    mid_base = shift(left_base, k, 1)
    mid_section = shift(section, k, 1)
    right_section = shift(section, k, 2)
    rep = c.representative(mid_base)
    p = c.atomic.cells[rep].sample
    mid_atom = next(s for s in c.constituents[mid_section] if s[:-1] == rep)
    value = ExtendedReal.finite(c.atomic.cells[mid_atom].sample[-1])

    witness_polys: tuple[Polynomial, ...] = ()
    if len(p) == 2:
        i = find_witness(c, tree, loci, section, p)
        if i is None:
            check = CertificateCheck(mid_base, left_base, None, value, False, "curtain obstruction")
            return ContinuityCertificate(site, section, (check,))
        witness_polys = tuple(q for q in family.sets[i].polynomials if not q.is_zero())

    checks = []
    for adj_section, side in ((section, -1), (right_section, 1)):
        lim = section_limit(c, adj_section, p, k, side, witness_polys)
        checks.append(
            CertificateCheck(mid_base, adj_section[:-1], lim, value, lim.compare(value) == 0)
        )
    return ContinuityCertificate(site, section, tuple(checks))


def describe(cert: ContinuityCertificate) -> str:
    parts = []
    for ch in cert.checks:
        lim = "?" if ch.limit is None else f"{float(ch.limit):.6g}"
        parts.append(
            f"{index_str(ch.adjacent_cell)}->{index_str(ch.boundary_cell)}: {lim} vs "
            f"{float(ch.matched_value):.6g} {'ok' if ch.verdict else 'FAIL'} {ch.note}".rstrip()
        )
    return "; ".join(parts)
