import random
from fractions import Fraction

import pytest
import sympy

from cadmin.builder import SetDefinition, build_cad
from cadmin.exact.algebraic import EXT_POS_INF, AlgebraicNumber, ExtendedReal
from cadmin.geometry import (
    ContinuityUndecided,
    CurtainAtBoundary,
    boundary_limit,
    curtain_locus,
    decide_limit,
    has_curtain_at,
)
from cadmin.minimize import initial_cad
from cadmin.model import IndexedRoot, is_even
from cadmin.reduction import lift_check

from helpers import P, family, problem

Q = AlgebraicNumber.from_rational


def sdef(*exprs, n=3):
    return SetDefinition("S", tuple(P(e, n) for e in exprs))


# -- curtains -----------------------------------------------------------------

def test_curtain_locus_of_cone_like_set():
    locus = curtain_locus(sdef("z*(x**2 + y**2)"), 3)
    assert locus.generators == (P("x**2 + y**2", 2),)
    assert len(locus.cells) == 1
    assert has_curtain_at(locus, [Q(0), Q(0)])
    assert not has_curtain_at(locus, [Q(1), Q(0)])


def test_sphere_has_no_curtain():
    locus = curtain_locus(sdef("x**2 + y**2 + z**2 - 1"), 3)
    assert locus.is_empty and not has_curtain_at(locus, [Q(0), Q(0)])


def test_r1_set_has_no_curtain():
    locus = curtain_locus(sdef("x**2 - 1", n=1), 1)
    assert locus.is_empty and locus.arity == 0
    assert not has_curtain_at(locus, [])


def test_zero_polynomial_is_curtain_everywhere():
    locus = curtain_locus(sdef("0"), 3)
    assert locus.is_whole_space
    assert has_curtain_at(locus, [Q(3), Q(-2)])


@pytest.mark.parametrize("expr", ["z*(x**2 + y**2)", "x*z - y", "(x - y)*z**2 + (x - y)*(x + 1)*z", "x**2 + y**2 + z**2 - 1"])
def test_curtain_agrees_with_substitution(expr):
    rng = random.Random(7)
    locus = curtain_locus(sdef(expr), 3)
    x, y, z = sympy.symbols("x y z")
    e = sympy.sympify(expr)
    specials = [(0, 0), (1, 1), (-1, -1), (2, 2)]
    pts = specials + [(rng.randint(-3, 3), rng.randint(-3, 3)) for _ in range(46)]
    for a, b in pts:
        full_line = sympy.expand(e.subs({x: a, y: b})) == 0
        assert has_curtain_at(locus, [Q(a), Q(b)]) == full_line


# -- limits -------------------------------------------------------------------

def test_circle_upper_root_limit():
    lim = boundary_limit(IndexedRoot(P("x**2 + y**2 - 1"), 2), [Q(1)], [Fraction(1, 2)])
    assert lim.compare(ExtendedReal.finite(0)) == 0


def test_hyperbola_blows_up():
    lim = boundary_limit(IndexedRoot(P("x*y - 1"), 1), [Q(0)], [Fraction(1)])
    assert lim == EXT_POS_INF or lim.compare(EXT_POS_INF) == 0


def test_sphere_cap_limit():
    cap = IndexedRoot(P("x**2 + y**2 + z**2 - 1", 3), 2)
    lim = boundary_limit(cap, [Q(1), Q(0)], [Fraction(1, 2), Fraction(0)])
    assert lim.compare(ExtendedReal.finite(0)) == 0


def test_limit_at_algebraic_boundary_point():
    r = AlgebraicNumber.from_isolation((-1, 0, 2), 1)  # 1/sqrt(2)
    cap = IndexedRoot(P("x**2 + y**2 + z**2 - 1", 3), 2)
    lim = boundary_limit(cap, [Q(0), r], [Fraction(0), Fraction(0)])
    # z = sqrt(1 - y^2) at y = 1/sqrt(2)
    assert abs(float(lim) - 0.5 ** 0.5) < 1e-12


def test_crossing_lines_limits_all_vanish():
    # every branch of (y - x)(y + x) tends to 0 at x = 0, whichever pairing is glued
    f = P("(y - x)*(y + x)")
    for side in (Fraction(-1), Fraction(1)):
        for k in (1, 2):
            lim = boundary_limit(IndexedRoot(f, k), [Q(0)], [side])
            assert lim.compare(ExtendedReal.finite(0)) == 0


def test_curtain_at_boundary_raises():
    with pytest.raises(CurtainAtBoundary):
        boundary_limit(IndexedRoot(P("x*y - x"), 1), [Q(0)], [Fraction(1)])


def test_undecided_limit_raises():
    oscillating = (Q(1) if i % 2 else Q(-1) for i in range(100))
    with pytest.raises(ContinuityUndecided):
        decide_limit(oscillating, [Q(-1), Q(1)], allow_infinite=False)


def test_infinite_limit_needs_leading_coefficient_zero():
    growing = (Q(2 ** i) for i in range(40))
    with pytest.raises(ContinuityUndecided):
        decide_limit(growing, [Q(0)], allow_infinite=False)
    assert decide_limit((Q(2 ** i) for i in range(40)), [Q(0)], True) == EXT_POS_INF


# -- continuity checks ----------------------------------------------------------

def test_curtain_obstruction_is_recorded():
    prob = problem(3, [["x"]], ["z - y"])
    c, tree = initial_cad(prob)
    d = lift_check(c, tree, (2, 2), prob.family)
    assert not d.lifts and d.reason == "curtain obstruction"
    cert = next(iter(d.certificates.values()))
    assert cert.checks[0].note == "curtain obstruction"


def fibre_limits(c, base, boundary):
    """Limits of every section over atomic ``base`` approaching ``boundary``."""
    at = c.atomic
    inside = [v.rational for v in at.cells[base].sample]
    p = at.cells[boundary].sample
    return [
        boundary_limit(at.cells[s].root, p, inside)
        for s in at.children[base]
        if is_even(s)
    ]


def test_fibre_segment_property_on_sphere():
    c = build_cad(family(3, ["x**2 + y**2 + z**2 - 1"]), [P("x", 3)])
    at = c.atomic
    checked = 0
    for base in at.level(2):
        if is_even(base[-1:]) or any(v.rational is None for v in at.cells[base].sample):
            continue
        for nb in (base[:-1] + (base[-1] - 1,), base[:-1] + (base[-1] + 1,)):
            if nb not in at.cells:
                continue
            lims = fibre_limits(c, base, nb)
            assert all(a.compare(b) <= 0 for a, b in zip(lims, lims[1:]))
            checked += 1
    assert checked >= 10
