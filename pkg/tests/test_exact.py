from fractions import Fraction

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from cadmin.exact.algebraic import (
    AlgebraicNumber,
    CurtainFibre,
    ExtendedReal,
    EXT_NEG_INF,
    EXT_POS_INF,
    real_roots_at,
    real_roots_rational,
    sign_at,
)
from cadmin.exact.basis import DegenerateFamily, squarefree_basis
from cadmin.exact.poly import Polynomial, PolynomialError, format_rational, parse_rational
from cadmin.exact.resultant import discriminant_last, psc, resultant
from cadmin.exact.roots import isolate_squarefree, real_root_count

from helpers import P

X, Y, Z = sympy.symbols("x y z")

small_int = st.integers(-4, 4)


@st.composite
def bivariate(draw, max_deg=2):
    terms = draw(
        st.dictionaries(
            st.tuples(st.integers(0, max_deg), st.integers(0, max_deg)), small_int, min_size=1, max_size=5
        )
    )
    return Polynomial(2, terms)


@st.composite
def univariate(draw, max_deg=5):
    coeffs = draw(st.lists(small_int, min_size=2, max_size=max_deg + 1))
    return Polynomial.univariate(coeffs)


def as_sympy(p: Polynomial):
    gens = [X, Y, Z][: p.nvars]
    return p.to_sympy(gens).as_expr()


# -- rationals and polynomials -----------------------------------------------

def test_rational_text_roundtrip():
    assert format_rational(Fraction(-6, 4)) == "-3/2"
    assert parse_rational("-3/2") == Fraction(-3, 2)
    assert parse_rational("7") == Fraction(7)
    with pytest.raises(PolynomialError):
        parse_rational("1/0")


def test_variable_count_mismatch_is_rejected():
    with pytest.raises(PolynomialError):
        P("x", 1) + P("x + y", 2)


@given(bivariate(), bivariate())
@settings(max_examples=60, deadline=None)
def test_ring_ops_match_sympy(a, b):
    assert sympy.expand(as_sympy(a * b) - as_sympy(a) * as_sympy(b)) == 0
    assert sympy.expand(as_sympy(a - b) - (as_sympy(a) - as_sympy(b))) == 0


def test_json_roundtrip():
    p = P("3*x**2*y - y/2 + 7", 2)
    assert Polynomial.from_json(p.to_json(), 2) == p


# -- resultants ---------------------------------------------------------------

@given(bivariate(), bivariate())
@settings(max_examples=60, deadline=None)
def test_resultant_matches_sympy(a, b):
    if a.degree(1) < 1 or b.degree(1) < 1:
        return
    mine = resultant(a, b, 1)
    oracle = sympy.resultant(as_sympy(a), as_sympy(b), Y)
    assert sympy.expand(as_sympy(mine) - oracle) == 0


def test_discriminant_of_circle():
    d = discriminant_last(P("x**2 + y**2 - 1"))
    # disc_y(y^2 + x^2 - 1) = -4(x^2 - 1); compare up to a constant factor
    assert sympy.simplify(as_sympy(d) / (X**2 - 1)).is_constant()


def test_psc_zero_is_resultant():
    a, b = P("y**3 - x*y + 1"), P("y**2 - x")
    assert psc(a, b, 1, 0) == resultant(a, b, 1)


def test_psc_detects_common_factor_degree():
    # gcd (y - x) has degree 1, so psc_0 vanishes and psc_1 does not
    a, b = P("(y - x)*(y - 1)"), P("(y - x)*(y + 2)")
    assert psc(a, b, 1, 0).is_zero()
    assert not psc(a, b, 1, 1).is_zero()


# -- univariate roots -----------------------------------------------------------

@given(st.lists(st.integers(-6, 6), min_size=1, max_size=4, unique=True), st.integers(1, 3))
@settings(max_examples=60, deadline=None)
def test_planted_roots_are_recovered(roots, lead):
    coeffs = [lead]
    for r in roots:  # multiply by (x - r), ascending coefficients
        coeffs = [-r * coeffs[0]] + [coeffs[i - 1] - r * coeffs[i] for i in range(1, len(coeffs))] + [coeffs[-1]]
    found = real_roots_rational(coeffs)
    assert [a.rational for a in found] == sorted(Fraction(r) for r in roots)


@given(univariate())
@settings(max_examples=80, deadline=None)
def test_root_count_matches_sympy(p):
    if p.is_constant():
        return
    oracle = sympy.Poly(as_sympy(p), X).real_roots()
    distinct = sorted(set(oracle))
    mine = real_roots_rational(p.univariate_coeffs())
    assert len(mine) == len(distinct)
    for a, b in zip(mine, distinct):
        assert abs(float(a) - float(b)) < 1e-9


def test_isolating_intervals_are_disjoint():
    p = tuple(int(c) for c in sympy.Poly((X**2 - 2) * (X**2 - 3) * (X - 1), X).all_coeffs()[::-1])
    iso = isolate_squarefree(p)
    assert real_root_count(p) == 5 == len(iso)


# -- algebraic numbers --------------------------------------------------------

def sqrt(k):
    return real_roots_rational([-k, 0, 1])[1]


def test_algebraic_comparison():
    assert sqrt(2) < sqrt(3)
    assert sqrt(2) > Fraction(1414, 1000) and sqrt(2).compare_rational(Fraction(1415, 1000)) < 0
    assert sqrt(4) == AlgebraicNumber.from_rational(2)
    assert sqrt(2) == sqrt(2)


def test_algebraic_json_roundtrip():
    a = sqrt(5)
    assert AlgebraicNumber.from_json(a.to_json()) == a


def test_sign_at_algebraic_points():
    r2 = sqrt(2)
    assert sign_at(P("x*y - 2"), [r2, r2]) == 0
    assert sign_at(P("x*y - 3"), [r2, r2]) == -1
    assert sign_at(P("x**2 - 2", 1), [r2]) == 0
    assert sign_at(P("x*y - 2*z", 3), [r2, sqrt(8), AlgebraicNumber.from_rational(2)]) == 0


@given(bivariate(), bivariate(), st.integers(2, 7), st.integers(2, 7))
@settings(max_examples=40, deadline=None)
def test_sign_is_multiplicative(a, b, k1, k2):
    pt = [sqrt(k1), sqrt(k2)]
    assert sign_at(a * b, pt) == sign_at(a, pt) * sign_at(b, pt)


@given(bivariate(), st.integers(2, 7), st.integers(-3, 3))
@settings(max_examples=40, deadline=None)
def test_sign_matches_float_evaluation(a, k, q):
    pt = [sqrt(k), AlgebraicNumber.from_rational(q)]
    s = sign_at(a, pt)
    v = float(as_sympy(a).subs({X: sympy.sqrt(k), Y: q}).evalf(50))
    if abs(v) > 1e-9:
        assert s == (1 if v > 0 else -1)
    else:
        assert s == 0 or abs(v) < 1e-9


def test_real_roots_over_algebraic_fibre():
    roots = real_roots_at(P("y**2 - x"), [sqrt(2)])
    assert len(roots) == 2
    assert abs(float(roots[1]) - 2 ** 0.25) < 1e-12
    assert real_roots_at(P("y**2 + x"), [sqrt(2)]) == []


def test_vanishing_fibre_raises():
    with pytest.raises(CurtainFibre):
        real_roots_at(P("x*y - x"), [AlgebraicNumber.from_rational(0)])


def test_leading_coefficient_drop():
    roots = real_roots_at(P("x*y**2 + y - 1"), [AlgebraicNumber.from_rational(0)])
    assert [r.rational for r in roots] == [1]


def test_extended_reals_order():
    one = ExtendedReal.finite(1)
    assert EXT_NEG_INF < one < EXT_POS_INF
    assert ExtendedReal.from_json(one.to_json()).compare(one) == 0


def test_squarefree_basis():
    basis = squarefree_basis([P("(x**2 - 1)**2 * (x - 1)", 1), P("x**2 - 1", 1)])
    assert len(basis) == 2
    with pytest.raises(DegenerateFamily):
        squarefree_basis([Polynomial.zero(1)])
