"""Real algebraic numbers, exact sign evaluation and root isolation over
algebraic points.

An :class:`AlgebraicNumber` is the ``index``-th real root of an irreducible
integer polynomial.  Keeping the defining polynomial irreducible makes
equality structural: two numbers are equal iff they share defining
polynomial and root index.

Signs of multivariate polynomials at tuples of algebraic numbers are found by
interval refinement.  When refinement cannot separate the value from zero,
the value's norm ``R(t)`` (iterated resultants of ``t - g`` against the
defining polynomials) supplies an exact zero test and a separation radius.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import floor, ceil
from typing import Sequence

from .basis import univariate_factors
from .poly import Polynomial
from .resultant import resultant
from .roots import (
    isolate_squarefree,
    poly_rem,
    refine,
    sign,
    squarefree_part,
    to_integer_coeffs,
    trim,
)

Interval = tuple[Fraction, Fraction]


class CurtainFibre(ArithmeticError):
    """The polynomial vanishes identically on the fibre over the point."""


# best known isolating interval per (minpoly, index); values never change,
# only their enclosures get tighter
_REFINED: dict[tuple, Interval] = {}


@dataclass(frozen=True)
class AlgebraicNumber:
    minpoly: tuple[int, ...]
    index: int
    interval: Interval = field(compare=False)
    rational: Fraction | None = field(default=None, compare=False)

    @classmethod
    def from_rational(cls, r) -> AlgebraicNumber:
        r = Fraction(r)
        return cls(to_integer_coeffs([-r, 1]), 0, (r - 1, r + 1), r)

    @classmethod
    def from_isolation(cls, minpoly: tuple[int, ...], index: int) -> AlgebraicNumber:
        if len(minpoly) == 2:
            return cls.from_rational(Fraction(-minpoly[0], minpoly[1]))
        iso = isolate_squarefree(minpoly)[index]
        if isinstance(iso, Fraction):
            return cls.from_rational(iso)
        return cls(minpoly, index, iso)

    @classmethod
    def from_interval(cls, minpoly: Sequence[int], interval: Interval) -> AlgebraicNumber:
        """Rebuild from a defining polynomial and an isolating interval."""
        minpoly = to_integer_coeffs(minpoly)
        lo, hi = interval
        if len(minpoly) == 2:
            r = Fraction(-minpoly[0], minpoly[1])
            if not lo < r < hi:
                raise ValueError("interval does not contain the rational root")
            return cls(minpoly, 0, (lo, hi), r)
        hits = []
        for i in range(len(isolate_squarefree(minpoly))):
            a = cls.from_isolation(minpoly, i)
            if a.compare_rational(lo) > 0 and a.compare_rational(hi) < 0:
                hits.append(i)
        if len(hits) != 1:
            raise ValueError("interval does not isolate exactly one root")
        return cls(minpoly, hits[0], (lo, hi))

    # -- basic queries --------------------------------------------------------
    @property
    def is_rational(self) -> bool:
        return self.rational is not None

    @property
    def defining(self) -> Polynomial:
        return Polynomial.univariate(self.minpoly)

    @property
    def degree(self) -> int:
        return len(self.minpoly) - 1

    def _key(self):
        return (self.minpoly, self.index)

    def enclosure(self) -> Interval:
        if self.rational is not None:
            return (self.rational, self.rational)
        return _REFINED.get(self._key(), self.interval)

    def refined(self, width: Fraction) -> Interval:
        """Enclosing interval of width below ``width`` (degenerate if rational)."""
        if self.rational is not None:
            return (self.rational, self.rational)
        lo, hi = self.enclosure()
        if hi - lo < width:
            return (lo, hi)
        iv = refine(self.minpoly, (lo, hi), width)
        _REFINED[self._key()] = iv
        return iv

    def compare_rational(self, r) -> int:
        r = Fraction(r)
        if self.rational is not None:
            return sign(self.rational - r)
        w = Fraction(1)
        while True:
            lo, hi = self.refined(w)
            if lo > r:
                return 1
            if hi < r:
                return -1
            w /= 4

    def compare(self, other: AlgebraicNumber | Fraction | int) -> int:
        if not isinstance(other, AlgebraicNumber):
            return self.compare_rational(other)
        if self == other:
            return 0
        if other.rational is not None:
            return self.compare_rational(other.rational)
        if self.rational is not None:
            return -other.compare_rational(self.rational)
        w = Fraction(1)
        while True:
            a, b = self.refined(w), other.refined(w)
            if a[1] < b[0]:
                return -1
            if b[1] < a[0]:
                return 1
            w /= 4

    def __lt__(self, other):
        return self.compare(other) < 0

    def __le__(self, other):
        return self.compare(other) <= 0

    def __gt__(self, other):
        return self.compare(other) > 0

    def __ge__(self, other):
        return self.compare(other) >= 0

    def __float__(self):
        if self.rational is not None:
            return float(self.rational)
        lo, hi = self.refined(Fraction(1, 2**60))
        return float((lo + hi) / 2)

    def approx(self, digits: int = 30) -> Fraction:
        if self.rational is not None:
            return self.rational
        lo, hi = self.refined(Fraction(1, 10**digits))
        return (lo + hi) / 2

    def __repr__(self):
        if self.rational is not None:
            return f"Alg({self.rational})"
        return f"Alg(root {self.index} of {list(self.minpoly)} ~ {float(self):.6g})"

    def to_json(self) -> dict:
        from .poly import format_rational

        return {
            "poly": list(map(str, self.minpoly)),
            "interval": [format_rational(self.interval[0]), format_rational(self.interval[1])],
        }

    @classmethod
    def from_json(cls, data: dict) -> AlgebraicNumber:
        from .poly import parse_rational

        return cls.from_interval(
            [int(c) for c in data["poly"]],
            (parse_rational(data["interval"][0]), parse_rational(data["interval"][1])),
        )


def real_roots_rational(coeffs: Sequence) -> list[AlgebraicNumber]:
    """All distinct real roots of a univariate rational polynomial."""
    c = to_integer_coeffs(coeffs)
    if not c:
        raise CurtainFibre("zero polynomial has a curtain fibre")
    out = []
    for f in univariate_factors(c):
        for i in range(len(isolate_squarefree(f))):
            out.append(AlgebraicNumber.from_isolation(f, i))
    return sort_numbers(out)


def sort_numbers(nums: list[AlgebraicNumber]) -> list[AlgebraicNumber]:
    from functools import cmp_to_key

    return sorted(nums, key=cmp_to_key(lambda a, b: a.compare(b)))


# -- extended reals ----------------------------------------------------------

NEG_INF, FINITE, POS_INF = "NEG_INF", "FINITE", "POS_INF"


@dataclass(frozen=True)
class ExtendedReal:
    tag: str
    value: AlgebraicNumber | None = None

    def __post_init__(self):
        if (self.tag == FINITE) != (self.value is not None):
            raise ValueError("FINITE extended reals carry a value, infinities do not")

    @classmethod
    def finite(cls, v) -> ExtendedReal:
        if not isinstance(v, AlgebraicNumber):
            v = AlgebraicNumber.from_rational(v)
        return cls(FINITE, v)

    def compare(self, other: ExtendedReal) -> int:
        rank = {NEG_INF: 0, FINITE: 1, POS_INF: 2}
        if self.tag != other.tag or self.tag != FINITE:
            return sign(rank[self.tag] - rank[other.tag])
        return self.value.compare(other.value)

    def __lt__(self, other):
        return self.compare(other) < 0

    def __le__(self, other):
        return self.compare(other) <= 0

    def __float__(self):
        if self.tag == NEG_INF:
            return float("-inf")
        if self.tag == POS_INF:
            return float("inf")
        return float(self.value)

    def to_json(self):
        return self.tag if self.value is None else {"finite": self.value.to_json()}

    @classmethod
    def from_json(cls, data) -> ExtendedReal:
        if isinstance(data, str):
            return cls(data)
        return cls(FINITE, AlgebraicNumber.from_json(data["finite"]))


EXT_NEG_INF = ExtendedReal(NEG_INF)
EXT_POS_INF = ExtendedReal(POS_INF)


# -- interval evaluation -----------------------------------------------------

def _iv_mul(a: Interval, b: Interval) -> Interval:
    ps = (a[0] * b[0], a[0] * b[1], a[1] * b[0], a[1] * b[1])
    return (min(ps), max(ps))


def _iv_pow(a: Interval, k: int) -> Interval:
    lo, hi = a
    if k % 2 == 1 or lo >= 0:
        return (lo**k, hi**k) if lo >= 0 or k % 2 == 1 else (hi**k, lo**k)
    if hi <= 0:
        return (hi**k, lo**k)
    return (Fraction(0), max(lo**k, hi**k))


def eval_box(poly: Polynomial, box: Sequence[Interval | None]) -> Interval:
    lo = hi = Fraction(0)
    for e, c in poly.items():
        term = (c, c)
        for i, k in enumerate(e):
            if k:
                term = _iv_mul(term, _iv_pow(box[i], k))
        lo += term[0]
        hi += term[1]
    return (lo, hi)


# -- exact signs -------------------------------------------------------------

def _split(poly: Polynomial, point: Sequence[AlgebraicNumber]):
    """Substitute rational coordinates; return the rest as (var, number)."""
    values = {}
    coords = []
    for i, a in enumerate(point):
        if i >= poly.nvars:
            break
        if a.rational is not None:
            values[i] = a.rational
        elif poly.degree(i) > 0:
            coords.append((i, a))
    return poly.substitute(values) if values else poly, coords


def _remove_factor(q: Polynomial, m: Polynomial) -> Polynomial:
    while not q.is_zero() and m.divides(q):
        q = q.exact_div(m)
    return q


@lru_cache(maxsize=4096)
def _norm(g: Polynomial, minpolys: tuple[tuple[int, tuple[int, ...]], ...]) -> Polynomial:
    """Eliminate the listed variables against their defining polynomials."""
    q = g
    for var, mp in minpolys:
        m = Polynomial.univariate(mp, var, q.nvars)
        q = _remove_factor(q, m)
        q = resultant(m, q, var)
    return q


def value_norm(g: Polynomial, coords) -> list[Fraction]:
    """Ascending coefficients of a nonzero ``R(t)`` vanishing at ``g(coords)``."""
    n = g.nvars
    t = Polynomial.var(n, n + 1)
    expr = t - g.with_nvars(n + 1)
    r = _norm(expr, tuple((v, a.minpoly) for v, a in coords))
    return r.univariate_coeffs(n)


def _zero_radius(g: Polynomial, coords) -> tuple[bool, Fraction | None]:
    """(could_be_zero, radius).  If ``could_be_zero`` then ``|g| < radius``
    implies ``g == 0`` (``radius is None`` means any enclosure suffices)."""
    key = (g, tuple((v, a.minpoly) for v, a in coords))
    hit = _RADIUS.get(key)
    if hit is not None:
        return hit
    r = to_integer_coeffs(value_norm(g, coords))
    if r[0] != 0:
        res = (False, None)
    else:
        k = 0
        while r[k] == 0:
            k += 1
        rest = squarefree_part(r[k:])
        radius = None
        for iso in isolate_squarefree(rest):
            if isinstance(iso, Fraction):
                d = abs(iso)
            else:
                lo, hi = iso
                while lo <= 0 <= hi and lo != hi:
                    lo, hi = refine(rest, (lo, hi), (hi - lo) / 2)
                d = min(abs(lo), abs(hi))
            radius = d if radius is None else min(radius, d)
        res = (True, radius)
    _RADIUS[key] = res
    return res


_RADIUS: dict = {}


def sign_at(poly: Polynomial, point: Sequence[AlgebraicNumber]) -> int:
    """Exact sign of ``poly`` at a point of real algebraic numbers."""
    g, coords = _split(poly, point)
    if g.is_zero():
        return 0
    if not coords:
        return sign(g.constant_value())
    if len(coords) == 1:
        var, a = coords[0]
        cs = g.univariate_coeffs(var)
        if not trim(poly_rem(cs, list(a.minpoly))):
            return 0
        return _refine_sign(g, coords, None, False)
    return _refine_sign(g, coords, None, None)


def _refine_sign(g, coords, radius, maybe_zero) -> int:
    w = Fraction(1, 4)
    rounds = 0
    box: list = [None] * g.nvars
    while True:
        for var, a in coords:
            box[var] = a.refined(w)
        lo, hi = eval_box(g, box)
        if lo > 0:
            return 1
        if hi < 0:
            return -1
        rounds += 1
        if maybe_zero is None and rounds >= 6:
            maybe_zero, radius = _zero_radius(g, coords)
        if maybe_zero and (radius is None or max(-lo, hi) < radius):
            return 0
        w /= 4


def is_zero_at(poly: Polynomial, point: Sequence[AlgebraicNumber]) -> bool:
    return sign_at(poly, point) == 0


# -- roots over algebraic points ---------------------------------------------

def real_roots_at(poly: Polynomial, point: Sequence[AlgebraicNumber]) -> list[AlgebraicNumber]:
    """Distinct real roots in the last variable of ``poly(point, y)``.

    ``poly`` has ``len(point) + 1`` variables.  Raises :class:`CurtainFibre`
    when the substituted polynomial is identically zero.
    """
    y = poly.nvars - 1
    if len(point) != y:
        raise ValueError(f"point has {len(point)} coordinates, expected {y}")
    cs = poly.coeffs_in(y)
    signs = [sign_at(c, point) for c in cs]
    if not any(signs):
        raise CurtainFibre("polynomial vanishes on the whole fibre")
    d = max(i for i, s in enumerate(signs) if s)
    if d == 0:
        return []
    trimmed = Polynomial.from_coeffs(cs[: d + 1], y)
    g, coords = _split(trimmed, point)
    if not coords:
        return real_roots_rational(g.univariate_coeffs(y))
    q = _norm(g, tuple((v, a.minpoly) for v, a in coords))
    candidates = real_roots_rational(q.univariate_coeffs(y))
    return [c for c in candidates if sign_at(trimmed, list(point) + [c]) == 0]


def isolate_real_roots(p: Polynomial, point: Sequence[AlgebraicNumber] = ()) -> list[AlgebraicNumber]:
    """Real roots of ``p`` in its last variable after substituting ``point``."""
    if p.nvars == len(point) + 1:
        return real_roots_rational(p.univariate_coeffs(0)) if not point else real_roots_at(p, point)
    raise ValueError("point length must be one less than the variable count")


def rational_below(a: AlgebraicNumber) -> Fraction:
    if a.rational is not None:
        return Fraction(floor(a.rational) - 1)
    return Fraction(floor(a.enclosure()[0]) - 1)


def rational_above(a: AlgebraicNumber) -> Fraction:
    if a.rational is not None:
        return Fraction(ceil(a.rational) + 1)
    return Fraction(ceil(a.enclosure()[1]) + 1)


def rational_between(a: AlgebraicNumber, b: AlgebraicNumber) -> Fraction:
    """A simple rational strictly between ``a < b``."""
    from .roots import simplest_between

    w = Fraction(1)
    while True:
        alo, ahi = a.refined(w)
        blo, bhi = b.refined(w)
        if ahi < blo:
            return simplest_between(ahi, blo)
        w /= 4
