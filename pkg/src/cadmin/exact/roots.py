"""Real root isolation for univariate rational polynomials.

Descartes' rule of signs on Moebius-transformed intervals, bisecting until
each interval carries at most one sign variation.  Polynomials are ascending
coefficient lists of integers or Fractions.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import floor
from typing import Sequence

Interval = tuple[Fraction, Fraction]


def trim(coeffs: Sequence) -> list:
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return c


def to_integer_coeffs(coeffs: Sequence) -> tuple[int, ...]:
    from math import gcd, lcm

    c = [Fraction(v) for v in trim(coeffs)]
    if not c:
        return ()
    den = 1
    for v in c:
        den = lcm(den, v.denominator)
    ints = [int(v * den) for v in c]
    g = 0
    for v in ints:
        g = gcd(g, v)
    ints = [v // g for v in ints]
    if ints[-1] < 0:
        ints = [-v for v in ints]
    return tuple(ints)


def horner(coeffs: Sequence, x):
    acc = 0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def sign(v) -> int:
    return (v > 0) - (v < 0)


def sign_variations(coeffs: Sequence) -> int:
    last = 0
    count = 0
    for c in coeffs:
        s = sign(c)
        if s:
            if last and s != last:
                count += 1
            last = s
    return count


def _poly_mul(a: list, b: list) -> list:
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _descartes_count(coeffs: Sequence, a: Fraction, b: Fraction) -> int:
    """Sign variations of ``(x+1)^n p((a x + b)/(x + 1))``; bounds roots in (a, b)."""
    n = len(coeffs) - 1
    # binomial powers built incrementally
    total = [0] * (n + 1)
    lin = [b, a]  # b + a x
    one = [1, 1]  # 1 + x
    pow_lin = [[Fraction(1)]]
    for _ in range(n):
        pow_lin.append(_poly_mul(pow_lin[-1], lin))
    pow_one = [[1]]
    for _ in range(n):
        pow_one.append(_poly_mul(pow_one[-1], one))
    for i, c in enumerate(coeffs):
        if c:
            term = _poly_mul(pow_lin[i], pow_one[n - i])
            for k, v in enumerate(term):
                total[k] += c * v
    return sign_variations(total)


def cauchy_bound(coeffs: Sequence) -> Fraction:
    lc = Fraction(coeffs[-1])
    m = max((abs(Fraction(c) / lc) for c in coeffs[:-1]), default=Fraction(0))
    # power of two keeps bisection points dyadic
    b = 1
    while b <= 1 + m:
        b *= 2
    return Fraction(b)


def squarefree_part(coeffs: Sequence) -> tuple[int, ...]:
    """Squarefree part via the Euclidean gcd with the derivative."""
    p = to_integer_coeffs(coeffs)
    if len(p) <= 2:
        return p
    dp = [i * c for i, c in enumerate(p)][1:]
    g = _gcd(list(map(Fraction, p)), list(map(Fraction, dp)))
    if len(g) <= 1:
        return p
    q, r = _divmod(list(map(Fraction, p)), g)
    assert not trim(r)
    return to_integer_coeffs(q)


def _divmod(a: list, b: list) -> tuple[list, list]:
    a = trim(a)
    b = trim(b)
    if not b:
        raise ZeroDivisionError
    if len(a) < len(b):
        return [Fraction(0)], a
    q = [Fraction(0)] * (len(a) - len(b) + 1)
    r = [Fraction(v) for v in a]
    lc = Fraction(b[-1])
    for k in range(len(a) - len(b), -1, -1):
        c = r[k + len(b) - 1] / lc
        q[k] = c
        if c:
            for i, v in enumerate(b):
                r[k + i] -= c * v
    return q, trim(r[: len(b) - 1])


def _gcd(a: list, b: list) -> list:
    a, b = trim(a), trim(b)
    while b:
        _, r = _divmod(a, b)
        a, b = b, r
    if not a:
        return a
    lc = a[-1]
    return [v / lc for v in a]


def poly_rem(a: Sequence, b: Sequence) -> list:
    return _divmod(list(a), list(b))[1]


def poly_gcd(a: Sequence, b: Sequence) -> tuple[int, ...]:
    return to_integer_coeffs(_gcd([Fraction(v) for v in a], [Fraction(v) for v in b]))


@lru_cache(maxsize=4096)
def isolate_squarefree(p: tuple[int, ...]) -> tuple[Fraction | Interval, ...]:
    """Isolate the real roots of a squarefree integer polynomial.

    Returns, in increasing order, either exact rational roots (``Fraction``)
    or open intervals ``(lo, hi)`` holding exactly one root with
    ``p(lo) * p(hi) < 0``.
    """
    p = tuple(trim(p))
    if len(p) <= 1:
        return ()
    out: list = []
    coeffs = list(p)
    if coeffs[0] == 0:
        out.append(Fraction(0))
        coeffs = coeffs[1:]
    if len(coeffs) <= 1:
        return tuple(out)
    B = cauchy_bound(coeffs)
    found: list = list(out)

    def recurse(a: Fraction, b: Fraction):
        v = _descartes_count(coeffs, a, b)
        if v == 0:
            return
        if v == 1:
            found.append((a, b))
            return
        m = (a + b) / 2
        if horner(coeffs, m) == 0:
            found.append(m)
        recurse(a, m)
        recurse(m, b)

    recurse(-B, Fraction(0))
    recurse(Fraction(0), B)

    def lo(r):
        return r if isinstance(r, Fraction) else r[0]

    found.sort(key=lo)
    return tuple(_shrink(coeffs, r) for r in found)


def _shrink(coeffs, r):
    """Ensure an interval has opposite endpoint signs (never zero)."""
    if isinstance(r, Fraction):
        return r
    a, b = r
    sa, sb = sign(horner(coeffs, a)), sign(horner(coeffs, b))
    if sa * sb < 0:
        return (a, b)
    # an endpoint is 0 or a neighbouring split point; bisect inward
    while True:
        m = (a + b) / 2
        sm = sign(horner(coeffs, m))
        if sm == 0:
            return m
        if sa == 0 or sa == sm:
            a, sa = m, sm
        else:
            b, sb = m, sm
        if sa and sb and sa * sb < 0:
            return (a, b)


def refine(p: Sequence, interval: Interval, width: Fraction) -> Interval:
    """Bisect an isolating interval until narrower than ``width``."""
    a, b = interval
    sa = sign(horner(p, a))
    while b - a >= width:
        m = (a + b) / 2
        sm = sign(horner(p, m))
        if sm == 0:
            return (m, m)
        if sm == sa:
            a, sa = m, sm
        else:
            b = m
    return (a, b)


def real_root_count(p: Sequence) -> int:
    return len(isolate_squarefree(squarefree_part(p)))


def simplest_between(lo: Fraction, hi: Fraction) -> Fraction:
    """The rational with smallest denominator strictly inside ``(lo, hi)``."""
    if lo >= hi:
        raise ValueError("empty interval")
    if lo < 0 < hi:
        return Fraction(0)
    if hi <= 0:
        return -simplest_between(-hi, -lo)
    fl = floor(lo)
    if fl + 1 < hi:
        return Fraction(fl + 1)
    if lo == fl:
        return fl + Fraction(1, floor(1 / (hi - fl)) + 1)
    return fl + 1 / simplest_between(1 / (hi - fl), 1 / (lo - fl))
