"""Sparse multivariate polynomials with exact rational coefficients.

Variables are positional: ``x_0, ..., x_{nvars-1}``.  The *last* variable is
the one CAD lifting solves for, so "main variable" means the highest-indexed
variable that actually occurs.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Iterable, Mapping, Sequence

import sympy

Exponent = tuple[int, ...]


class PolynomialError(ValueError):
    pass


def _order_key(e: Exponent) -> Exponent:
    # lex order with the last variable most significant
    return e[::-1]


class Polynomial:
    """Immutable sparse polynomial ``{exponent vector: Fraction}``."""

    __slots__ = ("nvars", "_terms", "_hash")

    def __init__(self, nvars: int, terms: Mapping[Exponent, object] | Iterable = ()):
        self.nvars = nvars
        items = terms.items() if isinstance(terms, Mapping) else terms
        clean: dict[Exponent, Fraction] = {}
        for e, c in items:
            e = tuple(int(v) for v in e)
            if len(e) != nvars:
                raise PolynomialError(f"exponent {e} does not have length {nvars}")
            if any(v < 0 for v in e):
                raise PolynomialError(f"negative exponent in {e}")
            c = Fraction(c)
            if c:
                clean[e] = clean.get(e, Fraction(0)) + c
                if not clean[e]:
                    del clean[e]
        self._terms = clean
        self._hash = None

    # -- constructors -------------------------------------------------------
    @classmethod
    def zero(cls, nvars: int) -> Polynomial:
        return cls(nvars)

    @classmethod
    def const(cls, c, nvars: int) -> Polynomial:
        return cls(nvars, {(0,) * nvars: c})

    @classmethod
    def var(cls, i: int, nvars: int) -> Polynomial:
        e = [0] * nvars
        e[i] = 1
        return cls(nvars, {tuple(e): 1})

    @classmethod
    def univariate(cls, coeffs: Sequence, var: int = 0, nvars: int = 1) -> Polynomial:
        """Build from ascending coefficients in ``x_var``."""
        terms = {}
        for k, c in enumerate(coeffs):
            e = [0] * nvars
            e[var] = k
            terms[tuple(e)] = c
        return cls(nvars, terms)

    @classmethod
    def from_coeffs(cls, coeffs: Sequence[Polynomial], var: int) -> Polynomial:
        """Inverse of :meth:`coeffs_in`: ``sum coeffs[k] * x_var**k``."""
        nvars = coeffs[0].nvars
        terms: dict[Exponent, Fraction] = {}
        for k, c in enumerate(coeffs):
            for e, v in c._terms.items():
                e2 = list(e)
                e2[var] += k
                terms[tuple(e2)] = v
        return cls(nvars, terms)

    # -- basic protocol ------------------------------------------------------
    @property
    def terms(self) -> dict[Exponent, Fraction]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_constant(self) -> bool:
        return all(not any(e) for e in self._terms)

    def constant_value(self) -> Fraction:
        if not self.is_constant():
            raise PolynomialError("polynomial is not constant")
        return self._terms.get((0,) * self.nvars, Fraction(0))

    def key(self) -> tuple:
        return (self.nvars, tuple(sorted(self._terms.items())))

    def __eq__(self, other):
        if not isinstance(other, Polynomial):
            return NotImplemented
        return self.nvars == other.nvars and self._terms == other._terms

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(self.key())
        return self._hash

    def __repr__(self):
        return f"Polynomial({self.nvars}, {self.to_str()!r})"

    def to_str(self, names: Sequence[str] | None = None) -> str:
        if not self._terms:
            return "0"
        names = names or (["x", "y", "z", "t"] if self.nvars <= 4 else [f"x{i}" for i in range(self.nvars)])
        parts = []
        for e in sorted(self._terms, key=_order_key, reverse=True):
            c = self._terms[e]
            mono = "*".join(
                names[i] if k == 1 else f"{names[i]}^{k}" for i, k in enumerate(e) if k
            )
            if not mono:
                parts.append(str(c))
            elif c == 1:
                parts.append(mono)
            elif c == -1:
                parts.append("-" + mono)
            else:
                parts.append(f"{c}*{mono}")
        return " + ".join(parts).replace("+ -", "- ")

    # -- arithmetic ----------------------------------------------------------
    def _check(self, other: Polynomial):
        if self.nvars != other.nvars:
            raise PolynomialError(
                f"variable-count mismatch: {self.nvars} vs {other.nvars}"
            )

    def _coerce(self, other) -> Polynomial:
        if isinstance(other, Polynomial):
            self._check(other)
            return other
        return Polynomial.const(other, self.nvars)

    def __add__(self, other):
        other = self._coerce(other)
        t = dict(self._terms)
        for e, c in other._terms.items():
            t[e] = t.get(e, 0) + c
        return Polynomial(self.nvars, t)

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.nvars, {e: -c for e, c in self._terms.items()})

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, Polynomial):
            c = Fraction(other)
            return Polynomial(self.nvars, {e: v * c for e, v in self._terms.items()})
        self._check(other)
        t: dict[Exponent, Fraction] = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                t[e] = t.get(e, 0) + c1 * c2
        return Polynomial(self.nvars, t)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        result = Polynomial.const(1, self.nvars)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    # -- structure -----------------------------------------------------------
    def degree(self, var: int) -> int:
        """Degree in ``x_var``; -1 for the zero polynomial."""
        if not self._terms:
            return -1
        return max(e[var] for e in self._terms)

    def total_degree(self) -> int:
        return max((sum(e) for e in self._terms), default=-1)

    def main_var(self) -> int:
        """Highest variable index occurring, -1 for constants."""
        m = -1
        for e in self._terms:
            for i in range(self.nvars - 1, m, -1):
                if e[i]:
                    m = i
                    break
        return m

    def coeffs_in(self, var: int) -> list[Polynomial]:
        """Ascending coefficients w.r.t. ``x_var`` (same ``nvars``)."""
        d = self.degree(var)
        if d < 0:
            return []
        buckets: list[dict] = [{} for _ in range(d + 1)]
        for e, c in self._terms.items():
            e2 = list(e)
            k = e2[var]
            e2[var] = 0
            buckets[k][tuple(e2)] = c
        return [Polynomial(self.nvars, b) for b in buckets]

    def leading_coeff(self, var: int) -> Polynomial:
        cs = self.coeffs_in(var)
        return cs[-1] if cs else Polynomial.zero(self.nvars)

    def derivative(self, var: int) -> Polynomial:
        t = {}
        for e, c in self._terms.items():
            if e[var]:
                e2 = list(e)
                e2[var] -= 1
                t[tuple(e2)] = c * e[var]
        return Polynomial(self.nvars, t)

    def reductum(self, var: int) -> Polynomial:
        d = self.degree(var)
        return Polynomial(self.nvars, {e: c for e, c in self._terms.items() if e[var] != d})

    def substitute(self, values: Mapping[int, Fraction]) -> Polynomial:
        """Substitute rationals for some variables; ``nvars`` is unchanged."""
        t: dict[Exponent, Fraction] = {}
        for e, c in self._terms.items():
            e2 = list(e)
            for i, v in values.items():
                if e2[i]:
                    c = c * Fraction(v) ** e2[i]
                    e2[i] = 0
            e2 = tuple(e2)
            t[e2] = t.get(e2, 0) + c
        return Polynomial(self.nvars, t)

    def evaluate(self, point: Sequence) -> Fraction:
        total = Fraction(0)
        for e, c in self._terms.items():
            v = c
            for x, k in zip(point, e):
                if k:
                    v *= Fraction(x) ** k
            total += v
        return total

    def with_nvars(self, nvars: int) -> Polynomial:
        """Pad or truncate trailing variables (truncated ones must be absent)."""
        if nvars >= self.nvars:
            pad = (0,) * (nvars - self.nvars)
            return Polynomial(nvars, {e + pad: c for e, c in self._terms.items()})
        for e in self._terms:
            if any(e[nvars:]):
                raise PolynomialError("cannot drop a variable that occurs")
        return Polynomial(nvars, {e[:nvars]: c for e, c in self._terms.items()})

    def permute(self, mapping: Sequence[int], nvars: int) -> Polynomial:
        """Send variable ``i`` to position ``mapping[i]`` in a ``nvars``-ary ring."""
        t = {}
        for e, c in self._terms.items():
            e2 = [0] * nvars
            for i, k in enumerate(e):
                if k:
                    e2[mapping[i]] += k
            t[tuple(e2)] = c
        return Polynomial(nvars, t)

    def univariate_coeffs(self, var: int | None = None) -> list[Fraction]:
        """Ascending coefficients; all other variables must be absent."""
        if var is None:
            var = max(self.main_var(), 0)
        d = self.degree(var)
        out = [Fraction(0)] * (d + 1)
        for e, c in self._terms.items():
            if any(k for i, k in enumerate(e) if i != var):
                raise PolynomialError("polynomial is not univariate")
            out[e[var]] = c
        return out

    def leading_term(self) -> tuple[Exponent, Fraction]:
        e = max(self._terms, key=_order_key)
        return e, self._terms[e]

    # -- normal forms --------------------------------------------------------
    def content_normalized(self) -> Polynomial:
        """Primitive integer coefficients and positive leading coefficient."""
        if not self._terms:
            return self
        den = 1
        for c in self._terms.values():
            den = lcm(den, c.denominator)
        num = 0
        for c in self._terms.values():
            num = gcd(num, (c * den).numerator)
        _, lc = self.leading_term()
        scale = Fraction(den, num) * (1 if lc > 0 else -1)
        return self * scale

    def exact_div(self, other: Polynomial) -> Polynomial:
        """Exact quotient; raises if ``other`` does not divide ``self``."""
        q, r = self.divmod_lex(other)
        if not r.is_zero():
            raise PolynomialError("division is not exact")
        return q

    def divmod_lex(self, other: Polynomial) -> tuple[Polynomial, Polynomial]:
        self._check(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        le, lc = other.leading_term()
        rem = dict(self._terms)
        quot: dict[Exponent, Fraction] = {}
        leftover: dict[Exponent, Fraction] = {}
        while rem:
            e = max(rem, key=_order_key)
            c = rem[e]
            if all(a >= b for a, b in zip(e, le)):
                qe = tuple(a - b for a, b in zip(e, le))
                qc = c / lc
                quot[qe] = quot.get(qe, 0) + qc
                for oe, oc in other._terms.items():
                    te = tuple(a + b for a, b in zip(qe, oe))
                    v = rem.get(te, 0) - qc * oc
                    if v:
                        rem[te] = v
                    else:
                        rem.pop(te, None)
            else:
                leftover[e] = c
                del rem[e]
        return Polynomial(self.nvars, quot), Polynomial(self.nvars, leftover)

    def divides(self, other: Polynomial) -> bool:
        """True iff ``self`` divides ``other``."""
        if self.is_zero():
            return other.is_zero()
        if other.is_zero():
            return True
        # multivariate lex division gives zero remainder iff divisible when
        # the divisor is a single polynomial
        _, r = other.divmod_lex(self)
        return r.is_zero()

    # -- interop ---------------------------------------------------------------
    def to_sympy(self, gens: Sequence[sympy.Symbol]) -> sympy.Poly:
        return sympy.Poly.from_dict(
            {e: sympy.Rational(c.numerator, c.denominator) for e, c in self._terms.items()}
            or {(0,) * self.nvars: 0},
            *gens,
            domain="QQ",
        )

    @classmethod
    def from_sympy(cls, p: sympy.Poly, nvars: int) -> Polynomial:
        return cls(nvars, {e: Fraction(int(c.p), int(c.q)) for e, c in p.as_dict().items()})

    def to_json(self) -> list:
        return [
            [list(e), format_rational(c)]
            for e, c in sorted(self._terms.items(), key=lambda ec: _order_key(ec[0]), reverse=True)
        ]

    @classmethod
    def from_json(cls, data: list, nvars: int | None = None) -> Polynomial:
        if nvars is None:
            if not data:
                raise PolynomialError("cannot infer variable count of empty polynomial")
            nvars = len(data[0][0])
        return cls(nvars, {tuple(e): parse_rational(c) for e, c in data})


def poly_arith(a: Polynomial, b: Polynomial, op: str) -> Polynomial:
    """``op`` in {"add", "sub", "mul"}; raises on variable-count mismatch."""
    a._check(b)
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    raise ValueError(f"unknown operation {op!r}")


def format_rational(c: Fraction) -> str:
    return f"{c.numerator}/{c.denominator}"


def parse_rational(s) -> Fraction:
    if isinstance(s, int):
        return Fraction(s)
    if not isinstance(s, str):
        raise PolynomialError(f"rational must be a string, got {s!r}")
    try:
        return Fraction(s.strip())
    except (ValueError, ZeroDivisionError) as exc:
        raise PolynomialError(f"bad rational {s!r}") from exc
