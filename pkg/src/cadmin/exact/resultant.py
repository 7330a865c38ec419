"""Sylvester-matrix resultants and principal subresultant coefficients."""

from __future__ import annotations

from .poly import Polynomial, PolynomialError


def bareiss_det(matrix: list[list[Polynomial]]) -> Polynomial:
    """Fraction-free determinant over a polynomial ring."""
    n = len(matrix)
    if n == 0:
        raise ValueError("empty matrix")
    nvars = matrix[0][0].nvars
    m = [row[:] for row in matrix]
    sign = 1
    prev = Polynomial.const(1, nvars)
    for k in range(n - 1):
        if m[k][k].is_zero():
            for r in range(k + 1, n):
                if not m[r][k].is_zero():
                    m[k], m[r] = m[r], m[k]
                    sign = -sign
                    break
            else:
                return Polynomial.zero(nvars)
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = m[i][j] * m[k][k] - m[i][k] * m[k][j]
                m[i][j] = num.exact_div(prev)
        prev = m[k][k]
    det = m[n - 1][n - 1]
    return det if sign > 0 else -det


def sylvester_matrix(a: Polynomial, b: Polynomial, var: int) -> list[list[Polynomial]]:
    ca, cb = a.coeffs_in(var), b.coeffs_in(var)
    m, n = len(ca) - 1, len(cb) - 1
    zero = Polynomial.zero(a.nvars)
    size = m + n
    rows = []
    for i in range(n):
        row = [zero] * size
        for k, c in enumerate(reversed(ca)):
            row[i + k] = c
        rows.append(row)
    for i in range(m):
        row = [zero] * size
        for k, c in enumerate(reversed(cb)):
            row[i + k] = c
        rows.append(row)
    return rows


def resultant(a: Polynomial, b: Polynomial, var: int) -> Polynomial:
    """Resultant w.r.t. ``x_var``; result keeps ``nvars`` with ``x_var`` absent."""
    a._check(b)
    if a.is_zero() and b.is_zero():
        raise PolynomialError("resultant of two zero polynomials")
    if a.is_zero() or b.is_zero():
        return Polynomial.zero(a.nvars)
    m, n = a.degree(var), b.degree(var)
    if m == 0 and n == 0:
        return Polynomial.const(1, a.nvars)
    if m == 0:
        return a ** n
    if n == 0:
        return b ** m
    return bareiss_det(sylvester_matrix(a, b, var))


def resultant_last(a: Polynomial, b: Polynomial) -> Polynomial:
    """Resultant in the last variable, returned in one fewer variable."""
    a._check(b)
    r = resultant(a, b, a.nvars - 1)
    return r.with_nvars(a.nvars - 1)


def psc(a: Polynomial, b: Polynomial, var: int, j: int) -> Polynomial:
    """j-th principal subresultant coefficient w.r.t. ``x_var``.

    Determinant of the leading ``m+n-2j`` columns of the ``j``-th
    subresultant matrix; ``psc(a, b, var, 0)`` is the resultant.
    """
    ca, cb = a.coeffs_in(var), b.coeffs_in(var)
    m, n = len(ca) - 1, len(cb) - 1
    if not 0 <= j < min(m, n) + (1 if m != n else 0):
        raise ValueError(f"psc index {j} out of range for degrees {m}, {n}")
    zero = Polynomial.zero(a.nvars)
    width = m + n - j
    rows = []
    for i in range(n - j):
        row = [zero] * width
        for k, c in enumerate(reversed(ca)):
            row[i + k] = c
        rows.append(row)
    for i in range(m - j):
        row = [zero] * width
        for k, c in enumerate(reversed(cb)):
            row[i + k] = c
        rows.append(row)
    square = [row[: m + n - 2 * j] for row in rows]
    return bareiss_det(square)


def discriminant_last(p: Polynomial) -> Polynomial:
    """Resultant of ``p`` and its derivative in the last variable (no lc division)."""
    v = p.nvars - 1
    return resultant(p, p.derivative(v), v).with_nvars(p.nvars - 1)
