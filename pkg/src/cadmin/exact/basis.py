"""Irreducible factorization and squarefree coprime bases over Q.

Factorization is delegated to sympy; everything downstream works with the
normalized (primitive, positive leading coefficient) factors.
"""

from __future__ import annotations

from functools import lru_cache
from typing import Sequence

import sympy

from .poly import Polynomial, PolynomialError


class DegenerateFamily(PolynomialError):
    pass


def _gens(nvars: int):
    return sympy.symbols(f"v0:{nvars}")


@lru_cache(maxsize=8192)
def _factor_cached(p: Polynomial) -> tuple[Polynomial, ...]:
    if p.is_constant():
        return ()
    gens = _gens(p.nvars)
    _, factors = sympy.factor_list(p.to_sympy(gens))
    out = []
    for f, _mult in factors:
        q = Polynomial.from_sympy(sympy.Poly(f, *gens, domain="QQ"), p.nvars)
        if not q.is_constant():
            out.append(q.content_normalized())
    return tuple(sorted(set(out), key=poly_sort_key))


def irreducible_factors(p: Polynomial) -> tuple[Polynomial, ...]:
    """Distinct normalized irreducible factors (constants dropped)."""
    if p.is_zero():
        raise PolynomialError("cannot factor the zero polynomial")
    return _factor_cached(p)


def poly_sort_key(p: Polynomial):
    """Deterministic order: by main variable, then degree, then terms."""
    mv = p.main_var()
    return (mv, p.degree(mv) if mv >= 0 else 0, len(p), p.to_json().__repr__())


def squarefree_basis(polys: Sequence[Polynomial]) -> list[Polynomial]:
    """Pairwise coprime squarefree polynomials with the same real zero set.

    Irreducible factors over Q are pairwise coprime and squarefree, so the
    distinct factors of all inputs form such a basis.
    """
    if not polys:
        raise DegenerateFamily("degenerate family: no polynomials")
    nvars = polys[0].nvars
    if any(p.nvars != nvars for p in polys):
        raise PolynomialError("variable-count mismatch in basis input")
    if all(p.is_zero() for p in polys):
        raise DegenerateFamily("degenerate family")
    seen: set[Polynomial] = set()
    for p in polys:
        if not p.is_zero():
            seen.update(irreducible_factors(p))
    return sorted(seen, key=poly_sort_key)


@lru_cache(maxsize=4096)
def univariate_factors(coeffs: tuple[int, ...]) -> tuple[tuple[int, ...], ...]:
    """Irreducible factors of an integer polynomial (ascending coefficients)."""
    from .roots import to_integer_coeffs

    p = Polynomial.univariate(coeffs)
    if p.is_constant():
        return ()
    return tuple(to_integer_coeffs(f.univariate_coeffs(0)) for f in irreducible_factors(p))
