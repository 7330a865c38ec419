"""Shared builders for the test suite."""

from __future__ import annotations

import sympy

from cadmin.builder import Family, SetDefinition
from cadmin.exact.poly import Polynomial
from cadmin.minimize import Options, Problem

NAMES = {1: ["x"], 2: ["x", "y"], 3: ["x", "y", "z"]}


def P(expr: str, n: int = 2) -> Polynomial:
    gens = sympy.symbols(NAMES[n])
    p = sympy.Poly(sympy.sympify(expr, locals={str(g): g for g in gens}), *gens)
    return Polynomial.from_sympy(p, n)


def family(n: int, *sets: list[str]) -> Family:
    return Family(
        n,
        tuple(SetDefinition(f"S{i + 1}", tuple(P(e, n) for e in s)) for i, s in enumerate(sets)),
        tuple(NAMES[n]),
    )


def problem(n: int, sets, extra=(), mode="greedy") -> Problem:
    return Problem(family(n, *sets), Options(mode=mode, extra_polynomials=tuple(P(e, n) for e in extra)))
