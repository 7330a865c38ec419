"""Minimal cylindrical algebraic decompositions by reduction."""

from .builder import Family, SetDefinition, build_cad, build_projection_basis, label_cells, lift_cad
from .exact.algebraic import AlgebraicNumber, ExtendedReal, real_roots_at, sign_at
from .exact.poly import Polynomial
from .minimize import Problem, parse_problem, run_exhaustive, run_greedy
from .model import Cad, LabelTree, refines, validate_cad

__all__ = [
    "AlgebraicNumber",
    "Cad",
    "ExtendedReal",
    "Family",
    "LabelTree",
    "Polynomial",
    "Problem",
    "SetDefinition",
    "build_cad",
    "build_projection_basis",
    "label_cells",
    "lift_cad",
    "parse_problem",
    "real_roots_at",
    "refines",
    "run_exhaustive",
    "run_greedy",
    "sign_at",
    "validate_cad",
]
