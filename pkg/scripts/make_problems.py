"""Regenerate problems/*.json from readable polynomial expressions."""

import json
import pathlib

import sympy

from cadmin.exact.poly import Polynomial

OUT = pathlib.Path(__file__).resolve().parent.parent / "problems"

PROBLEMS = {
    "interval_ends": (["x"], [["ends", ["x**2 - 1"]]], {"extraPolynomials": ["x"]}),
    "circle": (["x", "y"], [["circle", ["x**2 + y**2 - 1"]]], {}),
    "circle_spurious": (["x", "y"], [["circle", ["x**2 + y**2 - 1"]]], {"extraPolynomials": ["x"]}),
    "sphere_spurious": (
        ["x", "y", "z"],
        [["sphere", ["x**2 + y**2 + z**2 - 1"]]],
        {"extraPolynomials": ["x"]},
    ),
    "crossing_lines": (["x", "y"], [["diagonal", ["y - x"]], ["antidiagonal", ["y + x"]]], {}),
    "parabola_line": (["x", "y"], [["parabola", ["y - x**2"]], ["line", ["y - x - 1"]]], {}),
    "ellipse": (["x", "y"], [["ellipse", ["x**2 + 4*y**2 - 4"]]], {}),
    "elliptic_cubic": (["x", "y"], [["cubic", ["y**2 - x**3 + x"]]], {}),
    "pole_obstruction": (["x", "y"], [["curve", ["y*(x*y - 1)*(x**2 + (y - 5)**2)"]]], {}),
    "cylinder_line": (["x", "y", "z"], [["cylinder", ["x**2 + y**2 - 1"]], ["axis", ["x", "y"]]], {}),
}


def poly_json(expr: str, names: list[str]) -> list:
    gens = sympy.symbols(names)
    p = sympy.Poly(sympy.sympify(expr, locals=dict(zip(names, gens))), *gens)
    return Polynomial.from_sympy(p, len(names)).to_json()


def main():
    OUT.mkdir(exist_ok=True)
    for name, (names, sets, opts) in PROBLEMS.items():
        doc = {
            "dimension": len(names),
            "variables": names,
            "sets": [{"name": n, "polynomials": [poly_json(e, names) for e in ps]} for n, ps in sets],
            "options": {"mode": "greedy", **opts},
        }
        if "extraPolynomials" in opts:
            doc["options"]["extraPolynomials"] = [poly_json(e, names) for e in opts["extraPolynomials"]]
        (OUT / f"{name}.json").write_text(json.dumps(doc, indent=1) + "\n")
        print("wrote", name)


if __name__ == "__main__":
    main()
