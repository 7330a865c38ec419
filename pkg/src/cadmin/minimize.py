"""Problem parsing, greedy minimization, exhaustive exploration and reports."""

from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from typing import Any

from .builder import ALGEBRAIC, Family, SetDefinition, build_cad, label_cells
from .exact.poly import Polynomial, PolynomialError
from .geometry import ContinuityUndecided
from .model import Cad, LabelTree, index_str
from .reduction import (
    LiftDecision,
    family_loci,
    ReductionSite,
    apply_cad_reduction,
    enumerate_sites,
    lift_check,
    lifting_sites,
)

GREEDY, EXHAUSTIVE = "greedy", "exhaustive"
DEFAULT_NODE_BUDGET = 10_000


class ProblemError(ValueError):
    """Malformed problem description."""


@dataclass(frozen=True)
class Options:
    mode: str = GREEDY
    assume_closed_curtained: bool = True
    budget_nodes: int = DEFAULT_NODE_BUDGET
    extra_polynomials: tuple[Polynomial, ...] = ()


@dataclass(frozen=True)
class Problem:
    family: Family
    options: Options = Options()

    @property
    def dimension(self) -> int:
        return self.family.dimension


def _parse_poly(data, n: int, where: str) -> Polynomial:
    if not isinstance(data, list):
        raise ProblemError(f"{where}: polynomial must be a list of terms")
    try:
        return Polynomial.from_json(data, n)
    except (PolynomialError, TypeError, ValueError, IndexError) as exc:
        raise ProblemError(f"{where}: {exc}") from None


def parse_problem(data: Any) -> Problem:
    if isinstance(data, (str, bytes)):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise ProblemError(f"invalid JSON: {exc}") from None
    if not isinstance(data, dict):
        raise ProblemError("problem must be a JSON object")
    try:
        n = int(data["dimension"])
        variables = tuple(data.get("variables") or [f"x{i + 1}" for i in range(n)])
        raw_sets = data["sets"]
    except (KeyError, TypeError, ValueError) as exc:
        raise ProblemError(f"missing or bad field: {exc}") from None
    if not 1 <= n <= 3:
        raise ProblemError("dimension must be 1, 2 or 3")
    if len(variables) != n:
        raise ProblemError("variable count differs from the dimension")
    if not isinstance(raw_sets, list) or not raw_sets:
        raise ProblemError("sets must be a nonempty list")
    sets = []
    for i, s in enumerate(raw_sets):
        name = str(s.get("name", f"S{i + 1}"))
        polys = tuple(_parse_poly(p, n, f"set {name!r}") for p in s.get("polynomials", []))
        sets.append(SetDefinition(name, polys))
    opts = data.get("options", {}) or {}
    mode = str(opts.get("mode", GREEDY)).lower()
    if mode not in (GREEDY, EXHAUSTIVE):
        raise ProblemError(f"unknown mode {mode!r}")
    budget = opts.get("budget", {}) or {}
    extra = tuple(_parse_poly(p, n, "extraPolynomials") for p in opts.get("extraPolynomials", []))
    options = Options(
        mode=mode,
        assume_closed_curtained=bool(opts.get("assumeClosedCurtained", True)),
        budget_nodes=int(budget.get("nodes", DEFAULT_NODE_BUDGET)),
        extra_polynomials=extra,
    )
    try:
        family = Family(n, tuple(sets), variables)
    except ValueError as exc:
        raise ProblemError(str(exc)) from None
    return Problem(family, options)


def load_problem(path) -> Problem:
    with open(path) as fh:
        return parse_problem(fh.read())


# -- pipeline -----------------------------------------------------------------

@dataclass
class TraceStep:
    site: ReductionSite
    cells_before: int
    cells_after: int
    level_counts_before: list[int]
    level_counts_after: list[int]

    def to_json(self) -> dict:
        return {
            "site": list(self.site.node),
            "level": self.site.level,
            "cellsBefore": self.cells_before,
            "cellsAfter": self.cells_after,
        }


@dataclass
class GreedyResult:
    initial: Cad
    cad: Cad
    tree: LabelTree
    trace: list[TraceStep]
    refused: list[tuple[ReductionSite, str]] = field(default_factory=list)


def verify_curtained(family: Family) -> None:
    """Structural check that each set is closed and curtained.

    Algebraic sets always are; computing their curtain loci confirms the
    coefficient generators are well formed.
    """
    for s in family.sets:
        if s.mode != ALGEBRAIC:
            raise ProblemError(f"set {s.name!r} is not algebraic; closed-and-curtained unknown")
    family_loci(family, family.dimension)


def initial_cad(problem: Problem) -> tuple[Cad, LabelTree]:
    if not problem.options.assume_closed_curtained:
        verify_curtained(problem.family)
    c = build_cad(problem.family, problem.options.extra_polynomials)
    return c, label_cells(c, problem.family)


def _apply(c, tree, site, family, decision, trace):
    before = c.level_counts()
    c2, t2 = apply_cad_reduction(c, tree, site.node, family, decision)
    trace.append(TraceStep(site, before[-1], c2.cell_count, before, c2.level_counts()))
    return c2, t2


def _lift_check(c, tree, site, family, full=False):
    try:
        return lift_check(c, tree, site.node, family, full)
    except ContinuityUndecided as exc:
        raise ContinuityUndecided(f"{exc} (site {site})") from exc


def _normalize(c, tree, family, trace):
    n = c.dimension
    while True:
        sites = [s for s in enumerate_sites(c, tree) if s.level == n]
        if not sites:
            return c, tree
        c, tree = _apply(c, tree, sites[0], family, LiftDecision(True, sites[0].node), trace)


def run_greedy(problem: Problem) -> GreedyResult:
    family = problem.family
    c0, t0 = initial_cad(problem)
    trace: list[TraceStep] = []
    c, tree = _normalize(c0, t0, family, trace)
    refused: list[tuple[ReductionSite, str]] = []
    while True:
        for site in lifting_sites(c, tree):
            decision = _lift_check(c, tree, site, family)
            if decision.lifts:
                c, tree = _apply(c, tree, site, family, decision, trace)
                c, tree = _normalize(c, tree, family, trace)
                break
            refused.append((site, decision.reason))
        else:
            return GreedyResult(c0, c, tree, trace, refused)


@dataclass
class GraphEdge:
    source: str
    site: ReductionSite
    target: str


@dataclass
class ReductionGraph:
    nodes: dict[str, tuple[Cad, LabelTree]]
    edges: list[GraphEdge]
    root: str
    complete: bool
    refused: dict[str, list[tuple[ReductionSite, str]]] = field(default_factory=dict)
    # site decisions under the full and the restricted continuity check
    audits: list[tuple[str, ReductionSite, bool, bool]] = field(default_factory=list)

    @property
    def normal_forms(self) -> list[str]:
        has_out = {e.source for e in self.edges}
        if not self.complete:
            expanded = set(self.refused) | has_out
            return sorted(h for h in self.nodes if h in expanded and h not in has_out)
        return sorted(h for h in self.nodes if h not in has_out)

    def cad(self, h: str) -> Cad:
        return self.nodes[h][0]


def run_exhaustive(
    problem: Problem, budget_nodes: int | None = None, audit_full: bool = False
) -> ReductionGraph:
    family = problem.family
    budget = budget_nodes or problem.options.budget_nodes
    c0, t0 = initial_cad(problem)
    c, tree = _normalize(c0, t0, family, [])
    root = c.canonical_hash
    graph = ReductionGraph({root: (c, tree)}, [], root, True)
    queue = deque([root])
    while queue:
        h = queue.popleft()
        c, tree = graph.nodes[h]
        graph.refused[h] = []
        for site in lifting_sites(c, tree):
            decision = _lift_check(c, tree, site, family)
            if audit_full:
                full = _lift_check(c, tree, site, family, full=True)
                graph.audits.append((h, site, decision.lifts, full.lifts))
            if not decision.lifts:
                graph.refused[h].append((site, decision.reason))
                continue
            c2, t2 = apply_cad_reduction(c, tree, site.node, family, decision)
            c2, t2 = _normalize(c2, t2, family, [])
            h2 = c2.canonical_hash
            graph.edges.append(GraphEdge(h, site, h2))
            if h2 not in graph.nodes:
                if len(graph.nodes) >= budget:
                    graph.complete = False
                    continue
                graph.nodes[h2] = (c2, t2)
                queue.append(h2)
    return graph


# -- reports ------------------------------------------------------------------

def text_report(c: Cad, trace: list[TraceStep] | None = None, extra: str = "") -> str:
    lines = []
    for k, n in enumerate(c.level_counts(), start=1):
        lines.append(f"level {k}: {n} cells")
    if trace:
        lines.append("trace:")
        for s in trace:
            lines.append(
                f"  site {index_str(s.site.node)} (level {s.site.level}): "
                f"{s.cells_before} -> {s.cells_after} cells"
            )
    if extra:
        lines.append(extra)
    return "\n".join(lines) + "\n"


def graph_report(g: ReductionGraph) -> str:
    nfs = g.normal_forms
    lines = [
        f"nodes: {len(g.nodes)}",
        f"edges: {len(g.edges)}",
        f"complete: {'yes' if g.complete else 'no (budget exhausted)'}",
        f"normal forms: {len(nfs)}",
    ]
    for h in nfs:
        lines.append(f"  {h[:12]}: " + ", ".join(
            f"level {k}: {n}" for k, n in enumerate(g.cad(h).level_counts(), start=1)
        ))
    return "\n".join(lines) + "\n"


def dot_report(g: ReductionGraph) -> str:
    ids = {h: f"n{i}" for i, h in enumerate(sorted(g.nodes, key=lambda h: (-g.cad(h).cell_count, h)))}
    lines = ["digraph reductions {"]
    for h, nid in ids.items():
        shape = ", shape=doublecircle" if h in g.normal_forms else ""
        lines.append(f'  {nid} [label="{g.cad(h).cell_count}"{shape}];')
    for e in g.edges:
        lines.append(f'  {ids[e.source]} -> {ids[e.target]} [label="{index_str(e.site.node)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def trace_json(trace: list[TraceStep]) -> str:
    return json.dumps([s.to_json() for s in trace], indent=1)
