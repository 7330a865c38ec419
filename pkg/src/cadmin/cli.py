"""Command line entry point: ``minimize <problem.json> [options]``."""

from __future__ import annotations

import argparse
import json
import sys

from .geometry import ContinuityUndecided, CurtainAtBoundary
from .minimize import (
    EXHAUSTIVE,
    GREEDY,
    ProblemError,
    dot_report,
    graph_report,
    load_problem,
    run_exhaustive,
    run_greedy,
    text_report,
    trace_json,
)
from .model import index_str

EXIT_OK, EXIT_PARSE, EXIT_UNDECIDED, EXIT_BUDGET = 0, 2, 3, 4


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="minimize", description="Reduce a CAD adapted to a family of algebraic sets."
    )
    p.add_argument("problem", help="problem description (JSON)")
    p.add_argument("--mode", choices=[GREEDY, EXHAUSTIVE], help="override the problem's mode")
    p.add_argument("--out", choices=["text", "json", "dot"], default="text")
    p.add_argument("--budget-nodes", type=int, help="node cap for exhaustive exploration")
    p.add_argument("--trace", metavar="FILE", help="write the greedy reduction trace as JSON")
    return p


def _chain_dot(result) -> str:
    lines = ["digraph reductions {"]
    counts = [result.initial.cell_count] + [s.cells_after for s in result.trace]
    for i, n in enumerate(counts):
        shape = ", shape=doublecircle" if i == len(counts) - 1 else ""
        lines.append(f'  n{i} [label="{n}"{shape}];')
    for i, s in enumerate(result.trace):
        lines.append(f'  n{i} -> n{i + 1} [label="{index_str(s.site.node)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    try:
        problem = load_problem(args.problem)
    except (OSError, ProblemError) as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    mode = args.mode or problem.options.mode
    out = sys.stdout
    try:
        if mode == GREEDY:
            result = run_greedy(problem)
            if args.trace:
                with open(args.trace, "w") as fh:
                    fh.write(trace_json(result.trace))
            if args.out == "json":
                out.write(result.cad.dumps() + "\n")
            elif args.out == "dot":
                out.write(_chain_dot(result))
            else:
                out.write(text_report(result.cad, result.trace))
            return EXIT_OK
        graph = run_exhaustive(problem, args.budget_nodes)
        if args.out == "json":
            doc = {
                "complete": graph.complete,
                "nodes": len(graph.nodes),
                "edges": [
                    {"source": e.source, "site": list(e.site.node), "target": e.target}
                    for e in graph.edges
                ],
                "normalForms": [graph.cad(h).to_json() for h in graph.normal_forms],
            }
            out.write(json.dumps(doc, sort_keys=True, indent=1) + "\n")
        elif args.out == "dot":
            out.write(dot_report(graph))
        else:
            out.write(graph_report(graph))
        return EXIT_OK if graph.complete else EXIT_BUDGET
    except (ContinuityUndecided, CurtainAtBoundary) as exc:
        print(f"continuity undecided: {exc}", file=sys.stderr)
        return EXIT_UNDECIDED


if __name__ == "__main__":
    sys.exit(main())
