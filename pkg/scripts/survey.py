"""Run greedy and exhaustive minimization on every problem in problems/.

Prints one row per problem: initial and final cells per level, graph size,
normal-form count, refused sites and wall time.
"""

import argparse
import pathlib
import time

from cadmin.minimize import initial_cad, load_problem, run_exhaustive, run_greedy

ROOT = pathlib.Path(__file__).resolve().parent.parent


def fmt(counts):
    return "/".join(str(n) for n in counts)


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("paths", nargs="*", type=pathlib.Path)
    args = ap.parse_args()
    paths = args.paths or sorted((ROOT / "problems").glob("*.json"))
    header = f"{'problem':<18} {'initial':>10} {'greedy':>10} {'nodes':>5} {'edges':>5} {'NF':>3} {'refused':>7} {'secs':>6}"
    print(header)
    print("-" * len(header))
    for path in paths:
        prob = load_problem(path)
        t0 = time.perf_counter()
        c0, _ = initial_cad(prob)
        greedy = run_greedy(prob)
        graph = run_exhaustive(prob)
        secs = time.perf_counter() - t0
        refused = sum(len(v) for v in graph.refused.values())
        print(
            f"{path.stem:<18} {fmt(c0.level_counts()):>10} {fmt(greedy.cad.level_counts()):>10} "
            f"{len(graph.nodes):>5} {len(graph.edges):>5} {len(graph.normal_forms):>3} {refused:>7} {secs:>6.2f}"
        )


if __name__ == "__main__":
    main()
