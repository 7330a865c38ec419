"""Index relabelling, tree reductions and their geometric lifts."""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .geometry import continuity_check, curtain_locus
from .model import (
    Cad,
    ContinuityCertificate,
    Index,
    LabelTree,
    index_str,
    is_even,
    shift,
)

S_A, N_A, F_A = "S_A", "N_A", "F_A"


class InvalidSite(ValueError):
    pass


class LiftFailure(RuntimeError):
    pass


# -- index calculus -----------------------------------------------------------

def prefix_map(k: int, idx: Index) -> Index:
    return tuple(idx) if len(idx) < k else tuple(idx[:k])


def classify(a: Index, idx: Index) -> str:
    k = len(a)
    if k < 1:
        raise ValueError("classification needs a nonempty site")
    p = prefix_map(k, idx)
    if p == a:
        return S_A
    if len(p) == k and p[:-1] == a[:-1] and p[-1] > a[-1]:
        return N_A
    return F_A


def relabel(a: Index, idx: Index) -> Index:
    """The relabelling map attached to an even site ``a``."""
    if not is_even(a):
        raise InvalidSite(f"site {index_str(a)} is not even")
    cls = classify(a, idx)
    if cls == S_A:
        return shift(idx, len(a), -1)
    if cls == N_A:
        return shift(idx, len(a), -2)
    return tuple(idx)


def preimage(a: Index, idx: Index) -> set[Index]:
    """Fibre of the relabelling map over ``idx`` (in closed form)."""
    k = len(a)
    below = shift(a, k, -1)
    if len(idx) >= k and prefix_map(k, idx) == below:
        return {tuple(idx), shift(idx, k, 1), shift(idx, k, 2)}
    if classify(a, idx) in (S_A, N_A):
        return {shift(idx, k, 2)}
    return {tuple(idx)}


# -- tree reductions ----------------------------------------------------------

@dataclass(frozen=True, order=True)
class ReductionSite:
    level: int
    node: Index

    def __str__(self):
        return index_str(self.node)


def _check_site(tree: LabelTree, a: Index) -> None:
    if not is_even(a):
        raise InvalidSite(f"invalid site {index_str(a)}: not an even index")
    if a not in tree:
        raise InvalidSite(f"invalid site {index_str(a)}: not a node of the tree")
    k = len(a)
    if shift(a, k, -1) not in tree or shift(a, k, 1) not in tree:
        raise InvalidSite(f"invalid site {index_str(a)}: missing a sibling")


def tree_reduction_applicable(tree: LabelTree, a: Index) -> bool:
    _check_site(tree, a)
    k = len(a)
    lab = tree.label(a)
    return tree.label(shift(a, k, -1)) == lab == tree.label(shift(a, k, 1))


def apply_tree_reduction(tree: LabelTree, a: Index) -> LabelTree:
    if not tree_reduction_applicable(tree, a):
        raise InvalidSite(f"tree reduction at {index_str(a)} does not apply")
    leaves: dict[Index, tuple[int, ...]] = {}
    for leaf, lab in tree.leaves.items():
        new = relabel(a, leaf)
        prev = leaves.setdefault(new, lab)
        if prev != lab:
            raise AssertionError("label transport collision")
    return LabelTree(tree.dimension, leaves)


def enumerate_sites(c: Cad | None, tree: LabelTree) -> list[ReductionSite]:
    """Tree-applicable sites in (level, index) order."""
    out = []
    for node in tree.nodes:
        if not is_even(node):
            continue
        k = len(node)
        if shift(node, k, -1) not in tree or shift(node, k, 1) not in tree:
            continue
        if tree_reduction_applicable(tree, node):
            out.append(ReductionSite(k, node))
    return sorted(out)


# -- lifting ------------------------------------------------------------------

@dataclass
class LiftDecision:
    lifts: bool
    site: Index
    certificates: dict[Index, ContinuityCertificate] = field(default_factory=dict)
    witness: Index | None = None  # first offending merged section
    reason: str = ""

    def __bool__(self):
        return self.lifts


@lru_cache(maxsize=64)
def family_loci(family, dimension: int) -> tuple:
    return tuple(curtain_locus(s, dimension) for s in family.sets)


def merged_sections(c: Cad, a: Index) -> list[Index]:
    """Even indices above ``a - e_k`` whose bounds merge under the site, by length."""
    k = len(a)
    below = shift(a, k, -1)
    cands = [
        i for i in c.constituents if len(i) > k and is_even(i) and i[:k] == below
    ]
    return sorted(cands, key=lambda i: (len(i), i))


def lift_check(c: Cad, tree: LabelTree, a: Index, family, full: bool = False) -> LiftDecision:
    """Decide whether the tree reduction at ``a`` lifts to the CAD.

    Checks continuity of each merged bound above ``a - e_k``.  With
    ``full=True`` every even index of the reduced tree is examined; the
    others reuse existing bounds, which must be single-piece or certified.
    """
    if not tree_reduction_applicable(tree, a):
        raise InvalidSite(f"tree reduction at {index_str(a)} does not apply")
    k = len(a)
    decision = LiftDecision(True, a)
    if k == c.dimension:
        return decision
    loci = family_loci(family, c.dimension)
    for sec in merged_sections(c, a):
        cert = continuity_check(c, tree, family, a, sec, loci)
        decision.certificates[sec] = cert
        if not cert.verdict:
            decision.lifts = False
            decision.witness = sec
            notes = {ch.note for ch in cert.checks if ch.note}
            decision.reason = "curtain obstruction" if notes else "discontinuous merged bound"
            return decision
    if full:
        below = shift(a, k, -1)
        for i in c.constituents:
            if not is_even(i) or (len(i) > k and i[:k] == below):
                continue
            cons = c.constituents[i]
            if len(cons) > 1:
                cert = c.certificates.get(frozenset(cons))
                if cert is None or not cert.verdict:
                    decision.lifts = False
                    decision.witness = i
                    decision.reason = "existing bound lacks a valid certificate"
                    return decision
    return decision


def apply_cad_reduction(
    c: Cad,
    tree: LabelTree,
    a: Index,
    family,
    decision: LiftDecision | None = None,
) -> tuple[Cad, LabelTree]:
    if decision is None:
        decision = lift_check(c, tree, a, family)
    if not decision.lifts:
        raise LiftFailure(
            f"reduction at {index_str(a)} does not lift: {decision.reason} at "
            f"{index_str(decision.witness) if decision.witness else '?'}"
        )
    new_relabel = {atom: relabel(a, cur) for atom, cur in c.relabel.items()}
    kids: dict[Index, int] = {}
    for cur in set(new_relabel.values()):
        b = cur[:-1]
        kids[b] = max(kids.get(b, 0), cur[-1])
    sizes = {b: (m - 1) // 2 for b, m in kids.items()}
    groups: dict[Index, list[Index]] = {}
    for atom, cur in new_relabel.items():
        groups.setdefault(cur, []).append(atom)
    current_sets = {frozenset(v) for cur, v in groups.items() if is_even(cur)}
    certs = {key: cert for key, cert in c.certificates.items() if key in current_sets}
    for sec, cert in decision.certificates.items():
        key = frozenset(groups[relabel(a, sec)])
        certs[key] = cert
    reduced = Cad(c.atomic, new_relabel, sizes, certs)
    return reduced, apply_tree_reduction(tree, a)


def normalize_last_level(c: Cad, tree: LabelTree, family=None) -> tuple[Cad, LabelTree, list]:
    """Apply last-level reductions until none remains; returns the steps taken."""
    steps = []
    n = c.dimension
    while True:
        sites = [s for s in enumerate_sites(c, tree) if s.level == n]
        if not sites:
            return c, tree, steps
        site = sites[0]
        before = c.cell_count
        c, tree = apply_cad_reduction(c, tree, site.node, family, LiftDecision(True, site.node))
        steps.append((site, before, c.cell_count))


def lifting_sites(c: Cad, tree: LabelTree) -> list[ReductionSite]:
    return [s for s in enumerate_sites(c, tree) if s.level < c.dimension]
