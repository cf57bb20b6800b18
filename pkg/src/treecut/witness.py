"""Witness subpartitions: reconstruction from DP tables and validation.

A witness is an explicit list of vertex sets.  Reconstruction walks the
backtracking records stored during the forward DP sweep; it never re-runs
any minimization, so the witness is exactly the one the recorded
tie-breaking picked.  Validation re-checks every problem constraint from
scratch with exact arithmetic and reports violations as data.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .errors import EmptyPart, TableMismatch
from .solver import BRANCH_GAMMA, BRANCH_RESIDUE, DpTables, ProblemSpec
from .tree import RootedTree


@dataclass(frozen=True)
class Subpartition:
    """k disjoint connected vertex sets plus the uncovered residue.

    ``parts`` are in discovery order of the reconstruction (deterministic);
    expansions are exact rationals measured in the full tree, so a part's
    boundary includes edges into the residue and into other parts.
    """

    parts: tuple
    residue: frozenset
    per_part_expansion: tuple
    max_expansion: Fraction

    def to_json(self) -> dict:
        return {
            "parts": [sorted_ids(p) for p in self.parts],
            "residue": sorted_ids(self.residue),
            "expansions": [f"{e.numerator}/{e.denominator}"
                           for e in self.per_part_expansion],
            "max_expansion": (f"{self.max_expansion.numerator}/"
                              f"{self.max_expansion.denominator}"),
        }


def sorted_ids(ids) -> list:
    """Deterministic ordering for possibly mixed-type vertex ids."""
    try:
        return sorted(ids)
    except TypeError:
        return sorted(ids, key=lambda x: (type(x).__name__, str(x)))


def expansion(tree: RootedTree, part, use_potentials: bool = False) -> Fraction:
    """Exact edge expansion of a vertex set, measured in the full tree:
    boundary cost (plus the set's potential when enabled) over the set's
    weight.  The virtual root edge never contributes."""
    idxs = {tree._idx(v) for v in part}
    if not idxs:
        raise EmptyPart("expansion of the empty set is undefined")
    cut = 0
    weight = 0
    pot = 0
    c_s = tree.cost_scaled
    children = tree.children_idx
    parent = tree.parent_idx
    for u in idxs:
        weight += tree.weight_scaled[u]
        pot += tree.potential_scaled[u]
        for c in children[u]:
            if c not in idxs:
                cut += c_s[c]
        p = parent[u]
        if p >= 0 and p not in idxs:
            cut += c_s[u]
    numerator = cut + pot if use_potentials else cut
    return Fraction(numerator, weight)


def make_subpartition(tree: RootedTree, parts, residue,
                      use_potentials: bool = False) -> Subpartition:
    """Bundle raw vertex sets into a Subpartition with exact expansions."""
    parts = tuple(frozenset(p) for p in parts)
    expansions = tuple(expansion(tree, p, use_potentials) for p in parts)
    return Subpartition(parts, frozenset(residue), expansions, max(expansions))


def reconstruct_subpartition(tree: RootedTree, spec: ProblemSpec,
                             tables: DpTables):
    """Rebuild one witness from the tables, or return None if infeasible.

    Raises TableMismatch unless the tables were produced for exactly this
    tree and spec with choice recording enabled.
    """
    if tables.tree is not tree:
        raise TableMismatch("tables belong to a different tree")
    if tables.spec != spec:
        raise TableMismatch("tables were computed for a different spec")
    if not tables.record_choices:
        raise TableMismatch("tables were built without choice records")
    if not tables.feasible:
        return None
    parts_idx, residue_idx = _collect(tables, spec.parts, tables.lam)
    ids = tree.ids
    parts = [frozenset(ids[i] for i in p) for p in parts_idx]
    residue = frozenset(ids[i] for i in residue_idx)
    return make_subpartition(tree, parts, residue, spec.use_potentials)


def _collect(tables: DpTables, k0: int, l0: int):
    """Iterative backtrack over the recorded choices.

    Two task kinds: ``mu`` resolves a feasibility cell (either opening a new
    part rooted at the cell's vertex or sending the vertex to the residue
    and splitting budgets across children); ``gamma`` grows an existing part
    downward, cutting or keeping each child edge as recorded.
    """
    tree = tables.tree
    children_of = tree.children_idx
    parts: list[set] = []
    residue: set = set()
    # task: (is_gamma, vertex, k, l, part_slot)
    stack = [(False, tree.root, k0, l0, -1)]
    while stack:
        is_gamma, u, k, l, slot = stack.pop()
        kids = children_of[u]
        d = len(kids)
        if not is_gamma:
            br = tables._mu_branch[u][k][l]
            if br == BRANCH_GAMMA:
                parts.append({u})
                stack.append((True, u, k, l, len(parts) - 1))
            elif br == BRANCH_RESIDUE:
                residue.add(u)
                if d == 0:
                    continue
                ck, cl = k, l - 1
                for ci in range(d - 1, 0, -1):
                    kp, lp = tables._usplit[u][ci][ck][cl]
                    # pushed deepest-child first, so pops run in child order
                    stack.append((False, kids[ci], ck - kp, cl - lp, -1))
                    ck, cl = kp, lp
                stack.append((False, kids[0], ck, cl, -1))
            else:
                raise TableMismatch(
                    f"backtrack reached an infeasible cell (k={k}, l={l})")
        else:
            if slot >= 0 and u not in parts[slot]:
                parts[slot].add(u)
            if d == 0:
                continue
            ck, cl = k, l
            portions = []
            for ci in range(d - 1, 0, -1):
                kp, lp = tables._ysplit[u][ci][ck][cl]
                portions.append((ci, ck + 1 - kp, cl - lp))
                ck, cl = kp, lp
            portions.append((0, ck, cl))
            for ci, pk, pl in portions:
                child = kids[ci]
                if tables._xcut[u][ci][pk][pl]:
                    stack.append((False, child, pk - 1, pl, -1))
                else:
                    stack.append((True, child, pk, pl, slot))
    return parts, residue


VIOLATION_PART_COUNT = "part-count"
VIOLATION_EMPTY_PART = "empty-part"
VIOLATION_OVERLAP = "overlap"
VIOLATION_COVERAGE = "coverage"
VIOLATION_DISCONNECTED = "disconnected-part"
VIOLATION_RESIDUE_SIZE = "residue-overflow"
VIOLATION_EXPANSION = "expansion-exceeds-threshold"
VIOLATION_FORBIDDEN = "forbidden-outlier-in-residue"


def validate_subpartition(tree: RootedTree, spec: ProblemSpec,
                          sub: Subpartition) -> list:
    """Re-check every constraint; returns the list of violated conditions
    (empty means valid).  Expansions are recomputed here, not trusted."""
    violations = []
    parts = [set(tree._idx(v) for v in p) for p in sub.parts]
    residue = set(tree._idx(v) for v in sub.residue)

    if len(parts) != spec.parts:
        violations.append(VIOLATION_PART_COUNT)
    if any(not p for p in parts):
        violations.append(VIOLATION_EMPTY_PART)

    covered = set()
    overlap = False
    for p in parts:
        if covered & p:
            overlap = True
        covered |= p
    if overlap or (covered & residue):
        violations.append(VIOLATION_OVERLAP)
    if covered | residue != set(range(tree.vertex_count)):
        violations.append(VIOLATION_COVERAGE)

    for p in parts:
        if p and not _connected(tree, p):
            violations.append(VIOLATION_DISCONNECTED)
            break

    if len(residue) > spec.outliers:
        violations.append(VIOLATION_RESIDUE_SIZE)

    forb = {tree._idx(v) for v in spec.forbidden_outliers}
    if residue & forb:
        violations.append(VIOLATION_FORBIDDEN)

    for p in sub.parts:
        if p and expansion(tree, p, spec.use_potentials) > spec.xi:
            violations.append(VIOLATION_EXPANSION)
            break

    return violations


def _connected(tree: RootedTree, idxs: set) -> bool:
    start = next(iter(idxs))
    seen = {start}
    frontier = [start]
    while frontier:
        u = frontier.pop()
        for v in tree.children_idx[u]:
            if v in idxs and v not in seen:
                seen.add(v)
                frontier.append(v)
        p = tree.parent_idx[u]
        if p >= 0 and p in idxs and p not in seen:
            seen.add(p)
            frontier.append(p)
    return len(seen) == len(idxs)
