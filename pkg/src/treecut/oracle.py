"""Brute-force reference implementations for small instances.

Enumeration works by choosing the residue set first and then cutting edges
inside the surviving induced forest: every connected subpartition of a tree
arises from exactly one (residue, cut-set) pair, so each is produced once.

This module intentionally shares no algorithmic code with the solver; it
rebuilds adjacency and recomputes expansions on its own so that agreement
between the two is meaningful evidence.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .errors import BudgetExceeded
from .solver import ProblemSpec
from .tree import RootedTree
from .witness import Subpartition


@dataclass(frozen=True)
class EnumerationBudget:
    """Hard caps; enumeration refuses anything bigger."""

    max_vertices: int = 10
    max_parts: int = 8


DEFAULT_BUDGET = EnumerationBudget()


def _check_budget(tree: RootedTree, parts: int, budget: EnumerationBudget):
    if tree.vertex_count > budget.max_vertices:
        raise BudgetExceeded(
            f"{tree.vertex_count} vertices exceed the cap of {budget.max_vertices}")
    if parts > budget.max_parts:
        raise BudgetExceeded(f"{parts} parts exceed the cap of {budget.max_parts}")


def _edge_list(tree: RootedTree):
    edges = []
    for v in range(tree.vertex_count):
        p = tree.parent_idx[v]
        if p >= 0:
            edges.append((v, p))
    edges.sort()
    return edges


def _pieces(vertices, edge_subset):
    """Connected pieces of (vertices, edge_subset) via union-find."""
    parent = {v: v for v in vertices}

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for u, v in edge_subset:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[ru] = rv
    groups = {}
    for v in vertices:
        groups.setdefault(find(v), []).append(v)
    # canonical order: by minimum member
    return sorted(groups.values(), key=min)


def _raw_subpartitions(tree: RootedTree, parts: int, outliers: int):
    """Yield (part_idx_lists, residue_idx_tuple) without expansions."""
    n = tree.vertex_count
    edges = _edge_list(tree)
    vertices = list(range(n))
    for r_size in range(min(outliers, n) + 1):
        for residue in combinations(vertices, r_size):
            out = set(residue)
            remaining = [v for v in vertices if v not in out]
            if len(remaining) < parts:
                continue
            kept_edges = [(u, v) for u, v in edges if u not in out and v not in out]
            base = _pieces(remaining, kept_edges)
            need = parts - len(base)
            if need < 0 or need > len(kept_edges):
                continue
            for cut in combinations(range(len(kept_edges)), need):
                cut_set = set(cut)
                chosen = [e for i, e in enumerate(kept_edges) if i not in cut_set]
                pieces = _pieces(remaining, chosen)
                if len(pieces) == parts:
                    yield pieces, residue


def _own_expansion(tree: RootedTree, part, use_potentials: bool) -> Fraction:
    """Expansion recomputed from raw structure (independent of witness.py)."""
    inside = set(part)
    cut = 0
    weight = 0
    pot = 0
    for v in inside:
        weight += tree.weight_scaled[v]
        pot += tree.potential_scaled[v]
        p = tree.parent_idx[v]
        if p >= 0 and p not in inside:
            cut += tree.cost_scaled[v]
    for v in range(tree.vertex_count):
        p = tree.parent_idx[v]
        if p >= 0 and p in inside and v not in inside:
            cut += tree.cost_scaled[v]
    num = cut + pot if use_potentials else cut
    return Fraction(num, weight)


def enumerate_connected_subpartitions(tree: RootedTree, parts: int,
                                      outliers: int,
                                      budget: EnumerationBudget = DEFAULT_BUDGET):
    """Yield every connected subpartition with the requested part count and
    residue within budget, exactly once up to part relabeling.  Parts come
    out in canonical order (ascending minimum vertex id); expansions are
    base-mode (no potentials)."""
    _check_budget(tree, parts, budget)
    ids = tree.ids
    for pieces, residue in _raw_subpartitions(tree, parts, outliers):
        part_sets = tuple(frozenset(ids[v] for v in piece) for piece in pieces)
        expansions = tuple(_own_expansion(tree, piece, False) for piece in pieces)
        yield Subpartition(part_sets, frozenset(ids[v] for v in residue),
                           expansions, max(expansions))


def oracle_decide(tree: RootedTree, spec: ProblemSpec,
                  budget: EnumerationBudget = DEFAULT_BUDGET) -> bool:
    """Exhaustive answer to the decision problem (all variants)."""
    _check_budget(tree, spec.parts, budget)
    if spec.parts > tree.vertex_count:
        return False
    forb = {tree._idx(v) for v in spec.forbidden_outliers}
    for pieces, residue in _raw_subpartitions(tree, spec.parts, spec.outliers):
        if forb and forb.intersection(residue):
            continue
        ok = True
        for piece in pieces:
            if _own_expansion(tree, piece, spec.use_potentials) > spec.xi:
                ok = False
                break
        if ok:
            return True
    return False


def oracle_min_xi(tree: RootedTree, parts: int, outliers: int, *,
                  use_potentials: bool = False, forbidden_outliers=frozenset(),
                  budget: EnumerationBudget = DEFAULT_BUDGET):
    """Exact minimum of the maximum expansion over all admissible connected
    subpartitions, or None when none exists."""
    _check_budget(tree, parts, budget)
    if parts > tree.vertex_count:
        return None
    forb = {tree._idx(v) for v in forbidden_outliers}
    best = None
    for pieces, residue in _raw_subpartitions(tree, parts, outliers):
        if forb and forb.intersection(residue):
            continue
        worst = None
        for piece in pieces:
            e = _own_expansion(tree, piece, use_potentials)
            if worst is None or e > worst:
                worst = e
        if best is None or worst < best:
            best = worst
    return best
