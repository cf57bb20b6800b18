"""Shared builders for the test suite."""

import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).parent))

from treecut import build_rooted_tree


def prufer_edges(seq, n):
    """Decode a Prufer sequence over labels 0..n-1 into an edge list."""
    if n == 1:
        return []
    if n == 2:
        return [(0, 1)]
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    edges = []
    alive = set(range(n))
    for x in seq:
        leaf = min(v for v in alive if degree[v] == 1)
        edges.append((leaf, x))
        degree[leaf] -= 1
        degree[x] -= 1
        alive.remove(leaf)
    u, v = sorted(v for v in alive if degree[v] == 1)
    edges.append((u, v))
    return edges


def random_tree(rng: random.Random, n: int, wmax: int = 4, cmax: int = 4):
    """Uniform random labeled tree shape with random integer weights."""
    seq = tuple(rng.randrange(n) for _ in range(max(0, n - 2)))
    edges = prufer_edges(seq, n)
    vertices = [(i, rng.randint(1, wmax)) for i in range(n)]
    weighted = [(u, v, rng.randint(1, cmax)) for u, v in edges]
    return build_rooted_tree(vertices, weighted, rng.randrange(n))


def path_tree(labels=("a", "b"), weights=None, costs=None, root=None):
    labels = list(labels)
    weights = weights or [1] * len(labels)
    costs = costs or [1] * (len(labels) - 1)
    vertices = list(zip(labels, weights))
    edges = [(labels[i], labels[i + 1], costs[i]) for i in range(len(labels) - 1)]
    return build_rooted_tree(vertices, edges, root if root is not None else labels[-1])


def star_tree(center="r", leaves=("x", "y", "z"), weight=1, cost=1):
    vertices = [(center, weight)] + [(v, weight) for v in leaves]
    edges = [(center, v, cost) for v in leaves]
    return build_rooted_tree(vertices, edges, center)


def broom_tree():
    """Root with three 2-vertex limbs; the minimal shape on which the
    per-step budget decrement of the printed residue recursion goes wrong."""
    vertices = [("r", 1)] + [(f"a{i}", 1) for i in (1, 2, 3)] + \
               [(f"b{i}", 5) for i in (1, 2, 3)]
    edges = [("r", f"a{i}", 100) for i in (1, 2, 3)] + \
            [(f"a{i}", f"b{i}", 2) for i in (1, 2, 3)]
    return build_rooted_tree(vertices, edges, "r")
