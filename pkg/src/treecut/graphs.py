"""File ingestion and the spanning-tree front end for general graphs.

Similarity graphs come in as JSON (same schema as trees, minus the root)
or as edge CSV.  Edge costs are similarities: the spanning tree is minimum
with respect to distance 1/cost (or an explicit per-edge distance), which
makes it the maximum-similarity spanning tree.  Tree edge costs stay the
original similarities, since those are what boundary computations consume.

Expansions downstream are computed on the spanning tree, not on the input
graph; the tree is an approximation device and results are labeled as
tree-side numbers.
"""

from __future__ import annotations

import csv
import json
from fractions import Fraction
from pathlib import Path

from .errors import (
    DuplicateEdge,
    EmptyGraph,
    InvalidInput,
    NonPositiveVertexWeight,
    ParseError,
    SelfLoop,
    UnknownVertexId,
)
from .search import Forest
from .tree import RootedTree, build_rooted_tree, tree_from_json
from .values import parse_rational
from .witness import sorted_ids


class WeightedGraph:
    """Simple undirected graph with vertex weights, optional potentials,
    positive similarity costs and optional per-edge distance overrides.

    Vertices are ordered by id at construction; edges keep input order.
    """

    __slots__ = ("ids", "index", "weights", "potentials", "edges", "adj")

    def __init__(self, vertices, edges):
        # vertices: iterable of (id, weight, potential); edges: (u, v, cost, dist|None)
        order = sorted_ids([v[0] for v in vertices])
        by_id = {}
        for vid, w, p in vertices:
            if vid in by_id:
                raise InvalidInput(f"duplicate vertex id {vid!r}")
            w = parse_rational(w)
            p = parse_rational(p)
            if w <= 0:
                raise NonPositiveVertexWeight(f"vertex {vid!r} has weight {w}")
            if p < 0:
                raise InvalidInput(f"vertex {vid!r} has negative potential {p}")
            by_id[vid] = (w, p)
        self.ids = list(order)
        self.index = {vid: i for i, vid in enumerate(self.ids)}
        self.weights = [by_id[vid][0] for vid in self.ids]
        self.potentials = [by_id[vid][1] for vid in self.ids]

        self.edges = []
        self.adj = [[] for _ in self.ids]
        seen = set()
        for u, v, cost, dist in edges:
            if u not in self.index or v not in self.index:
                missing = u if u not in self.index else v
                raise UnknownVertexId(f"edge endpoint {missing!r} is not declared")
            ui, vi = self.index[u], self.index[v]
            if ui == vi:
                raise SelfLoop(f"self-loop at {u!r}")
            key = (min(ui, vi), max(ui, vi))
            if key in seen:
                raise DuplicateEdge(f"duplicate edge {u!r}-{v!r}")
            seen.add(key)
            cost = parse_rational(cost)
            if cost <= 0:
                raise InvalidInput(f"edge {u!r}-{v!r} needs positive cost, got {cost}")
            if dist is not None:
                dist = parse_rational(dist)
                if dist <= 0:
                    raise InvalidInput(f"edge {u!r}-{v!r} needs positive distance, got {dist}")
            eidx = len(self.edges)
            self.edges.append((ui, vi, cost, dist))
            self.adj[ui].append((vi, eidx))
            self.adj[vi].append((ui, eidx))

    @property
    def vertex_count(self) -> int:
        return len(self.ids)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def vertex_ids(self) -> tuple:
        return tuple(self.ids)

    def weight(self, vertex) -> Fraction:
        return self.weights[self._idx(vertex)]

    def potential(self, vertex) -> Fraction:
        return self.potentials[self._idx(vertex)]

    def has_potentials(self) -> bool:
        return any(self.potentials)

    def _idx(self, vertex) -> int:
        try:
            return self.index[vertex]
        except KeyError:
            raise UnknownVertexId(f"unknown vertex id: {vertex!r}") from None

    def edge_records(self):
        """Yield (u_id, v_id, cost, distance_or_None) in input order."""
        for ui, vi, cost, dist in self.edges:
            yield self.ids[ui], self.ids[vi], cost, dist

    def components(self) -> list:
        """Connected components as lists of ids, each ordered by id, ordered
        by their smallest member."""
        seen = [False] * len(self.ids)
        comps = []
        for start in range(len(self.ids)):
            if seen[start]:
                continue
            seen[start] = True
            stack = [start]
            members = []
            while stack:
                u = stack.pop()
                members.append(self.ids[u])
                for v, _e in self.adj[u]:
                    if not seen[v]:
                        seen[v] = True
                        stack.append(v)
            comps.append(sorted_ids(members))
        return comps

    def expansion(self, part, use_potentials: bool = False) -> Fraction:
        """Exact edge expansion of a vertex set in this graph."""
        idxs = {self._idx(v) for v in part}
        if not idxs:
            raise InvalidInput("expansion of the empty set is undefined")
        cut = Fraction(0)
        for ui, vi, cost, _d in self.edges:
            if (ui in idxs) != (vi in idxs):
                cut += cost
        weight = sum(self.weights[i] for i in idxs)
        if use_potentials:
            cut += sum(self.potentials[i] for i in idxs)
        return cut / weight


def tree_as_graph(tree: RootedTree) -> WeightedGraph:
    """View a rooted tree as a weighted graph (the virtual root edge is
    dropped).  Requires strictly positive edge costs."""
    vertices = [(vid, tree.weight(vid), tree.potential(vid))
                for vid in tree.ids]
    edges = []
    for u in tree._bfs_order():
        for c in tree.children_idx[u]:
            edges.append((tree.ids[u], tree.ids[c],
                          Fraction(tree.cost_scaled[c], tree.scale), None))
    return WeightedGraph(vertices, edges)


def graph_from_json(data: dict) -> WeightedGraph:
    if not isinstance(data, dict) or "vertices" not in data or "edges" not in data:
        raise ParseError("graph JSON needs 'vertices' and 'edges'")
    vertices = []
    for i, v in enumerate(data["vertices"]):
        if "id" not in v or "weight" not in v:
            raise ParseError(f"vertex #{i} needs 'id' and 'weight'")
        try:
            vertices.append((v["id"], parse_rational(v["weight"]),
                             parse_rational(v.get("potential", 0))))
        except ValueError as exc:
            raise ParseError(f"vertex #{i}: {exc}") from exc
    edges = []
    for i, e in enumerate(data["edges"]):
        if "u" not in e or "v" not in e or "cost" not in e:
            raise ParseError(f"edge #{i} needs 'u', 'v' and 'cost'")
        try:
            dist = parse_rational(e["distance"]) if "distance" in e else None
            edges.append((e["u"], e["v"], parse_rational(e["cost"]), dist))
        except ValueError as exc:
            raise ParseError(f"edge #{i}: {exc}") from exc
    return WeightedGraph(vertices, edges)


def graph_from_csv(path) -> WeightedGraph:
    """Edge list CSV with a header: ``u,v,cost[,distance]``.  Vertices are
    inferred from endpoints with weight 1; ids stay strings."""
    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty CSV") from None
        cols = [h.strip().lower() for h in header]
        for required in ("u", "v", "cost"):
            if required not in cols:
                raise ParseError(f"{path}: header must name 'u', 'v', 'cost'")
        iu, iv, ic = cols.index("u"), cols.index("v"), cols.index("cost")
        idist = cols.index("distance") if "distance" in cols else None
        for lineno, row in enumerate(reader, start=2):
            if not row or all(not cell.strip() for cell in row):
                continue
            try:
                u = row[iu].strip()
                v = row[iv].strip()
                cost = parse_rational(row[ic].strip())
                dist = None
                if idist is not None and idist < len(row) and row[idist].strip():
                    dist = parse_rational(row[idist].strip())
            except (IndexError, ValueError) as exc:
                raise ParseError(f"{path}:{lineno}: {exc}") from exc
            if cost <= 0:
                raise ParseError(f"{path}:{lineno}: cost must be positive, got {cost}")
            if dist is not None and dist <= 0:
                raise ParseError(f"{path}:{lineno}: distance must be positive, got {dist}")
            rows.append((u, v, cost, dist, lineno))

    vertex_ids = []
    seen = set()
    for u, v, _c, _d, _ln in rows:
        for vid in (u, v):
            if vid not in seen:
                seen.add(vid)
                vertex_ids.append(vid)
    if not vertex_ids:
        raise ParseError(f"{path}: no edges")
    vertices = [(vid, Fraction(1), Fraction(0)) for vid in vertex_ids]
    try:
        return WeightedGraph(vertices, [(u, v, c, d) for u, v, c, d, _ in rows])
    except (SelfLoop, DuplicateEdge) as exc:
        raise type(exc)(f"{path}: {exc}") from exc


def load_instance(path, fmt: str | None = None):
    """Load a tree or graph from disk.

    JSON objects carrying a ``root`` key become a :class:`RootedTree`;
    JSON without a root and any CSV become a :class:`WeightedGraph`.
    Rationals are preserved exactly.
    """
    path = Path(path)
    if fmt is None:
        fmt = "csv" if path.suffix.lower() == ".csv" else "json"
    if fmt not in ("json", "csv"):
        raise InvalidInput(f"unknown format {fmt!r}")
    if fmt == "csv":
        return graph_from_csv(path)
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ParseError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from exc
    if isinstance(data, dict) and "root" in data:
        return tree_from_json(data)
    return graph_from_json(data)


def similarity_spanning_tree(graph: WeightedGraph):
    """Maximum spanning tree with respect to similarity, built as the
    minimum spanning tree of distance 1/cost (or the explicit distance
    override).  Ties break on (distance, smaller endpoint, larger endpoint),
    so the result is deterministic.  Returns a single tree for a connected
    graph, otherwise a :class:`Forest` with one tree per component."""
    if graph.vertex_count == 0:
        raise EmptyGraph("cannot build a spanning tree with no vertices")

    ranked = []
    for eidx, (ui, vi, cost, dist) in enumerate(graph.edges):
        d = dist if dist is not None else 1 / cost
        lo, hi = (ui, vi) if ui <= vi else (vi, ui)
        ranked.append((d, lo, hi, eidx))
    ranked.sort()

    parent = list(range(graph.vertex_count))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    chosen = []  # edge indices in acceptance order
    for _d, _lo, _hi, eidx in ranked:
        ui, vi, _c, _dd = graph.edges[eidx]
        ru, rv = find(ui), find(vi)
        if ru != rv:
            parent[ru] = rv
            chosen.append(eidx)

    comp_edges = {}
    for eidx in chosen:
        root = find(graph.edges[eidx][0])
        comp_edges.setdefault(root, []).append(eidx)

    trees = []
    for members in graph.components():
        root_idx = find(graph.index[members[0]])
        vertices = [(v, graph.weight(v), graph.potential(v)) for v in members]
        edges = []
        for eidx in comp_edges.get(root_idx, []):
            ui, vi, cost, _dd = graph.edges[eidx]
            edges.append((graph.ids[ui], graph.ids[vi], cost))
        root = _max_weight_root(members, graph)
        trees.append(build_rooted_tree(vertices, edges, root))

    if len(trees) == 1:
        return trees[0]
    return Forest(tuple(trees))


def _max_weight_root(members, graph: WeightedGraph):
    best = members[0]
    for v in members[1:]:
        if graph.weight(v) > graph.weight(best):
            best = v
    return best


def forest_from_graph(graph: WeightedGraph):
    """Interpret an already-acyclic graph as a :class:`Forest` (one rooted
    tree per component, rooted at the heaviest vertex, ties to the smallest
    id).  Raises :class:`NotForestAfterDeletion` if the graph has a cycle."""
    from .errors import NotForestAfterDeletion

    if graph.vertex_count == 0:
        raise EmptyGraph("cannot build a forest with no vertices")
    parent = list(range(graph.vertex_count))

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for ui, vi, _c, _d in graph.edges:
        ru, rv = find(ui), find(vi)
        if ru == rv:
            raise NotForestAfterDeletion(
                f"graph has a cycle through {graph.ids[ui]!r}-{graph.ids[vi]!r};"
                " expected a forest")
        parent[ru] = rv

    trees = []
    for members in graph.components():
        member_set = set(members)
        vertices = [(v, graph.weight(v), graph.potential(v)) for v in members]
        edges = [(u, v, cost) for u, v, cost, _d in graph.edge_records()
                 if u in member_set and v in member_set]
        trees.append(build_rooted_tree(vertices, edges,
                                       _max_weight_root(members, graph)))
    return Forest(tuple(trees))
