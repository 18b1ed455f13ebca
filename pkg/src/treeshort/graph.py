"""Undirected graphs, BFS trees, node partitions, and distance primitives.

Nodes are dense integers 0..n-1 and edge ids are dense integers 0..m-1
(the position of the edge in the construction order).  All structures are
immutable after construction and safe to share between workers; every
traversal visits neighbors in ascending node id, so results are
reproducible.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

INFINITE = math.inf

MAX_WEIGHT = 2**31  # weights live in [1, 2**31)


class GraphError(Exception):
    """Malformed graph/tree/partition input or unsatisfied precondition."""


@dataclass(frozen=True)
class Violation:
    """Structured validation failure; `code` is stable, `message` is for humans."""

    code: str
    message: str

    def __str__(self) -> str:
        return f"{self.code}: {self.message}"


class Graph:
    """Simple undirected graph with optional distinct positive edge weights."""

    __slots__ = ("n", "edges", "weights", "_adj", "_edge_index")

    def __init__(
        self,
        n: int,
        edges: Iterable[tuple[int, int]],
        weights: Sequence[int] | None = None,
    ):
        if n < 1:
            raise GraphError(f"node count must be positive, got {n}")
        self.n = n
        normalized: list[tuple[int, int]] = []
        edge_index: dict[tuple[int, int], int] = {}
        for u, v in edges:
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            if u == v:
                raise GraphError(f"self-loop at node {u}")
            if u > v:
                u, v = v, u
            if (u, v) in edge_index:
                raise GraphError(f"parallel edge ({u}, {v})")
            edge_index[(u, v)] = len(normalized)
            normalized.append((u, v))
        self.edges: tuple[tuple[int, int], ...] = tuple(normalized)
        self._edge_index = edge_index
        if weights is not None:
            weights = tuple(weights)
            if len(weights) != len(normalized):
                raise GraphError("weight count does not match edge count")
            for w in weights:
                if not (1 <= w < MAX_WEIGHT):
                    raise GraphError(f"weight {w} outside [1, 2^31)")
        self.weights: tuple[int, ...] | None = weights
        adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
        for eid, (u, v) in enumerate(self.edges):
            adj[u].append((v, eid))
            adj[v].append((u, eid))
        for lst in adj:
            lst.sort()
        self._adj: tuple[tuple[tuple[int, int], ...], ...] = tuple(
            tuple(lst) for lst in adj
        )

    @property
    def m(self) -> int:
        return len(self.edges)

    def adjacency(self, v: int) -> tuple[tuple[int, int], ...]:
        """Pairs (neighbor, edge id) in ascending neighbor order."""
        return self._adj[v]

    def neighbors(self, v: int) -> tuple[int, ...]:
        return tuple(u for u, _ in self._adj[v])

    def endpoints(self, eid: int) -> tuple[int, int]:
        if not (0 <= eid < self.m):
            raise GraphError(f"unknown edge id {eid}")
        return self.edges[eid]

    def edge_id(self, u: int, v: int) -> int:
        if u > v:
            u, v = v, u
        try:
            return self._edge_index[(u, v)]
        except KeyError:
            raise GraphError(f"no edge ({u}, {v})") from None

    def has_edge(self, u: int, v: int) -> bool:
        if u > v:
            u, v = v, u
        return (u, v) in self._edge_index

    def weight(self, eid: int) -> int:
        if self.weights is None:
            raise GraphError("graph is unweighted")
        if not (0 <= eid < self.m):
            raise GraphError(f"unknown edge id {eid}")
        return self.weights[eid]

    def with_weights(self, weights: Sequence[int]) -> "Graph":
        return Graph(self.n, self.edges, weights)

    def require_distinct_weights(self) -> None:
        if self.weights is None:
            raise GraphError("operation requires edge weights")
        if len(set(self.weights)) != self.m:
            raise GraphError("operation requires pairwise distinct weights")


class RootedTree:
    """Rooted spanning tree of a host graph; parent edges are host edges."""

    __slots__ = (
        "graph",
        "root",
        "parent",
        "parent_edge",
        "depth",
        "D",
        "children",
        "order",
        "tree_edges",
    )

    def __init__(self, graph: Graph, root: int, parent: Sequence[int]):
        if not (0 <= root < graph.n):
            raise GraphError(f"invalid root {root}")
        if parent[root] != root:
            raise GraphError("root must be its own parent")
        self.graph = graph
        self.root = root
        self.parent = tuple(parent)
        parent_edge = [-1] * graph.n
        children: list[list[int]] = [[] for _ in range(graph.n)]
        for v, p in enumerate(self.parent):
            if v == root:
                continue
            parent_edge[v] = graph.edge_id(p, v)  # raises if not a host edge
            children[p].append(v)
        self.parent_edge = tuple(parent_edge)
        self.children = tuple(tuple(sorted(c)) for c in children)
        # depth by BFS over tree edges; also proves the parent map is acyclic
        depth = [-1] * graph.n
        depth[root] = 0
        order = [root]
        queue = deque([root])
        while queue:
            v = queue.popleft()
            for c in self.children[v]:
                depth[c] = depth[v] + 1
                order.append(c)
                queue.append(c)
        if len(order) != graph.n:
            missing = min(v for v in range(graph.n) if depth[v] < 0)
            raise GraphError(f"parent map does not span the graph (node {missing})")
        self.depth = tuple(depth)
        self.D = max(depth)
        # nodes in reverse BFS order = non-increasing depth, for bottom-up sweeps
        self.order = tuple(reversed(order))
        self.tree_edges = frozenset(
            self.parent_edge[v] for v in range(graph.n) if v != root
        )

    def is_tree_edge(self, eid: int) -> bool:
        return eid in self.tree_edges

    def deeper_endpoint(self, eid: int) -> int:
        """The endpoint of a tree edge further from the root."""
        u, v = self.graph.endpoints(eid)
        return v if self.depth[v] > self.depth[u] else u


def bfs_distances(g: Graph, source: int, allowed: frozenset[int] | None = None) -> list[int]:
    """Distances from source (-1 where unreachable); optionally restricted to a node set."""
    dist = [-1] * g.n
    dist[source] = 0
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for u, _ in g.adjacency(v):
            if dist[u] < 0 and (allowed is None or u in allowed):
                dist[u] = dist[v] + 1
                queue.append(u)
    return dist


def bfs_tree(g: Graph, root: int) -> RootedTree:
    """Breadth-first spanning tree; depth equals the eccentricity of the root."""
    if not (0 <= root < g.n):
        raise GraphError(f"invalid root {root}")
    parent = [-1] * g.n
    parent[root] = root
    queue = deque([root])
    while queue:
        v = queue.popleft()
        for u, _ in g.adjacency(v):
            if parent[u] < 0:
                parent[u] = v
                queue.append(u)
    unreached = [v for v in range(g.n) if parent[v] < 0]
    if unreached:
        raise GraphError(f"graph disconnected: node {unreached[0]} unreachable from {root}")
    return RootedTree(g, root, parent)


def diameter(g: Graph) -> int:
    """Exact diameter by all-sources BFS; error on disconnected input."""
    best = 0
    for s in range(g.n):
        dist = bfs_distances(g, s)
        far = max(dist)
        if min(dist) < 0:
            unreached = dist.index(-1)
            raise GraphError(f"graph disconnected: node {unreached} unreachable from {s}")
        best = max(best, far)
    return best


def induced_diameter(g: Graph, nodes: Iterable[int]) -> int | float:
    """Diameter of G[nodes]; INFINITE if the induced subgraph is disconnected."""
    allowed = frozenset(nodes)
    if not allowed:
        raise GraphError("node set is empty")
    for v in allowed:
        if not (0 <= v < g.n):
            raise GraphError(f"invalid node id {v}")
    best = 0
    for s in allowed:
        dist = bfs_distances(g, s, allowed)
        reached = [dist[v] for v in allowed if dist[v] >= 0]
        if len(reached) != len(allowed):
            return INFINITE
        best = max(best, max(reached))
    return best


class Partition:
    """Disjoint connected node sets P_0..P_{k-1}; nodes may be left unassigned.

    Disjointness and per-part connectivity are *not* enforced here so that
    validate_partition can report violations; construction only rejects
    empty parts and out-of-range ids.
    """

    __slots__ = ("n", "parts", "k", "part_of")

    def __init__(self, n: int, parts: Iterable[Iterable[int]]):
        self.n = n
        normalized = []
        for nodes in parts:
            tup = tuple(sorted(set(nodes)))
            if not tup:
                raise GraphError("empty part")
            if tup[0] < 0 or tup[-1] >= n:
                raise GraphError(f"part node out of range for n={n}: {tup}")
            normalized.append(tup)
        self.parts: tuple[tuple[int, ...], ...] = tuple(normalized)
        self.k = len(self.parts)
        part_of: list[int | None] = [None] * n
        for i, nodes in enumerate(self.parts):
            for v in nodes:
                if part_of[v] is None:
                    part_of[v] = i
        self.part_of: tuple[int | None, ...] = tuple(part_of)

    def subset(self, indices: Sequence[int]) -> "Partition":
        """Partition containing only the given parts (re-indexed in the given order)."""
        return Partition(self.n, [self.parts[i] for i in indices])


def validate_partition(g: Graph, p: Partition) -> Violation | None:
    """Check disjointness and per-part connectivity; first violation or None."""
    if p.n != g.n:
        return Violation("size-mismatch", f"partition built for n={p.n}, graph has n={g.n}")
    seen: dict[int, int] = {}
    for i, nodes in enumerate(p.parts):
        for v in nodes:
            if v in seen:
                return Violation(
                    "overlap", f"node {v} in part {seen[v]} and part {i}"
                )
            seen[v] = i
    for i, nodes in enumerate(p.parts):
        allowed = frozenset(nodes)
        dist = bfs_distances(g, nodes[0], allowed)
        if any(dist[v] < 0 for v in nodes):
            return Violation("disconnected-part", f"part {i} induces a disconnected subgraph")
    return None


# ---------------------------------------------------------------------------
# Text file formats.
#
# Graph:      "n m" or "n m weighted", then one line per edge: "u v [w]".
# Partition:  one part per line, node ids separated by blanks.
#
# Files written by save_* round-trip byte-identically through load_*.
# ---------------------------------------------------------------------------


def dumps_graph(g: Graph) -> str:
    lines = [f"{g.n} {g.m} weighted" if g.weights is not None else f"{g.n} {g.m}"]
    if g.weights is not None:
        lines += [f"{u} {v} {w}" for (u, v), w in zip(g.edges, g.weights)]
    else:
        lines += [f"{u} {v}" for u, v in g.edges]
    return "\n".join(lines) + "\n"


def loads_graph(text: str) -> Graph:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines:
        raise GraphError("empty graph file")
    head = lines[0].split()
    if len(head) not in (2, 3) or (len(head) == 3 and head[2] != "weighted"):
        raise GraphError(f"bad header line: {lines[0]!r}")
    n, m = int(head[0]), int(head[1])
    weighted = len(head) == 3
    if len(lines) - 1 != m:
        raise GraphError(f"expected {m} edge lines, found {len(lines) - 1}")
    edges, weights = [], []
    for ln in lines[1:]:
        fields = ln.split()
        if weighted:
            if len(fields) != 3:
                raise GraphError(f"expected 'u v w': {ln!r}")
            edges.append((int(fields[0]), int(fields[1])))
            weights.append(int(fields[2]))
        else:
            if len(fields) != 2:
                raise GraphError(f"expected 'u v': {ln!r}")
            edges.append((int(fields[0]), int(fields[1])))
    return Graph(n, edges, weights if weighted else None)


def save_graph(g: Graph, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_graph(g))


def load_graph(path) -> Graph:
    with open(path) as fh:
        return loads_graph(fh.read())


def dumps_partition(p: Partition) -> str:
    return "\n".join(" ".join(str(v) for v in part) for part in p.parts) + "\n"


def loads_partition(text: str, n: int) -> Partition:
    parts = [[int(tok) for tok in ln.split()] for ln in text.splitlines() if ln.strip()]
    return Partition(n, parts)


def save_partition(p: Partition, path) -> None:
    with open(path, "w") as fh:
        fh.write(dumps_partition(p))


def load_partition(path, n: int) -> Partition:
    with open(path) as fh:
        return loads_partition(fh.read(), n)
