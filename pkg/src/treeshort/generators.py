"""Deterministic instance families with known diameter and minor-density bounds.

The lower-bound family realizes the topology that forces quality
(delta' - 3) * D' / 6 for its row parts: a short path on top, a square grid
of row paths below, and delta evenly spaced columns whose every D-th node
attaches to a top-path node.  Grids and k-trees provide planar and
bounded-treewidth families whose minor density is analytically capped, which
pins down how far the engine's doubling search may go.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

import networkx as nx

from .graph import Graph, GraphError, Partition


@dataclass(frozen=True)
class LowerBoundInstance:
    graph: Graph
    parts: Partition  # the row paths; top-path nodes belong to no part
    delta_prime: int
    D_prime: int
    delta: int  # delta' - 2
    k: int  # floor(D' / (2 delta))
    D: int  # k * delta
    top_path_nodes: int  # (delta-1)*k + 1
    grid_side: int  # (delta-1)*D + 1
    quality_floor: Fraction  # (delta'-3) * D' / 6

    def p_node(self, i: int) -> int:
        """Dense id of top-path node p_i, i in 1..top_path_nodes."""
        return i - 1

    def v_node(self, i: int, j: int) -> int:
        """Dense id of grid node v_{i,j}, i,j in 1..grid_side (row i, column j)."""
        return self.top_path_nodes + (i - 1) * self.grid_side + (j - 1)


def gen_lower_bound(delta_prime: int, D_prime: int) -> LowerBoundInstance:
    """Topology whose best shortcut quality is at least (delta'-3) * D' / 6.

    Requires 5 <= delta' <= D'/2.  Node count is
    ((delta-1)k + 1) + ((delta-1)D + 1)^2 for delta = delta'-2,
    k = floor(D'/(2 delta)), D = k*delta; the diameter is at most 1.5D+1 <= D'
    and every minor has density below delta'.
    """
    if delta_prime < 5 or 2 * delta_prime > D_prime:
        raise GraphError(
            f"need 5 <= delta' <= D'/2, got delta'={delta_prime}, D'={D_prime}"
        )
    delta = delta_prime - 2
    k = D_prime // (2 * delta)
    D = k * delta
    top = (delta - 1) * k + 1
    side = (delta - 1) * D + 1

    def p_node(i: int) -> int:
        return i - 1

    def v_node(i: int, j: int) -> int:
        return top + (i - 1) * side + (j - 1)

    edges: list[tuple[int, int]] = []
    # top path p_1 - p_2 - ... - p_top
    for i in range(1, top):
        edges.append((p_node(i), p_node(i + 1)))
    # row paths v_{i,1} - ... - v_{i,side}
    for i in range(1, side + 1):
        for j in range(1, side):
            edges.append((v_node(i, j), v_node(i, j + 1)))
    # every D-th column is a full path
    for j in range(1, delta + 1):
        col = (j - 1) * D + 1
        for i in range(1, side):
            edges.append((v_node(i, col), v_node(i + 1, col)))
    # every D-th node of such a column attaches to one top-path node
    for j in range(1, delta + 1):
        col = (j - 1) * D + 1
        anchor = p_node((j - 1) * k + 1)
        for jp in range(1, delta + 1):
            row = (jp - 1) * D + 1
            edges.append((v_node(row, col), anchor))
    g = Graph(top + side * side, edges)
    parts = Partition(
        g.n, [[v_node(i, j) for j in range(1, side + 1)] for i in range(1, side + 1)]
    )
    return LowerBoundInstance(
        graph=g,
        parts=parts,
        delta_prime=delta_prime,
        D_prime=D_prime,
        delta=delta,
        k=k,
        D=D,
        top_path_nodes=top,
        grid_side=side,
        quality_floor=Fraction((delta_prime - 3) * D_prime, 6),
    )


def lower_bound_attachment_edges(inst: LowerBoundInstance) -> list[int]:
    """Edge ids of the delta*(delta-1) attachments to rows other than row 1.

    Deleting them leaves a planar graph, which is what caps the minor density
    of the family via Euler's formula.
    """
    ids = []
    for j in range(1, inst.delta + 1):
        col = (j - 1) * inst.D + 1
        anchor = inst.p_node((j - 1) * inst.k + 1)
        for jp in range(2, inst.delta + 1):  # row 1 attachments stay
            row = (jp - 1) * inst.D + 1
            ids.append(inst.graph.edge_id(inst.v_node(row, col), anchor))
    return ids


def gen_grid(w: int, h: int) -> Graph:
    """w x h grid, node (r, c) -> r*w + c; planar, so every minor density < 3."""
    if w < 1 or h < 1:
        raise GraphError("grid dimensions must be positive")
    edges = []
    for r in range(h):
        for c in range(w):
            v = r * w + c
            if c + 1 < w:
                edges.append((v, v + 1))
            if r + 1 < h:
                edges.append((v, v + w))
    return Graph(w * h, edges)


def gen_wheel(n: int) -> Graph:
    """Wheel: hub 0, rim cycle 1..n-1, spokes from hub to every rim node."""
    if n < 4:
        raise GraphError(f"wheel needs at least 4 nodes, got {n}")
    edges = [(0, v) for v in range(1, n)]
    edges += [(v, v + 1) for v in range(1, n - 1)]
    edges.append((1, n - 1))
    return Graph(n, edges)


def gen_ktree(n: int, k: int, seed: int) -> Graph:
    """Random k-tree: K_{k+1} plus vertices joined to random existing k-cliques.

    Treewidth is exactly k, so every minor has density at most k.
    """
    if k < 1:
        raise GraphError("k must be positive")
    if n < k + 1:
        raise GraphError(f"k-tree needs at least k+1={k + 1} nodes")
    rng = random.Random(seed)
    edges = [(u, v) for u in range(k + 1) for v in range(u + 1, k + 1)]
    cliques: list[tuple[int, ...]] = [
        tuple(u for u in range(k + 1) if u != skip) for skip in range(k + 1)
    ]
    for v in range(k + 1, n):
        base = cliques[rng.randrange(len(cliques))]
        for u in base:
            edges.append((u, v))
        for skip in base:
            cliques.append(tuple(u for u in base if u != skip) + (v,))
    return Graph(n, edges)


def gen_parts_random(g: Graph, count: int, seed: int) -> Partition:
    """Partition grown by multi-source BFS from `count` random distinct roots.

    Every part is connected; on a connected graph the growth saturates and no
    node is left unassigned.
    """
    if not (1 <= count <= g.n):
        raise GraphError(f"part count must be in [1, {g.n}], got {count}")
    rng = random.Random(seed)
    roots = rng.sample(range(g.n), count)
    part_of = [-1] * g.n
    queue = []
    for i, r in enumerate(roots):
        part_of[r] = i
        queue.append(r)
    head = 0
    while head < len(queue):
        v = queue[head]
        head += 1
        for u, _ in g.adjacency(v):
            if part_of[u] < 0:
                part_of[u] = part_of[v]
                queue.append(u)
    parts: list[list[int]] = [[] for _ in range(count)]
    for v, i in enumerate(part_of):
        if i >= 0:
            parts[i].append(v)
    return Partition(g.n, parts)


def assign_weights(g: Graph, seed: int) -> Graph:
    """Copy of g with pairwise distinct pseudo-random weights in [1, 2^31)."""
    rng = random.Random(seed)
    return g.with_weights(rng.sample(range(1, 2**31), g.m))


def is_planar(g: Graph) -> bool:
    """Planarity check backing the Euler-formula density arguments in tests."""
    gx = nx.Graph()
    gx.add_nodes_from(range(g.n))
    gx.add_edges_from(g.edges)
    planar, _ = nx.check_planarity(gx)
    return planar
