"""Independent brute-force oracles used to freeze expected test values.

These deliberately avoid the package's own traversal and accounting code:
plain dict adjacency, plain BFS, exhaustive enumeration.  They are the
second route for every dual-route check.
"""

from collections import deque
from itertools import combinations


def adjacency(n, edges):
    adj = {v: [] for v in range(n)}
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    return adj


def bfs_dist(adj, source, allowed=None):
    dist = {source: 0}
    queue = deque([source])
    while queue:
        v = queue.popleft()
        for u in adj[v]:
            if u not in dist and (allowed is None or u in allowed):
                dist[u] = dist[v] + 1
                queue.append(u)
    return dist


def all_pairs_diameter(n, edges, reverse_order=False):
    adj = adjacency(n, edges)
    if reverse_order:
        adj = {v: list(reversed(nbrs)) for v, nbrs in adj.items()}
    best = 0
    for s in range(n):
        dist = bfs_dist(adj, s)
        assert len(dist) == n, "oracle expects a connected graph"
        best = max(best, max(dist.values()))
    return best


def eccentricity(n, edges, source):
    dist = bfs_dist(adjacency(n, edges), source)
    assert len(dist) == n
    return max(dist.values())


def induced_diameter(n, edges, subset):
    subset = set(subset)
    adj = adjacency(n, edges)
    best = 0
    for s in subset:
        dist = bfs_dist(adj, s, allowed=subset)
        if set(dist) != subset:
            return None  # disconnected
        best = max(best, max(dist.values()))
    return best


def parts_below_tree_edge(tree, partition, blocked, eid):
    """Parts intersecting the deeper endpoint's component of the forest
    (tree minus blocked edges), computed by direct downward traversal."""
    v = tree.deeper_endpoint(eid)
    found = set()
    stack = [v]
    while stack:
        x = stack.pop()
        if partition.part_of[x] is not None:
            found.add(partition.part_of[x])
        for ch in tree.children[x]:
            if tree.parent_edge[ch] not in blocked:
                stack.append(ch)
    return found


def min_spanning_weight_brute(n, edges, weights):
    """Minimum spanning tree by exhaustive enumeration (tiny graphs only)."""
    m = len(edges)
    best = None
    best_set = None
    for subset in combinations(range(m), n - 1):
        adj = adjacency(n, [edges[e] for e in subset])
        if len(bfs_dist(adj, 0)) != n:
            continue
        w = sum(weights[e] for e in subset)
        if best is None or w < best:
            best = w
            best_set = frozenset(subset)
    return best_set, best


def component_labels(n, edges_subset_endpoints):
    """Min-id component labels by plain union-find over the given endpoints."""
    parent = list(range(n))

    def find(v):
        while parent[v] != v:
            parent[v] = parent[parent[v]]
            v = parent[v]
        return v

    for u, v in edges_subset_endpoints:
        ru, rv = find(u), find(v)
        if ru != rv:
            parent[max(ru, rv)] = min(ru, rv)
    return {v: find(v) for v in range(n)}
