"""Certifying construction of tree-restricted low-congestion shortcuts.

Given a rooted depth-D spanning tree and connected node-disjoint parts, the
engine marks "overcongested" tree edges bottom-up against a threshold
c = 8*delta*D, reads off a bipartite congestion structure between marked
edges and parts, and then either

  * covers at least half of the parts with a partial shortcut whose edges are
    their ancestor tree edges in the forest obtained by cutting the marked
    edges (case I), or
  * samples a bipartite minor of the host graph whose exact rational density
    exceeds delta, certifying that no such shortcut family exists at this
    delta (case II).

A doubling search over delta turns partial shortcuts into a full shortcut for
every part; case II failures double delta and restart.  All randomness comes
from an explicit `random.Random`, so identical inputs and seeds reproduce
identical outputs, including certificates.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping

from .audit import validate_minor
from .graph import Graph, GraphError, Partition, RootedTree

# Case-II retry budget per construction call, scaled by tree depth.  One
# attempt succeeds with probability Omega(1/D) when the dichotomy holds, so
# 64 * D attempts make an undetected dense minor overwhelmingly unlikely;
# running out is non-fatal (the doubling search proceeds uncertified).
MINOR_ATTEMPTS_PER_DEPTH = 64


class EngineError(Exception):
    """Shortcut construction failed in a way the caller must handle."""


class MaxDeltaExceeded(EngineError):
    """Doubling search passed the configured cap; carries all certificates found."""

    def __init__(self, max_delta: int, certificates: tuple["MinorCertificate", ...]):
        super().__init__(f"no shortcut found for any delta <= {max_delta}")
        self.max_delta = max_delta
        self.certificates = certificates


@dataclass(frozen=True)
class CongestionMarking:
    """Overcongested tree edges and the parts that pushed them over threshold.

    `parts_below` and `reps` are recorded only for marked edges; part sets
    below unmarked edges are recomputable (and strictly below threshold).
    `reps[(e, i)]` is the minimum-id node of part i that is a descendant of
    the deeper endpoint of e and reachable from it without crossing a marked
    edge.
    """

    threshold: int
    overcongested: frozenset[int]
    parts_below: Mapping[int, frozenset[int]]
    reps: Mapping[tuple[int, int], int]


@dataclass(frozen=True)
class BipartiteCongestionGraph:
    """Marked edges vs. parts; a link (e, i) means part i lies below edge e."""

    edge_nodes: tuple[int, ...]
    part_nodes: tuple[int, ...]
    links: frozenset[tuple[int, int]]
    edge_degree: Mapping[int, int]
    part_degree: Mapping[int, int]


@dataclass(frozen=True)
class PartialShortcut:
    covered: frozenset[int]
    edge_sets: Mapping[int, frozenset[int]]


@dataclass(frozen=True)
class MinorNode:
    kind: str  # "part" or "edge"
    ref: int  # part index or tree edge id
    vertices: tuple[int, ...]


@dataclass(frozen=True)
class MinorEdge:
    a: int
    b: int
    witness: int  # edge id of the host graph realizing this minor edge


@dataclass(frozen=True)
class MinorCertificate:
    nodes: tuple[MinorNode, ...]
    edges: tuple[MinorEdge, ...]
    density: Fraction


@dataclass(frozen=True)
class Shortcut:
    """Edge sets for every part, plus the (delta, iteration) that assigned each."""

    edge_sets: tuple[frozenset[int], ...]
    tree_restricted: bool
    provenance: tuple[tuple[int, int], ...]


@dataclass(frozen=True)
class ConstructOutcome:
    case: str  # "I" or "II"
    partial: PartialShortcut | None = None
    certificate: MinorCertificate | None = None


@dataclass(frozen=True)
class EngineConfig:
    max_delta: int | None = None  # default: host node count


@dataclass(frozen=True)
class ConstructStats:
    delta_final: int
    iterations_by_delta: tuple[tuple[int, int], ...]
    uncertified_failures: int
    certificate_deltas: tuple[int, ...]  # aligned with the certificates tuple


@dataclass(frozen=True)
class FullShortcutResult:
    shortcut: Shortcut
    delta_final: int
    certificates: tuple[MinorCertificate, ...]
    stats: ConstructStats


def mark_overcongested(t: RootedTree, p: Partition, c: int) -> CongestionMarking:
    """Bottom-up marking of tree edges whose live subtree meets >= c parts.

    Edges are processed children-before-parents.  Each node accumulates the
    parts intersecting its subtree, where subtrees hanging below an
    already-marked edge no longer propagate upward; the edge above a node is
    marked exactly when the accumulated part count reaches c.
    """
    if c < 1:
        raise ValueError(f"threshold must be >= 1, got {c}")
    if t.graph.n != p.n:
        raise GraphError("tree and partition disagree on node count")
    overcongested: set[int] = set()
    parts_below: dict[int, frozenset[int]] = {}
    reps: dict[tuple[int, int], int] = {}
    below: list[dict[int, int] | None] = [None] * t.graph.n
    for v in t.order:  # non-increasing depth
        acc: dict[int, int] = {}
        own = p.part_of[v]
        if own is not None:
            acc[own] = v
        for ch in t.children[v]:
            if t.parent_edge[ch] in overcongested:
                continue
            chmap = below[ch]
            if len(chmap) > len(acc):
                acc, chmap = chmap, acc
            for part, node in chmap.items():
                cur = acc.get(part)
                if cur is None or node < cur:
                    acc[part] = node
            below[ch] = None
        below[v] = acc
        if v != t.root and len(acc) >= c:
            eid = t.parent_edge[v]
            overcongested.add(eid)
            parts_below[eid] = frozenset(acc)
            for part, node in acc.items():
                reps[(eid, part)] = node
    return CongestionMarking(
        threshold=c,
        overcongested=frozenset(overcongested),
        parts_below=parts_below,
        reps=reps,
    )


def build_bipartite(marking: CongestionMarking, k: int) -> BipartiteCongestionGraph:
    links = set()
    part_degree = {i: 0 for i in range(k)}
    edge_degree = {}
    for eid, parts in marking.parts_below.items():
        edge_degree[eid] = len(parts)
        for i in parts:
            links.add((eid, i))
            part_degree[i] += 1
    return BipartiteCongestionGraph(
        edge_nodes=tuple(sorted(marking.overcongested)),
        part_nodes=tuple(range(k)),
        links=frozenset(links),
        edge_degree=edge_degree,
        part_degree=part_degree,
    )


def _part_degrees(marking: CongestionMarking, k: int) -> list[int]:
    deg = [0] * k
    for parts in marking.parts_below.values():
        for i in parts:
            deg[i] += 1
    return deg


def case_one_partial(
    marking: CongestionMarking, t: RootedTree, p: Partition, delta: int
) -> PartialShortcut | None:
    """Cover every part with at most 8*delta marked edges above it, if that is
    at least half of the parts.

    A covered part receives all of its ancestor edges in the forest obtained
    by deleting the marked edges; those edges all have fewer than threshold
    parts below them, which is what bounds the congestion.
    """
    k = p.k
    deg = _part_degrees(marking, k)
    eligible = [i for i in range(k) if deg[i] <= 8 * delta]
    if len(eligible) < -(-k // 2):  # ceil(k/2)
        return None
    keep = frozenset(eligible)
    edge_sets: dict[int, set[int]] = {i: set() for i in eligible}
    blocked = marking.overcongested
    # accumulate, per live subtree, the eligible parts it intersects
    below: list[set[int] | None] = [None] * t.graph.n
    for v in t.order:
        acc: set[int] = set()
        own = p.part_of[v]
        if own is not None and own in keep:
            acc.add(own)
        for ch in t.children[v]:
            eid = t.parent_edge[ch]
            if eid in blocked:
                below[ch] = None
                continue
            chset = below[ch]
            if len(chset) > len(acc):
                acc, chset = chset, acc
            acc |= chset
            below[ch] = None
        below[v] = acc
        if v != t.root:
            eid = t.parent_edge[v]
            if eid not in blocked:
                for i in acc:
                    edge_sets[i].add(eid)
    return PartialShortcut(
        covered=keep,
        edge_sets={i: frozenset(edge_sets[i]) for i in eligible},
    )


def sample_dense_minor(
    g: Graph,
    t: RootedTree,
    p: Partition,
    marking: CongestionMarking,
    delta: int,
    rng: random.Random,
) -> MinorCertificate | None:
    """Randomized search for a bipartite minor of density strictly above delta.

    Each attempt samples parts independently with probability 1/(4D); the
    minor's nodes are the sampled parts plus the marked edges whose deeper
    endpoint survives the sampling, each mapped to its live tree component.
    A link (e, i) survives when the tree path from the deeper endpoint of e
    down to the recorded representative of part i (endpoint included,
    representative excluded) avoids every sampled part.  Returns the first
    certificate whose exact density exceeds delta, or None after the retry
    budget is exhausted.
    """
    depth_scale = max(t.D, 1)
    prob = 1.0 / (4 * depth_scale)
    o_edges = sorted(marking.overcongested)
    k = p.k
    for _ in range(MINOR_ATTEMPTS_PER_DEPTH * depth_scale):
        sampled = [i for i in range(k) if rng.random() < prob]
        if not sampled and not o_edges:
            continue
        in_sampled = bytearray(g.n)
        for i in sampled:
            for v in p.parts[i]:
                in_sampled[v] = 1
        edge_nodes = [e for e in o_edges if not in_sampled[t.deeper_endpoint(e)]]
        node_count = len(sampled) + len(edge_nodes)
        if node_count == 0:
            continue
        links: list[tuple[int, int, int]] = []  # (edge id, part, witness)
        for e in edge_nodes:
            ve = t.deeper_endpoint(e)
            candidates = marking.parts_below[e]
            for i in sampled:
                if i not in candidates:
                    continue
                rep = marking.reps[(e, i)]
                if rep == ve:
                    continue  # deeper endpoint inside the part; cannot happen here
                cur = t.parent[rep]
                ok = True
                while True:
                    if in_sampled[cur]:
                        ok = False
                        break
                    if cur == ve:
                        break
                    cur = t.parent[cur]
                if ok:
                    links.append((e, i, t.parent_edge[rep]))
        density = Fraction(len(links), node_count)
        if density <= delta:
            continue
        # success: materialize the vertex sets and emit a checked certificate
        part_index = {i: pos for pos, i in enumerate(sampled)}
        edge_index = {e: len(sampled) + pos for pos, e in enumerate(edge_nodes)}
        nodes = [MinorNode("part", i, p.parts[i]) for i in sampled]
        for e in edge_nodes:
            comp = _live_component(g, t, marking.overcongested, in_sampled, e)
            nodes.append(MinorNode("edge", e, comp))
        edges = tuple(
            MinorEdge(edge_index[e], part_index[i], witness) for e, i, witness in links
        )
        cert = MinorCertificate(nodes=tuple(nodes), edges=edges, density=density)
        violation = validate_minor(g, cert)
        if violation is not None:
            raise EngineError(f"sampled certificate failed validation: {violation}")
        return cert
    return None


def _live_component(
    g: Graph, t: RootedTree, blocked: frozenset[int], removed: bytearray, eid: int
) -> tuple[int, ...]:
    """Vertices reachable downward from the deeper endpoint of `eid` through
    unmarked tree edges and non-removed nodes."""
    start = t.deeper_endpoint(eid)
    comp = [start]
    stack = [start]
    while stack:
        v = stack.pop()
        for ch in t.children[v]:
            if t.parent_edge[ch] in blocked or removed[ch]:
                continue
            comp.append(ch)
            stack.append(ch)
    return tuple(sorted(comp))


def construct_partial(
    g: Graph, t: RootedTree, p: Partition, delta: int, rng: random.Random
) -> ConstructOutcome:
    """One shot of the dichotomy at a fixed delta: partial shortcut or minor."""
    if delta < 1:
        raise ValueError(f"delta must be >= 1, got {delta}")
    c = 8 * delta * max(t.D, 1)
    marking = mark_overcongested(t, p, c)
    partial = case_one_partial(marking, t, p, delta)
    if partial is not None:
        return ConstructOutcome(case="I", partial=partial)
    cert = sample_dense_minor(g, t, p, marking, delta, rng)
    return ConstructOutcome(case="II", certificate=cert)


def construct_full(
    g: Graph,
    t: RootedTree,
    p: Partition,
    config: EngineConfig | None = None,
    rng: random.Random | None = None,
) -> FullShortcutResult:
    """Doubling search over delta, iterating partial shortcuts to cover all parts.

    Within one delta, each iteration runs the dichotomy on the still-uncovered
    parts and freezes the edge sets of the newly covered ones; a case-II event
    abandons the delta entirely (frozen assignments are discarded), records
    the certificate if one was found, and doubles.  Case I cannot fail once
    delta reaches the true minor density, so the search terminates with
    delta_final below twice that value.
    """
    if config is None:
        config = EngineConfig()
    if rng is None:
        rng = random.Random(0)
    max_delta = config.max_delta if config.max_delta is not None else g.n
    certificates: list[MinorCertificate] = []
    certificate_deltas: list[int] = []
    iterations_log: list[tuple[int, int]] = []
    uncertified = 0
    delta = 1
    while delta <= max_delta:
        edge_sets: list[frozenset[int] | None] = [None] * p.k
        provenance: list[tuple[int, int] | None] = [None] * p.k
        remaining = list(range(p.k))
        iteration = 0
        failed = False
        while remaining:
            iteration += 1
            outcome = construct_partial(g, t, p.subset(remaining), delta, rng)
            if outcome.case == "II":
                if outcome.certificate is not None:
                    certificates.append(outcome.certificate)
                    certificate_deltas.append(delta)
                else:
                    uncertified += 1
                failed = True
                break
            partial = outcome.partial
            for sub_i, edges in partial.edge_sets.items():
                orig = remaining[sub_i]
                edge_sets[orig] = edges
                provenance[orig] = (delta, iteration)
            remaining = [
                remaining[j] for j in range(len(remaining)) if j not in partial.covered
            ]
        iterations_log.append((delta, iteration))
        if not failed:
            shortcut = Shortcut(
                edge_sets=tuple(es if es is not None else frozenset() for es in edge_sets),
                tree_restricted=True,
                provenance=tuple(pr if pr is not None else (delta, 0) for pr in provenance),
            )
            stats = ConstructStats(
                delta_final=delta,
                iterations_by_delta=tuple(iterations_log),
                uncertified_failures=uncertified,
                certificate_deltas=tuple(certificate_deltas),
            )
            return FullShortcutResult(
                shortcut=shortcut,
                delta_final=delta,
                certificates=tuple(certificates),
                stats=stats,
            )
        delta *= 2
    raise MaxDeltaExceeded(max_delta, tuple(certificates))


# ---------------------------------------------------------------------------
# Serialization: shortcut files ("i : e1 e2 ...") and certificate JSON dicts.
# ---------------------------------------------------------------------------


def dumps_shortcut(shortcut: Shortcut) -> str:
    lines = []
    for i, edges in enumerate(shortcut.edge_sets):
        ids = " ".join(str(e) for e in sorted(edges))
        lines.append(f"{i} : {ids}".rstrip())
    return "\n".join(lines) + "\n"


def loads_shortcut(text: str) -> Shortcut:
    rows: dict[int, frozenset[int]] = {}
    for ln in text.splitlines():
        if not ln.strip():
            continue
        head, _, rest = ln.partition(":")
        rows[int(head.strip())] = frozenset(int(tok) for tok in rest.split())
    if sorted(rows) != list(range(len(rows))):
        raise GraphError("shortcut file part indices are not dense")
    k = len(rows)
    return Shortcut(
        edge_sets=tuple(rows[i] for i in range(k)),
        tree_restricted=True,
        provenance=tuple((0, 0) for _ in range(k)),
    )


def certificate_to_json_dict(cert: MinorCertificate) -> dict:
    return {
        "density": f"{cert.density.numerator}/{cert.density.denominator}",
        "nodes": [
            {"kind": n.kind, "ref": n.ref, "vertices": list(n.vertices)}
            for n in cert.nodes
        ],
        "edges": [{"a": e.a, "b": e.b, "witness": e.witness} for e in cert.edges],
    }


def certificate_from_json_dict(data: dict) -> MinorCertificate:
    num, _, den = data["density"].partition("/")
    return MinorCertificate(
        nodes=tuple(
            MinorNode(n["kind"], n["ref"], tuple(n["vertices"])) for n in data["nodes"]
        ),
        edges=tuple(MinorEdge(e["a"], e["b"], e["witness"]) for e in data["edges"]),
        density=Fraction(int(num), int(den or "1")),
    )
