"""Synchronous bandwidth-limited message-passing simulator and aggregation.

The simulator runs lock-step rounds: messages sent during round r are
delivered at the start of round r+1, every non-halted node steps once per
round, and each directed edge carries at most one message of at most
`msg_bits` bits per round (violations raise, they are never silently
dropped).

The partwise-aggregation protocol splits work into an uncharged control
plane (per-part spanning trees of G[P_i]+H_i pruned to the part, start
delays drawn uniformly from the measured congestion range, contention
priorities) and a charged data plane (convergecast of partial aggregates up
each part tree followed by a broadcast of the result down).  Contention on a
shared edge is resolved by deterministic priority, smaller delay first, then
smaller part index; losers retry next round.  Only data-plane messages on
graph edges are counted in the trace.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from .audit import as_edge_map
from .graph import Graph, Partition


def default_msg_bits(n: int) -> int:
    return 4 * math.ceil(math.log2(n + 1))


def int_bits(x: int) -> int:
    """Bits to encode an integer: magnitude plus one sign bit (0 costs 1 bit)."""
    return max(1, abs(x).bit_length()) + 1


def payload_bits(payload) -> int:
    """Canonical size accounting: ints directly, tuples element-wise."""
    if isinstance(payload, int):
        return int_bits(payload)
    if isinstance(payload, tuple):
        return sum(payload_bits(x) for x in payload)
    raise SimError(f"unsupported payload type {type(payload).__name__}")


class SimError(Exception):
    """Simulator misuse or protocol failure."""


class OversizeMessageError(SimError):
    pass


class DuplicateSendError(SimError):
    pass


class AggregationError(SimError):
    pass


class SimTimeout(SimError):
    """max_rounds exhausted; `.trace` holds the partial trace."""

    def __init__(self, message: str, trace: "RoundTrace"):
        super().__init__(message)
        self.trace = trace


@dataclass(frozen=True)
class SimConfig:
    msg_bits: int | None = None  # default: 4 * ceil(log2(n+1))
    max_rounds: int = 1_000_000
    seed: int | str = 0  # str for derived streams, e.g. per MST phase
    log_messages: bool = False


@dataclass(frozen=True)
class MessageRecord:
    round: int  # the round in which the edge carries the message
    src: int
    dst: int
    bits: int
    tag: str


@dataclass
class RoundTrace:
    rounds_used: int
    messages_sent: int
    log: tuple[MessageRecord, ...] | None
    outputs: dict[int, object]
    meta: dict = field(default_factory=dict)

    def to_json_dict(self) -> dict:
        return {
            "rounds_used": self.rounds_used,
            "messages_sent": self.messages_sent,
            "meta": self.meta,
        }


@dataclass(frozen=True)
class AggregationTask:
    """Inputs of partwise aggregation: per-node values and an associative op."""

    values: Mapping[int, int]
    op: str  # "min", "max", or "sum"
    parts: Partition


class NodeContext:
    """Per-node handle the simulator passes to programs."""

    __slots__ = ("node", "neighbors", "rng", "_sim")

    def __init__(self, node: int, neighbors: tuple[int, ...], rng: random.Random, sim):
        self.node = node
        self.neighbors = neighbors
        self.rng = rng
        self._sim = sim

    @property
    def round(self) -> int:
        return self._sim.round_no

    def send(self, dst: int, payload, tag: str = "") -> None:
        self._sim.submit(self.node, dst, payload, tag)

    def halt(self) -> None:
        self._sim.halted[self.node] = True

    def set_output(self, value) -> None:
        self._sim.outputs[self.node] = value


class NodeProgram:
    """Pure state machine; override both hooks.  Nodes communicate only
    through simulator-delivered messages."""

    def on_init(self, ctx: NodeContext) -> None:
        pass

    def on_round(self, ctx: NodeContext, inbox: Mapping[int, object]) -> None:
        pass


class _SimCore:
    def __init__(self, g: Graph, cfg: SimConfig):
        self.g = g
        self.msg_bits = cfg.msg_bits if cfg.msg_bits is not None else default_msg_bits(g.n)
        if self.msg_bits < math.ceil(math.log2(g.n + 1)):
            raise SimError(
                f"msg_bits={self.msg_bits} cannot even carry a node id for n={g.n}"
            )
        self.cfg = cfg
        self.round_no = 0
        self.halted = [False] * g.n
        self.outputs: dict[int, object] = {}
        self.neighbor_sets = [frozenset(g.neighbors(v)) for v in range(g.n)]
        self.outbox: list[tuple[int, int, object, str]] = []
        self.sent_edges: set[tuple[int, int]] = set()
        self.messages_sent = 0
        self.log: list[MessageRecord] | None = [] if cfg.log_messages else None

    def submit(self, src: int, dst: int, payload, tag: str) -> None:
        if dst not in self.neighbor_sets[src]:
            raise SimError(f"node {src} tried to message non-neighbor {dst}")
        key = (src, dst)
        if key in self.sent_edges:
            raise DuplicateSendError(
                f"node {src} sent twice on edge ({src}, {dst}) in round {self.round_no + 1}"
            )
        bits = payload_bits(payload)
        if bits > self.msg_bits:
            raise OversizeMessageError(
                f"node {src} sent {bits} bits (> {self.msg_bits}) in round {self.round_no + 1}"
            )
        self.sent_edges.add(key)
        self.outbox.append((src, dst, payload, tag))
        self.messages_sent += 1
        if self.log is not None:
            self.log.append(MessageRecord(self.round_no + 1, src, dst, bits, tag))

    def trace(self) -> RoundTrace:
        return RoundTrace(
            rounds_used=self.round_no,
            messages_sent=self.messages_sent,
            log=tuple(self.log) if self.log is not None else None,
            outputs=dict(self.outputs),
            meta={
                "config": {
                    "msg_bits": self.msg_bits,
                    "max_rounds": self.cfg.max_rounds,
                    "seed": self.cfg.seed,
                }
            },
        )


def run(g: Graph, programs: Sequence[NodeProgram], cfg: SimConfig) -> RoundTrace:
    """Execute one program per node until all halt or max_rounds is exceeded.

    Messages sent during round r (round 0 being the init hook) occupy their
    edge in round r+1; a message addressed to a node that has already halted
    is counted and logged but silently dropped.
    """
    if len(programs) != g.n:
        raise SimError(f"need {g.n} programs, got {len(programs)}")
    core = _SimCore(g, cfg)
    contexts = [
        NodeContext(v, g.neighbors(v), random.Random(f"{cfg.seed}:{v}"), core)
        for v in range(g.n)
    ]
    for v in range(g.n):
        programs[v].on_init(contexts[v])
    while not all(core.halted):
        if core.round_no >= cfg.max_rounds:
            raise SimTimeout(
                f"exceeded max_rounds={cfg.max_rounds}", core.trace()
            )
        core.round_no += 1
        inboxes: dict[int, dict[int, object]] = {}
        for src, dst, payload, _tag in core.outbox:
            inboxes.setdefault(dst, {})[src] = payload
        core.outbox = []
        core.sent_edges = set()
        empty: dict[int, object] = {}
        for v in range(g.n):
            if not core.halted[v]:
                programs[v].on_round(contexts[v], inboxes.get(v, empty))
    return core.trace()


# ---------------------------------------------------------------------------
# Partwise aggregation on a shortcut.
# ---------------------------------------------------------------------------

_OPS = {"min": min, "max": max, "sum": lambda a, b: a + b}

_UP, _DOWN = 0, 1


class _Role:
    """One node's participation in one part tree."""

    __slots__ = (
        "part",
        "parent",
        "children",
        "in_part",
        "delay",
        "acc",
        "pending_children",
        "sent_up",
        "result",
        "queued",
    )

    def __init__(self, part, parent, children, in_part, delay, value):
        self.part = part
        self.parent = parent
        self.children = children
        self.in_part = in_part
        self.delay = delay
        self.acc = value  # None on pure relay nodes until children report
        self.pending_children = len(children)
        self.sent_up = False
        self.result = None
        self.queued = 0


class _AggregateProgram(NodeProgram):
    def __init__(self, op: str):
        self.op = _OPS[op]
        self.roles: dict[int, _Role] = {}
        self.pending: dict[int, list[tuple[tuple[int, int], int, int, int]]] = {}
        self.next_wake = 0

    def add_role(self, role: _Role) -> None:
        self.roles[role.part] = role

    def _combine(self, acc, value):
        return value if acc is None else self.op(acc, value)

    def _queue(self, role: _Role, dst: int, kind: int, value: int) -> None:
        self.pending.setdefault(dst, []).append(
            ((role.delay, role.part), role.part, kind, value)
        )
        role.queued += 1

    def _deliver_result(self, ctx: NodeContext, role: _Role, value: int) -> None:
        role.result = value
        if role.in_part:
            ctx.set_output(value)
        for ch in role.children:
            self._queue(role, ch, _DOWN, value)

    def _advance(self, ctx: NodeContext, rnd: int) -> None:
        self.next_wake = -1
        for role in self.roles.values():
            if role.sent_up or role.pending_children > 0:
                continue
            if rnd < role.delay:
                if self.next_wake < 0 or role.delay < self.next_wake:
                    self.next_wake = role.delay
                continue
            role.sent_up = True
            if role.parent is None:
                self._deliver_result(ctx, role, role.acc)
            else:
                self._queue(role, role.parent, _UP, role.acc)

    def _flush(self, ctx: NodeContext) -> None:
        for dst, queue in self.pending.items():
            if not queue:
                continue
            best = min(range(len(queue)), key=lambda j: queue[j][0])
            _, part, kind, value = queue.pop(best)
            self.roles[part].queued -= 1
            ctx.send(dst, (part, kind, value), tag="up" if kind == _UP else "down")

    def _maybe_halt(self, ctx: NodeContext) -> None:
        if any(q for q in self.pending.values()):
            return
        for role in self.roles.values():
            if role.result is None or role.queued:
                return
        ctx.halt()

    def on_init(self, ctx: NodeContext) -> None:
        self._advance(ctx, 0)
        self._flush(ctx)
        self._maybe_halt(ctx)

    def on_round(self, ctx: NodeContext, inbox: Mapping[int, object]) -> None:
        rnd = ctx.round
        if not inbox and not any(q for q in self.pending.values()):
            if self.next_wake < 0 or rnd < self.next_wake:
                return  # waiting on children or on a delay gate
        for src, payload in inbox.items():
            part, kind, value = payload
            role = self.roles[part]
            if kind == _UP:
                role.acc = self._combine(role.acc, value)
                role.pending_children -= 1
            else:
                self._deliver_result(ctx, role, value)
        self._advance(ctx, rnd)
        self._flush(ctx)
        self._maybe_halt(ctx)


def _part_tree(g: Graph, part: Sequence[int], edges: frozenset[int], index: int):
    """Rooted spanning tree of G[P_i]+H_i pruned to the part (control plane).

    Returns (parent, children, nodes) maps; raises if the merged subgraph is
    disconnected.
    """
    nodes = set(part)
    adj: dict[int, list[int]] = {}
    for eid in edges:
        u, v = g.endpoints(eid)
        nodes.add(u)
        nodes.add(v)
    for v in nodes:
        adj[v] = []
    for eid in edges:
        u, v = g.endpoints(eid)
        adj[u].append(v)
        adj[v].append(u)
    part_set = frozenset(part)
    for v in part:
        for u, eid in g.adjacency(v):
            if u in part_set and v < u and eid not in edges:
                adj[u].append(v)
                adj[v].append(u)
    for v in adj:
        adj[v] = sorted(set(adj[v]))
    root = min(part)
    parent: dict[int, int | None] = {root: None}
    order = [root]
    for v in order:
        for u in adj[v]:
            if u not in parent:
                parent[u] = v
                order.append(u)
    if len(order) != len(nodes):
        raise AggregationError(f"merged subgraph of part {index} is disconnected")
    children: dict[int, list[int]] = {v: [] for v in order}
    for v, pv in parent.items():
        if pv is not None:
            children[pv].append(v)
    # prune relay leaves that serve no part node
    degree = {v: len(children[v]) for v in order}
    live = set(order)
    stack = [v for v in order if degree[v] == 0 and v not in part_set]
    while stack:
        v = stack.pop()
        live.discard(v)
        pv = parent[v]
        if pv is not None:
            degree[pv] -= 1
            if degree[pv] == 0 and pv not in part_set:
                stack.append(pv)
    pruned_children = {
        v: tuple(c for c in children[v] if c in live) for v in live
    }
    return parent, pruned_children, live


def partwise_aggregate(
    g: Graph,
    parts: Partition,
    shortcut,
    task: AggregationTask,
    cfg: SimConfig,
) -> tuple[dict[int, int], RoundTrace]:
    """Every node of every part learns the exact aggregate of its part.

    Returns (results, trace) where results maps each node belonging to a part
    to the aggregate of that part's values.
    """
    if task.op not in _OPS:
        raise AggregationError(f"unsupported op {task.op!r}")
    if task.parts.parts != parts.parts:
        raise AggregationError("task partition does not match the supplied partition")
    msg_bits = cfg.msg_bits if cfg.msg_bits is not None else default_msg_bits(g.n)
    header = int_bits(max(parts.k - 1, 0)) + int_bits(1)
    for v in range(g.n):
        if parts.part_of[v] is None:
            continue
        if v not in task.values:
            raise AggregationError(f"node {v} belongs to a part but has no value")
        if int_bits(task.values[v]) > msg_bits - header:
            raise AggregationError(
                f"value of node {v} needs {int_bits(task.values[v])} bits; "
                f"only {msg_bits - header} available after the header"
            )
    edge_map = as_edge_map(shortcut)
    trees = []
    edge_use: dict[int, int] = {}
    for i in range(parts.k):
        parent, children, live = _part_tree(
            g, parts.parts[i], edge_map.get(i, frozenset()), i
        )
        trees.append((parent, children, live))
        for v in live:
            pv = parent[v]
            if pv is not None and pv in live:
                eid = g.edge_id(pv, v)
                edge_use[eid] = edge_use.get(eid, 0) + 1
    congestion = max(edge_use.values(), default=0)
    delay_range = max(congestion, 1)
    control_rng = random.Random(f"{cfg.seed}:delays")
    delays = [control_rng.randrange(delay_range) for _ in range(parts.k)]
    programs = [_AggregateProgram(task.op) for _ in range(g.n)]
    for i, (parent, children, live) in enumerate(trees):
        part_set = frozenset(parts.parts[i])
        for v in live:
            pv = parent[v]
            programs[v].add_role(
                _Role(
                    part=i,
                    parent=pv if (pv is not None and pv in live) else None,
                    children=children[v],
                    in_part=v in part_set,
                    delay=delays[i],
                    value=task.values[v] if v in part_set else None,
                )
            )
    trace = run(g, programs, cfg)
    trace.meta.update(
        charged="data plane only: aggregate payloads on graph edges",
        control_plane="part trees, delays, and priorities computed centrally",
        delay_range=delay_range,
        op=task.op,
        parts=parts.k,
    )
    results: dict[int, int] = {}
    for v in range(g.n):
        if parts.part_of[v] is not None:
            if v not in trace.outputs:
                raise AggregationError(f"node {v} finished without a result")
            results[v] = trace.outputs[v]
    return results, trace


def leader_and_count(
    g: Graph, parts: Partition, shortcut, cfg: SimConfig
) -> tuple[dict[int, tuple[int, int]], tuple[RoundTrace, RoundTrace]]:
    """Per part: (minimum node id, part size), via two aggregations."""
    ids = AggregationTask(values={v: v for v in range(g.n)}, op="min", parts=parts)
    ones = AggregationTask(values={v: 1 for v in range(g.n)}, op="sum", parts=parts)
    leaders, trace_min = partwise_aggregate(g, parts, shortcut, ids, cfg)
    sizes, trace_sum = partwise_aggregate(g, parts, shortcut, ones, cfg)
    out = {}
    for i in range(parts.k):
        member = parts.parts[i][0]
        out[i] = (leaders[member], sizes[member])
    return out, (trace_min, trace_sum)
