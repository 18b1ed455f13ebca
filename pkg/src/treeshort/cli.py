"""Command-line front door: generate, construct, audit, simulate, benchmark.

Exit codes: 0 success, 1 usage, 2 validation (unreadable/inconsistent
inputs), 3 runtime (construction, simulation, or oracle failure).  Every
command is reproducible: outputs are fully determined by arguments and
seeds, and no output embeds wall-clock data.
"""

from __future__ import annotations

import argparse
import json
import random
import sys
from fractions import Fraction
from pathlib import Path

from . import apps, audit, engine, generators, sim
from .graph import (
    Graph,
    GraphError,
    Partition,
    bfs_tree,
    diameter,
    load_graph,
    load_partition,
    save_graph,
    save_partition,
    validate_partition,
)

USAGE_EXIT, VALIDATION_EXIT, RUNTIME_EXIT = 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse defaults to exit code 2; we reserve that
        raise UsageError(message)


def _write_json(path: Path, obj) -> None:
    path.write_text(json.dumps(obj, indent=2, sort_keys=True) + "\n")


def _load_instance(graph_path: str, parts_path: str) -> tuple[Graph, Partition]:
    g = load_graph(graph_path)
    p = load_partition(parts_path, g.n)
    violation = validate_partition(g, p)
    if violation is not None:
        raise GraphError(f"invalid partition: {violation}")
    return g, p


# ---------------------------------------------------------------------------
# gen
# ---------------------------------------------------------------------------


def _cmd_gen(args) -> int:
    family = args.family
    params = args.params
    needs_seed = family == "ktree" or args.parts is not None or args.weights
    if needs_seed and args.seed is None:
        raise UsageError("--seed is required when the command draws randomness")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    meta: dict = {"family": family, "params": params, "seed": args.seed}
    parts = None
    if family == "lowerbound":
        if len(params) != 2:
            raise UsageError("gen lowerbound needs: DELTA_PRIME D_PRIME")
        if args.parts is not None:
            raise UsageError("lowerbound instances carry their own row parts")
        inst = generators.gen_lower_bound(params[0], params[1])
        g, parts = inst.graph, inst.parts
        meta.update(
            delta_prime=inst.delta_prime,
            D_prime=inst.D_prime,
            delta=inst.delta,
            k=inst.k,
            D=inst.D,
            top_path_nodes=inst.top_path_nodes,
            grid_side=inst.grid_side,
            quality_floor=f"{inst.quality_floor.numerator}/{inst.quality_floor.denominator}",
        )
    elif family == "grid":
        if len(params) != 2:
            raise UsageError("gen grid needs: WIDTH HEIGHT")
        g = generators.gen_grid(params[0], params[1])
    elif family == "wheel":
        if len(params) != 1:
            raise UsageError("gen wheel needs: N")
        g = generators.gen_wheel(params[0])
    elif family == "ktree":
        if len(params) != 2:
            raise UsageError("gen ktree needs: N K")
        g = generators.gen_ktree(params[0], params[1], args.seed)
    else:
        raise UsageError(f"unknown family {family!r}")
    if args.parts is not None:
        parts = generators.gen_parts_random(g, args.parts, args.seed)
    if args.weights:
        g = generators.assign_weights(g, args.seed)
    meta["n"] = g.n
    meta["m"] = g.m
    meta["diameter"] = diameter(g)
    if parts is not None:
        meta["k"] = parts.k
    save_graph(g, out / "graph.txt")
    if parts is not None:
        save_partition(parts, out / "parts.txt")
    _write_json(out / "meta.json", meta)
    print(f"wrote {family} instance: n={g.n} m={g.m} -> {out}")
    return 0


# ---------------------------------------------------------------------------
# shortcut / audit
# ---------------------------------------------------------------------------


def _audit_json(report: audit.QualityReport, delta_final, k: int, D: int) -> dict:
    data = report.to_json_dict()
    data.update(delta_final=delta_final, k=k, D=D)
    return data


def _cmd_shortcut(args) -> int:
    g, p = _load_instance(args.graph, args.parts)
    tree = bfs_tree(g, 0)
    result = engine.construct_full(
        g,
        tree,
        p,
        engine.EngineConfig(max_delta=args.max_delta),
        random.Random(args.seed),
    )
    report = audit.audit_shortcut(g, tree, p, result.shortcut)
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        (out / "shortcut.txt").write_text(engine.dumps_shortcut(result.shortcut))
        _write_json(
            out / "certificates.json",
            [engine.certificate_to_json_dict(c) for c in result.certificates],
        )
        _write_json(out / "audit.json", _audit_json(report, result.delta_final, p.k, tree.D))
    print(
        f"delta_final={result.delta_final} congestion={report.congestion} "
        f"dilation={report.dilation} blocks={report.blocks} quality={report.quality}"
    )
    return 0


def _cmd_audit(args) -> int:
    g, p = _load_instance(args.graph, args.parts)
    tree = bfs_tree(g, 0)
    shortcut = engine.loads_shortcut(Path(args.shortcut).read_text())
    if len(shortcut.edge_sets) != p.k:
        raise GraphError(
            f"shortcut covers {len(shortcut.edge_sets)} parts, partition has {p.k}"
        )
    if not audit.check_tree_restricted(shortcut, tree):
        raise GraphError("shortcut uses non-tree edges relative to the BFS tree at root 0")
    report = audit.audit_shortcut(g, tree, p, shortcut)
    if args.format == "csv":
        text = (
            "# schema=1\n"
            "instance,k,D,delta_final,congestion,dilation,blocks,quality\n"
            f"{args.graph},{p.k},{tree.D},,"
            f"{report.congestion},{report.dilation},{report.blocks},{report.quality}\n"
        )
    else:
        text = json.dumps(_audit_json(report, None, p.k, tree.D), indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0


# ---------------------------------------------------------------------------
# aggregate / mst
# ---------------------------------------------------------------------------


def _cmd_aggregate(args) -> int:
    g, p = _load_instance(args.graph, args.parts)
    tree = bfs_tree(g, 0)
    if args.shortcut:
        shortcut = engine.loads_shortcut(Path(args.shortcut).read_text())
    else:
        shortcut = engine.construct_full(
            g, tree, p, engine.EngineConfig(max_delta=args.max_delta),
            random.Random(args.seed),
        ).shortcut
    cfg = sim.SimConfig(
        max_rounds=args.max_rounds,
        seed=args.seed,
        log_messages=args.trace_csv is not None,
    )
    # node ids serve as the input values; "sum" then totals ids per part
    task = sim.AggregationTask(
        values={v: v for v in range(g.n)}, op=args.op, parts=p
    )
    results, trace = sim.partwise_aggregate(g, p, shortcut, task, cfg)
    per_part = {str(i): results[p.parts[i][0]] for i in range(p.k)}
    payload = {
        "op": args.op,
        "per_part": per_part,
        "trace": trace.to_json_dict(),
    }
    if args.out:
        _write_json(Path(args.out), payload)
    else:
        sys.stdout.write(json.dumps(payload, indent=2, sort_keys=True) + "\n")
    if args.trace_csv:
        lines = ["round,src,dst,bits,tag"]
        lines += [
            f"{r.round},{r.src},{r.dst},{r.bits},{r.tag}" for r in trace.log
        ]
        Path(args.trace_csv).write_text("\n".join(lines) + "\n")
    return 0


def _cmd_mst(args) -> int:
    g = load_graph(args.graph)
    cfg = sim.SimConfig(max_rounds=args.max_rounds, seed=args.seed)
    result = apps.boruvka_mst(g, cfg, max_delta=args.max_delta)
    oracle_edges, oracle_weight = apps.kruskal_oracle(g)
    if result.tree_edges != oracle_edges:
        raise engine.EngineError(
            "boruvka result disagrees with the kruskal oracle; refusing to write"
        )
    if args.out:
        _write_json(Path(args.out), result.to_json_dict())
    print(f"mst weight={result.total_weight} phases={result.phases} rounds={result.rounds_total}")
    print("phase fragments quality rounds delta_final")
    for idx, ph in enumerate(result.per_phase, start=1):
        print(f"{idx:5d} {ph.fragments:9d} {ph.quality:7} {ph.rounds:6d} {ph.delta_final:11d}")
    return 0


# ---------------------------------------------------------------------------
# bench
# ---------------------------------------------------------------------------

_BENCH_HEADER = (
    "name,family,n,k,D,delta_final,congestion,dilation,blocks,quality,"
    "quality_floor,agg_rounds,agg_messages,status"
)


def _bench_instance(run: dict):
    family = run["family"]
    params = run["params"]
    seed = run["seed"]
    if family == "lowerbound":
        inst = generators.gen_lower_bound(*params)
        return inst.graph, inst.parts, inst.quality_floor
    if family == "grid":
        g = generators.gen_grid(*params)
    elif family == "wheel":
        g = generators.gen_wheel(*params)
    elif family == "ktree":
        g = generators.gen_ktree(params[0], params[1], seed)
    else:
        raise GraphError(f"unknown family {family!r}")
    parts = generators.gen_parts_random(g, run["parts"], seed)
    return g, parts, None


def _bench_row(run: dict, max_delta) -> tuple[str, bool]:
    name = run.get("name") or "-".join(
        [run["family"]]
        + [str(x) for x in run["params"]]
        + ([f"p{run['parts']}"] if "parts" in run else [])
        + [f"s{run['seed']}"]
    )
    fields = [name, run["family"]]
    try:
        g, parts, floor = _bench_instance(run)
        tree = bfs_tree(g, 0)
        result = engine.construct_full(
            g, tree, parts, engine.EngineConfig(max_delta=max_delta),
            random.Random(run["seed"]),
        )
        report = audit.audit_shortcut(g, tree, parts, result.shortcut)
        task = sim.AggregationTask(values={v: 1 for v in range(g.n)}, op="sum", parts=parts)
        cfg = sim.SimConfig(seed=f"{run['seed']}:agg")
        _, trace = sim.partwise_aggregate(g, parts, result.shortcut, task, cfg)
        floor_txt = "" if floor is None else f"{float(Fraction(floor)):g}"
        fields += [
            str(g.n),
            str(parts.k),
            str(tree.D),
            str(result.delta_final),
            str(report.congestion),
            str(report.dilation),
            str(report.blocks),
            str(report.quality),
            floor_txt,
            str(trace.rounds_used),
            str(trace.messages_sent),
            "ok",
        ]
        return ",".join(fields), True
    except (GraphError, engine.EngineError, sim.SimError, KeyError, TypeError) as exc:
        reason = f"{type(exc).__name__}: {exc}".replace(",", ";").replace("\n", " ")
        fields += [""] * (len(_BENCH_HEADER.split(",")) - 3) + [f"error:{reason}"]
        return ",".join(fields), False


def _cmd_bench(args) -> int:
    spec = json.loads(Path(args.spec).read_text())
    runs = spec.get("runs")
    if not isinstance(runs, list) or not runs:
        raise GraphError("bench spec must contain a non-empty 'runs' list")
    results = [_bench_row(run, args.max_delta) for run in runs]
    text = "# schema=1\n" + _BENCH_HEADER + "\n" + "\n".join(r for r, _ in results) + "\n"
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)
    return 0 if all(ok for _, ok in results) else RUNTIME_EXIT


# ---------------------------------------------------------------------------
# parser
# ---------------------------------------------------------------------------


def _build_parser() -> _Parser:
    parser = _Parser(prog="treeshort", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("gen", help="generate an instance family")
    gen.add_argument("family", choices=["lowerbound", "grid", "wheel", "ktree"])
    gen.add_argument("params", type=int, nargs="+")
    gen.add_argument("--seed", type=int)
    gen.add_argument("--out", default=".")
    gen.add_argument("--parts", type=int, help="also write a random partition")
    gen.add_argument("--weights", action="store_true", help="assign distinct weights")
    gen.set_defaults(func=_cmd_gen)

    sc = sub.add_parser("shortcut", help="construct and audit a full shortcut")
    sc.add_argument("graph")
    sc.add_argument("parts")
    sc.add_argument("--seed", type=int, required=True)
    sc.add_argument("--out")
    sc.add_argument("--max-delta", type=int)
    sc.set_defaults(func=_cmd_shortcut)

    au = sub.add_parser("audit", help="re-audit a shortcut file")
    au.add_argument("graph")
    au.add_argument("parts")
    au.add_argument("shortcut")
    au.add_argument("--format", choices=["json", "csv"], default="json")
    au.add_argument("--out")
    au.set_defaults(func=_cmd_audit)

    ag = sub.add_parser("aggregate", help="run partwise aggregation on the simulator")
    ag.add_argument("graph")
    ag.add_argument("parts")
    ag.add_argument("--op", choices=["min", "max", "sum"], default="sum")
    ag.add_argument("--seed", type=int, required=True)
    ag.add_argument("--shortcut", help="existing shortcut file (default: construct)")
    ag.add_argument("--out")
    ag.add_argument("--trace-csv")
    ag.add_argument("--max-delta", type=int)
    ag.add_argument("--max-rounds", type=int, default=1_000_000)
    ag.set_defaults(func=_cmd_aggregate)

    mst = sub.add_parser("mst", help="Boruvka MST on the simulator, oracle-checked")
    mst.add_argument("graph")
    mst.add_argument("--seed", type=int, required=True)
    mst.add_argument("--out")
    mst.add_argument("--max-delta", type=int)
    mst.add_argument("--max-rounds", type=int, default=1_000_000)
    mst.set_defaults(func=_cmd_mst)

    bench = sub.add_parser("bench", help="sweep a spec file into a CSV report")
    bench.add_argument("spec")
    bench.add_argument("--out")
    bench.add_argument("--max-delta", type=int)
    bench.set_defaults(func=_cmd_bench)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return USAGE_EXIT
    except (GraphError, OSError, json.JSONDecodeError, ValueError) as exc:
        print(f"validation error: {exc}", file=sys.stderr)
        return VALIDATION_EXIT
    except (engine.EngineError, sim.SimError) as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return RUNTIME_EXIT


if __name__ == "__main__":
    sys.exit(main())
