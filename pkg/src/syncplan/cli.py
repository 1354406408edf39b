"""Command-line interface: solve, check, reduce-front, gen, oracle, bench.

Exit codes: 0 satisfiable / ok, 1 unsatisfiable / invalid, 2 input error.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from pathlib import Path

from .graph import GraphError, _ident
from .instance import InstanceError, SyncPlanInstance, check_wellformed, is_valid_embedding
from .pqtree import PQTreeError

EXIT_OK, EXIT_NO, EXIT_INPUT = 0, 1, 2

FRONTENDS = ("clustered", "sefe", "pqc", "atomic")


class InputError(Exception):
    pass


# ---------------------------------------------------------------------------
# file helpers
# ---------------------------------------------------------------------------


def _read_json(path: str):
    try:
        text = sys.stdin.read() if path == "-" else Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON: {exc}") from exc


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    try:
        Path(path).write_text(text)
    except OSError as exc:
        raise InputError(f"cannot write {path}: {exc}") from exc


def load_instance(path: str) -> SyncPlanInstance:
    data = _read_json(path)
    if not isinstance(data, dict):
        raise InputError(f"{path}: instance JSON must be an object")
    try:
        inst = SyncPlanInstance.from_json(data)
    except (InstanceError, GraphError) as exc:
        raise InputError(f"{path}: {exc}") from exc
    problems = check_wellformed(inst)
    if problems:
        raise InputError(f"{path}: " + "; ".join(problems))
    return inst


def witness_to_json(rs) -> dict:
    return {"rotation": {str(v): list(r) for v, r in rs.items()}}


def witness_from_json(graph, data) -> dict:
    """Rotation system keyed by the graph's own vertex and half-edge ids."""
    if not isinstance(data, dict) or not isinstance(data.get("rotation"), dict):
        raise InputError("witness JSON must be an object with a 'rotation' mapping")
    vkey = {str(v): v for v in graph.vertices()}
    hkey = {str(h): h for v in graph.vertices() for h in graph.half_edges(v)}
    rs = {}
    for k, rot in data["rotation"].items():
        if k not in vkey:
            raise InputError(f"witness names unknown vertex {k!r}")
        try:
            rs[vkey[k]] = [hkey[str(_ident(h))] for h in rot]
        except (KeyError, TypeError) as exc:
            raise InputError(f"witness names unknown half-edge {exc}") from exc
    return rs


def _emit(args, payload: dict, text: str) -> None:
    if args.format == "json":
        print(json.dumps(payload))
    else:
        print(text)


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_solve(args) -> int:
    from .solver import solve

    inst = load_instance(args.instance)
    verdict = solve(inst)
    if args.log:
        _write_text(args.log, verdict.log.to_jsonl())
    if verdict.satisfiable and args.witness:
        _write_text(args.witness, json.dumps(witness_to_json(verdict.witness)) + "\n")
    payload = verdict.to_json()
    if args.format == "json":
        print(json.dumps(payload))
    else:
        status = "satisfiable" if verdict.satisfiable else f"unsatisfiable ({verdict.reason})"
        print(f"{status}; {verdict.ops_applied} operations, initial potential {verdict.potential_initial}")
    return EXIT_OK if verdict.satisfiable else EXIT_NO


def cmd_check(args) -> int:
    inst = load_instance(args.instance)
    rs = witness_from_json(inst.graph, _read_json(args.witness))
    try:
        ok = is_valid_embedding(inst, rs)
    except (GraphError, InstanceError, KeyError, ValueError):
        ok = False
    _emit(args, {"valid": ok}, "valid" if ok else "invalid")
    return EXIT_OK if ok else EXIT_NO


def _load_front(kind: str, data):
    from .reductions import (AtomicInstance, ClusteredGraph, PQConstrainedInstance, SefeInstance,
                             atomic_to_syncplan, clustered_to_syncplan, pqconstrained_to_syncplan,
                             sefe_to_syncplan)

    if not isinstance(data, dict):
        raise InputError("frontend JSON must be an object")
    try:
        if kind == "clustered":
            src = ClusteredGraph.from_json(data)
            inst, lift, _ = clustered_to_syncplan(src)
            return src, inst, lift.embedding
        if kind == "sefe":
            src = SefeInstance.from_json(data)
            inst, lift = sefe_to_syncplan(src)
            return src, inst, lift.embeddings
        if kind == "pqc":
            src = PQConstrainedInstance.from_json(data)
            inst, lift = pqconstrained_to_syncplan(src)
            return src, inst, lift.embedding
        src = AtomicInstance.from_json(data)
        inst, lift = atomic_to_syncplan(src)
        return src, inst, lift.embedding
    except (InstanceError, GraphError, PQTreeError, KeyError, TypeError) as exc:
        raise InputError(f"malformed {kind} instance: {exc}") from exc


def cmd_reduce_front(args) -> int:
    from .solver import solve

    _, inst, lift = _load_front(args.kind, _read_json(args.input))
    if args.output:
        _write_text(args.output, inst.dumps() + "\n")
    if not args.solve:
        if not args.output:
            _write_text(None, inst.dumps() + "\n")
        return EXIT_OK
    verdict = solve(inst)
    if verdict.satisfiable and args.witness:
        lifted = lift(verdict.witness)
        if isinstance(lifted, tuple):
            body = {"embeddings": [witness_to_json(x)["rotation"] for x in lifted]}
        else:
            body = witness_to_json(lifted)
        _write_text(args.witness, json.dumps(body) + "\n")
    _emit(args, verdict.to_json(), "satisfiable" if verdict.satisfiable else "unsatisfiable")
    return EXIT_OK if verdict.satisfiable else EXIT_NO


def cmd_gen(args) -> int:
    from .generators import generate

    try:
        inst = generate(args.family, args.size, args.seed)
    except ValueError as exc:
        raise InputError(str(exc)) from exc
    _write_text(args.output, inst.dumps() + "\n")
    return EXIT_OK


def cmd_oracle(args) -> int:
    from .oracle import OracleBudgetExceeded, brute_solve_syncplan

    inst = load_instance(args.instance)
    try:
        verdict = brute_solve_syncplan(inst, args.budget)
    except OracleBudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    if verdict.satisfiable and args.witness:
        _write_text(args.witness, json.dumps(witness_to_json(verdict.witness)) + "\n")
    _emit(args, {"satisfiable": verdict.satisfiable},
          "satisfiable" if verdict.satisfiable else "unsatisfiable")
    return EXIT_OK if verdict.satisfiable else EXIT_NO


def bench_rows(family: str, sizes: list[int], seed: int = 0, repeat: int = 1) -> list[dict]:
    """One row per size: edges, operations, initial potential and the best
    wall time over ``repeat`` runs of the solver."""
    from .generators import generate
    from .solver import solve

    rows = []
    for size in sizes:
        inst = generate(family, size, seed)
        best = None
        for _ in range(repeat):
            t0 = time.perf_counter()
            verdict = solve(inst, verify=False)
            dt = time.perf_counter() - t0
            best = dt if best is None else min(best, dt)
        m = inst.graph.num_edges()
        rows.append({"m": m, "ops": verdict.ops_applied, "potential": verdict.potential_initial,
                     "seconds": round(best, 4), "satisfiable": verdict.satisfiable})
    return rows


def cmd_bench(args) -> int:
    try:
        sizes = [int(x) for x in args.sizes.split(",") if x]
    except ValueError as exc:
        raise InputError(f"bad size list {args.sizes!r}") from exc
    from .generators import FAMILIES

    if args.family not in FAMILIES:
        raise InputError(f"unknown family {args.family!r}")
    rows = bench_rows(args.family, sizes, args.seed, args.repeat)
    w = csv.DictWriter(sys.stdout, fieldnames=["m", "ops", "potential", "seconds", "satisfiable"])
    w.writeheader()
    w.writerows(rows)
    ratio = max((r["ops"] / (2 * r["m"]) for r in rows if r["m"]), default=0.0)
    print(f"# max ops/2m = {ratio:.4f}")
    for a, b in zip(rows, rows[1:]):
        if a["seconds"] > 0:
            print(f"# time ratio m={a['m']} -> m={b['m']}: {b['seconds'] / a['seconds']:.2f}")
    return EXIT_OK if ratio < 1 else EXIT_NO


# ---------------------------------------------------------------------------
# entry point
# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="syncplan", description="Synchronized Planarity solver.")
    parser.add_argument("--format", choices=("text", "json"), default="json",
                        help="output style for verdicts (default: json)")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("solve", help="decide an instance")
    p.add_argument("instance")
    p.add_argument("--witness", help="write the embedding here when satisfiable")
    p.add_argument("--log", help="write the operation log here (JSON lines)")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("check", help="validate a witness against an instance")
    p.add_argument("instance")
    p.add_argument("witness")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("reduce-front", help="translate a constrained planarity instance")
    p.add_argument("kind", choices=FRONTENDS)
    p.add_argument("input")
    p.add_argument("-o", "--output", help="write the synchronized planarity instance here")
    p.add_argument("--solve", action="store_true", help="also solve it and report the verdict")
    p.add_argument("--witness", help="with --solve: write the embedding of the original input")
    p.set_defaults(func=cmd_reduce_front)

    p = sub.add_parser("gen", help="generate an instance")
    p.add_argument("family")
    p.add_argument("size", type=int)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("-o", "--output")
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("oracle", help="decide an instance by exhaustive search")
    p.add_argument("instance")
    p.add_argument("--budget", type=int, default=None,
                   help="candidate limit (default: $SYNCPLAN_ORACLE_BUDGET or built-in)")
    p.add_argument("--witness")
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("bench", help="time the solver on a generated family")
    p.add_argument("--family", default="random-pipes")
    p.add_argument("--sizes", default="1000,2000,4000,8000")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repeat", type=int, default=1)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    try:
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except InstanceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
