"""Command-line entry point: ``rcpsp-lattice <subcommand> ...``.

Every result goes to stdout as JSON with sorted keys; diagnostics go to
stderr. Exit codes: 0 solved or yes, 1 no or none, 2 usage or validation
error, 3 budget exceeded.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from typing import Any, Sequence

from .chains import chain_decompose, schedule_lag
from .core import BudgetExceeded, Instance, InstanceError, Schedule, is_feasible, makespan
from .corridor import corridor_solve
from .lattice import Solution, servakh_solve
from .oracle import brute_force_search
from .reductions import (
    NoInstance,
    PartitionInstance,
    ReductionOutput,
    decode,
    ds_to_p2,
    partition_to_p2chains,
    shuffle_to_p2,
)
from .shuffle import DsInstance, ShuffleInstance, WitnessMapping, ds_to_shuffle, shuffle_member

EXIT_OK, EXIT_NO, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3

log = logging.getLogger("rcpsp_lattice")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message: str) -> None:  # argparse would sys.exit(2) itself
        raise UsageError(message)


def dumps(obj: Any) -> str:
    return json.dumps(obj, sort_keys=True)


def _load(path: str) -> Any:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from exc
    except json.JSONDecodeError as exc:
        raise InstanceError(f"{path} is not valid JSON: {exc}") from exc


def _load_instance(path: str) -> Instance:
    return Instance.from_dict(_load(path))


def _non_negative(text: str) -> int:
    try:
        v = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"{text!r} is not an integer") from None
    if v < 0:
        raise argparse.ArgumentTypeError("must be non-negative")
    return v


def _positive(text: str) -> int:
    v = _non_negative(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="rcpsp-lattice", description="Exact RCPSP solvers and hardness gadgets.")
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    s = sub.add_parser("solve", help="solve an instance")
    s.add_argument("--algo", choices=("servakh", "corridor", "oracle"), required=True)
    lag = s.add_mutually_exclusive_group()
    lag.add_argument("--lag", type=_non_negative, help="lag bound (required for corridor)")
    lag.add_argument("--lag-sweep", type=_non_negative, metavar="N", help="solve for every lag 0..N")
    s.add_argument("--emit-path", action="store_true", help="include the lattice path")
    s.add_argument("instance")

    v = sub.add_parser("verify", help="check a schedule against an instance")
    v.add_argument("instance")
    v.add_argument("schedule")

    w = sub.add_parser("width", help="width and a minimum chain decomposition")
    w.add_argument("instance")

    sh = sub.add_parser("shuffle", help="shuffle product tools")
    shs = sh.add_subparsers(dest="shuffle_command", required=True, parser_class=_Parser)
    c = shs.add_parser("check", help="is the target a shuffle of the sources")
    c.add_argument("words")
    f = shs.add_parser("from-ds", help="build the shuffle instance for a dominating set question")
    f.add_argument("graph")
    f.add_argument("-k", type=_positive, required=True)

    r = sub.add_parser("reduce", help="build a scheduling instance from a source problem")
    r.add_argument("kind", choices=("partition", "shuffle-to-p2", "ds-to-p2"))
    r.add_argument("input")
    r.add_argument("-k", type=_positive, help="dominating set size (ds-to-p2 only)")

    d = sub.add_parser("decode", help="turn a schedule of a reduced instance into a source certificate")
    d.add_argument("reduction")
    d.add_argument("schedule")
    return p


def _solution_json(inst: Instance, sol: Solution, emit_path: bool) -> dict:
    out = sol.schedule.to_dict(inst)
    if emit_path:
        out["path"] = [seg.to_json() for seg in sol.path]
    return out


def _solve_once(inst: Instance, algo: str, lam: int | None, emit_path: bool) -> tuple[int, dict]:
    if algo == "servakh":
        return EXIT_OK, _solution_json(inst, servakh_solve(inst), emit_path)
    if algo == "corridor":
        sol = corridor_solve(inst, lam)
        if sol is None:
            return EXIT_NO, {"result": "no-schedule-within-lag"}
        return EXIT_OK, _solution_json(inst, sol, emit_path)
    found = brute_force_search(inst, lam)
    if found is None:
        return EXIT_NO, {"result": "no-schedule-within-lag"}
    return EXIT_OK, found[1].to_dict(inst)


def cmd_solve(args: argparse.Namespace) -> int:
    if args.emit_path and args.algo == "oracle":
        raise UsageError("--emit-path needs a lattice solver (servakh or corridor)")
    if args.algo == "servakh" and (args.lag is not None or args.lag_sweep is not None):
        raise UsageError("servakh has no lag bound; use --algo corridor")
    if args.algo == "corridor" and args.lag is None and args.lag_sweep is None:
        raise UsageError("--algo corridor needs --lag or --lag-sweep")
    inst = _load_instance(args.instance)
    if args.lag_sweep is None:
        code, out = _solve_once(inst, args.algo, args.lag, args.emit_path)
        print(dumps(out))
        return code
    code = EXIT_NO
    for lam in range(args.lag_sweep + 1):
        c, out = _solve_once(inst, args.algo, lam, args.emit_path)
        out["lag"] = lam
        print(dumps(out), flush=True)
        code = min(code, c)
    return code


def cmd_verify(args: argparse.Namespace) -> int:
    inst = _load_instance(args.instance)
    sched = Schedule.from_dict(_load(args.schedule))
    v = is_feasible(inst, sched)
    out: dict[str, Any] = {"feasible": v.ok}
    if v.ok:
        out["makespan"] = makespan(inst, sched)
        out["lag"] = schedule_lag(inst, sched)
    else:
        out["reason"] = v.reason
        out["witness"] = v.witness
    print(dumps(out))
    return EXIT_OK if v.ok else EXIT_NO


def cmd_width(args: argparse.Namespace) -> int:
    print(dumps(chain_decompose(_load_instance(args.instance)).to_dict()))
    return EXIT_OK


def cmd_shuffle(args: argparse.Namespace) -> int:
    if args.shuffle_command == "check":
        w = shuffle_member(ShuffleInstance.from_dict(_load(args.words)))
        if w is None:
            print(dumps({"member": False}))
            return EXIT_NO
        print(dumps({"member": True, "witness": w.to_dict()}))
        return EXIT_OK
    g = DsInstance.from_dict(_load(args.graph), args.k)
    print(dumps(ds_to_shuffle(g).to_dict()))
    return EXIT_OK


def _partition_values(raw: Any) -> list[int]:
    if isinstance(raw, dict):
        if set(raw) != {"values"}:
            raise InstanceError("numbers JSON must be a list or an object with only 'values'")
        raw = raw["values"]
    if not isinstance(raw, list) or not all(isinstance(a, int) and not isinstance(a, bool) for a in raw):
        raise InstanceError("partition input must be a list of integers")
    return raw


def cmd_reduce(args: argparse.Namespace) -> int:
    if (args.k is not None) != (args.kind == "ds-to-p2"):
        raise UsageError("-k is required for ds-to-p2 and not accepted otherwise")
    raw = _load(args.input)
    if args.kind == "partition":
        out = partition_to_p2chains(PartitionInstance(tuple(_partition_values(raw))))
    elif args.kind == "shuffle-to-p2":
        out = shuffle_to_p2(ShuffleInstance.from_dict(raw))
    else:
        out = ds_to_p2(DsInstance.from_dict(raw, args.k))
    if isinstance(out, NoInstance):
        print(dumps(out.to_dict()))
        return EXIT_NO
    print(dumps(out.to_dict()))
    return EXIT_OK


def cmd_decode(args: argparse.Namespace) -> int:
    out = ReductionOutput.from_dict(_load(args.reduction))
    sched = Schedule.from_dict(_load(args.schedule))
    cert = decode(out, sched)
    if cert is None:
        print(dumps({"result": "no-certificate"}))
        return EXIT_NO
    if isinstance(cert, WitnessMapping):
        body: Any = cert.to_dict()
    elif isinstance(cert, set):
        body = {"dominating_set": sorted(cert)}
    else:
        body = {"subset": list(cert)}
    print(dumps({"certificate": body, "kind": out.codec["kind"]}))
    return EXIT_OK


COMMANDS = {
    "solve": cmd_solve,
    "verify": cmd_verify,
    "width": cmd_width,
    "shuffle": cmd_shuffle,
    "reduce": cmd_reduce,
    "decode": cmd_decode,
}


def run(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, stream=sys.stderr)
    try:
        return COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except BudgetExceeded as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (InstanceError, ValueError, KeyError, TypeError) as exc:
        print(f"invalid input: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main() -> None:
    sys.exit(run())
