"""Hard scheduling instances built from Partition and Shuffle Product, with decoders.

Two identical machines are modelled as one resource of capacity 2 that every
job needs one unit of.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Mapping, Sequence

from .core import Instance, InstanceError, Job, Resource, Schedule, is_feasible, makespan
from .lattice import Geometry, default_budget
from .shuffle import (
    DsInstance,
    ShuffleInstance,
    WitnessMapping,
    ds_to_shuffle,
    extract_dominating_set,
    validate_witness,
)

log = logging.getLogger(__name__)

MACHINE = "machine"


@dataclass(frozen=True)
class NoInstance:
    """The source instance is a no-instance; no scheduling instance is built."""

    reason: str

    def __bool__(self) -> bool:
        return False

    def to_dict(self) -> dict:
        return {"result": "no-instance", "reason": self.reason}


@dataclass(frozen=True)
class PartitionInstance:
    values: tuple[int, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "values", tuple(self.values))
        if not self.values:
            raise InstanceError("partition multiset must be non-empty")
        if any(not isinstance(a, int) or a < 1 for a in self.values):
            raise InstanceError("partition values must be positive integers")


@dataclass(frozen=True)
class ReductionOutput:
    instance: Instance
    target: int
    codec: Mapping[str, Any] = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {"instance": self.instance.to_dict(), "target": self.target, "codec": dict(self.codec)}

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> "ReductionOutput":
        if set(raw) - {"instance", "target", "codec"}:
            raise InstanceError(f"unknown reduction field(s): {sorted(set(raw) - {'instance', 'target', 'codec'})}")
        return cls(Instance.from_dict(raw["instance"]), int(raw["target"]), dict(raw["codec"]))


def _machine_job(jid: str, p: int) -> Job:
    return Job(jid, p, {MACHINE: 1})


def _chain_edges(ids: Sequence[str]) -> list[tuple[str, str]]:
    return list(zip(ids, ids[1:]))


def partition_to_p2chains(part: PartitionInstance | Sequence[int]) -> ReductionOutput | NoInstance:
    """Three chains on two machines; makespan (2t+3)b is reachable iff A splits evenly.

    Chain J0 holds one short job per value, chains J1 and J2 hold t+1 long
    jobs of length 2b each.
    """
    if not isinstance(part, PartitionInstance):
        part = PartitionInstance(tuple(part))
    A = part.values
    total = sum(A)
    if total % 2:
        return NoInstance(f"sum {total} is odd, so b = {total}/2 is not an integer")
    b = total // 2
    t = len(A)
    short = [f"j0_{i}" for i in range(1, t + 1)]
    long1 = [f"j1_{i}" for i in range(1, t + 2)]
    long2 = [f"j2_{i}" for i in range(1, t + 2)]
    jobs = [_machine_job(jid, a) for jid, a in zip(short, A)]
    jobs += [_machine_job(jid, 2 * b) for jid in long1 + long2]
    edges = _chain_edges(short) + _chain_edges(long1) + _chain_edges(long2)
    inst = Instance(tuple(jobs), (Resource(MACHINE, 2),), tuple(edges))
    codec = {"kind": "partition", "values": list(A), "b": b, "short_jobs": short}
    return ReductionOutput(inst, (2 * t + 3) * b, codec)


def machine_assignment(inst: Instance, sched: Schedule, machines: int = 2) -> dict[str, int] | None:
    """Assign each job of a unit-demand schedule to a machine, or None if impossible.

    Greedy by start time; works whenever at most ``machines`` jobs overlap.
    """
    free_at = [0] * machines
    out = {}
    for j in sorted(inst.jobs, key=lambda j: (sched.starts[j.id], inst.index[j.id])):
        s = sched.starts[j.id]
        for m in range(machines):
            if free_at[m] <= s:
                free_at[m] = s + j.p
                out[j.id] = m
                break
        else:
            return None
    return out


def decode_partition(out: ReductionOutput, sched: Schedule) -> tuple[int, ...] | None:
    """Values of the short jobs run on the first machine, or None for a bad schedule.

    At makespan (2t+3)b each machine runs exactly t+1 long jobs, leaving b
    time units for short jobs on each.
    """
    if not is_feasible(out.instance, sched) or makespan(out.instance, sched) > out.target:
        return None
    assign = machine_assignment(out.instance, sched)
    if assign is None:
        return None
    values = out.codec["values"]
    first = tuple(a for jid, a in zip(out.codec["short_jobs"], values) if assign[jid] == 0)
    if 2 * sum(first) != sum(values):
        return None
    return first


def _durations(word: str) -> list[int]:
    out = []
    for c in word:
        if c not in "12":
            raise ValueError(f"letter {c!r} is not a duration in {{1, 2}}")
        out.append(int(c))
    return out


def shuffle_to_p2(inst: ShuffleInstance) -> ReductionOutput | NoInstance:
    """Worker chains per source plus a rigid floor that spells the target.

    Letters are durations. The floor gadget z_x1 -> {z_x2, z_x3} -> z_{x+1,1}
    leaves exactly one machine free for t[x] time units at each step, and the
    target makespan is sum(t[x] + 1).
    """
    for s in inst.sources:
        _durations(s)
    tdur = _durations(inst.target)
    if not inst.counts_match():
        return NoInstance("letter counts of the sources and the target differ")
    jobs: list[Job] = []
    edges: list[tuple[str, str]] = []
    for i, s in enumerate(inst.sources, 1):
        ids = [f"w{i}_{x}" for x in range(1, len(s) + 1)]
        jobs += [_machine_job(jid, int(c)) for jid, c in zip(ids, s)]
        edges += _chain_edges(ids)
    for x, d in enumerate(tdur, 1):
        z1, z2, z3 = f"z{x}_1", f"z{x}_2", f"z{x}_3"
        jobs += [_machine_job(z1, d), _machine_job(z2, 1), _machine_job(z3, 1)]
        edges += [(z1, z2), (z1, z3)]
        if x < len(tdur):
            edges += [(z2, f"z{x + 1}_1"), (z3, f"z{x + 1}_1")]
    target = sum(d + 1 for d in tdur)
    codec = {"kind": "shuffle", "sources": list(inst.sources), "target_word": inst.target}
    return ReductionOutput(Instance(tuple(jobs), (Resource(MACHINE, 2),), tuple(edges)), target, codec)


def slot_times(word: str) -> list[int]:
    """Start of the free slot for each target letter: tau(x) = sum_{y<x} (t[y] + 1)."""
    out, acc = [], 0
    for d in _durations(word):
        out.append(acc)
        acc += d + 1
    return out


def floor_is_forced(out: ReductionOutput, sched: Schedule) -> bool:
    word = out.codec["target_word"]
    s = sched.starts
    for x, (tau, d) in enumerate(zip(slot_times(word), _durations(word)), 1):
        if s[f"z{x}_1"] != tau or s[f"z{x}_2"] != tau + d or s[f"z{x}_3"] != tau + d:
            return False
    return True


def decode_shuffle(out: ReductionOutput, sched: Schedule) -> WitnessMapping | None:
    """Shuffle witness from a makespan-T schedule: each worker sits in one free slot."""
    if not is_feasible(out.instance, sched) or makespan(out.instance, sched) > out.target:
        return None
    if not floor_is_forced(out, sched):
        # cannot happen at makespan T
        return None
    word = out.codec["target_word"]
    slot_of = {tau: y for y, tau in enumerate(slot_times(word))}
    maps = []
    for i, s in enumerate(out.codec["sources"], 1):
        f = []
        for x in range(1, len(s) + 1):
            y = slot_of.get(sched.starts[f"w{i}_{x}"])
            if y is None:
                return None
            f.append(y)
        maps.append(tuple(f))
    w = WitnessMapping(tuple(maps))
    if not validate_witness(ShuffleInstance(tuple(out.codec["sources"]), word), w):
        return None
    return w


def ds_to_p2(g: DsInstance, volume_budget: int | None = None) -> ReductionOutput | NoInstance:
    """Dominating Set -> binary shuffle -> two-machine scheduling (a=1, b=2)."""
    words = ds_to_shuffle(g)
    table = str.maketrans("ab", "12")
    numeric = ShuffleInstance(tuple(s.translate(table) for s in words.sources), words.target.translate(table))
    out = shuffle_to_p2(numeric)
    if isinstance(out, NoInstance):
        return out
    budget = default_budget() if volume_budget is None else volume_budget
    corner = Geometry.build(out.instance).corner
    volume = 1
    for c in corner:
        volume *= c + 1
    if volume > budget:
        log.warning(
            "scheduling instance has %d jobs and orthotope volume %d, beyond the lattice "
            "solver budget %d; verify at the shuffle layer instead",
            out.instance.n,
            volume,
            budget,
        )
    codec = dict(out.codec)
    codec["kind"] = "ds"
    codec["graph"] = g.graph_dict()
    codec["k"] = g.k
    return ReductionOutput(out.instance, out.target, codec)


def decode(out: ReductionOutput, sched: Schedule) -> Any:
    """Source certificate for any reduction output, or None."""
    kind = out.codec.get("kind")
    if kind == "partition":
        return decode_partition(out, sched)
    if kind == "shuffle":
        return decode_shuffle(out, sched)
    if kind == "ds":
        w = decode_shuffle(out, sched)
        if w is None:
            return None
        g = DsInstance.from_dict(out.codec["graph"], out.codec["k"])
        return extract_dominating_set(g, w)
    raise InstanceError(f"unknown reduction kind {kind!r}")
