"""RCPSP data model: jobs, renewable resources, precedence DAG, schedules.

Jobs are addressed by string ids externally and by their declaration index
internally. The strict order is the transitive closure of the declared
precedence edges and is stored as integer bitmasks over job indices.
"""

from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from typing import Any, Iterable, Mapping


class InstanceError(ValueError):
    """Raised when an instance violates a structural invariant."""


class BudgetExceeded(RuntimeError):
    """Raised when a solver or oracle would exceed its configured state budget."""


@dataclass(frozen=True)
class Resource:
    id: str
    capacity: int


@dataclass(frozen=True)
class Job:
    id: str
    p: int
    demands: Mapping[str, int] = field(default_factory=dict)

    def demand(self, rid: str) -> int:
        return self.demands.get(rid, 0)


@dataclass(frozen=True)
class Verdict:
    """Boolean outcome that carries the first violation it found."""

    ok: bool
    reason: str | None = None
    witness: Any = None

    def __bool__(self) -> bool:
        return self.ok


PASS = Verdict(True)


@dataclass(frozen=True, eq=False)
class Instance:
    jobs: tuple[Job, ...] = ()
    resources: tuple[Resource, ...] = ()
    precedence: tuple[tuple[str, str], ...] = ()

    # derived on construction; bit i of pred_mask[j] is set iff job i precedes j
    index: dict[str, int] = field(init=False, repr=False)
    pred_mask: tuple[int, ...] = field(init=False, repr=False)
    succ_mask: tuple[int, ...] = field(init=False, repr=False)
    topo_order: tuple[int, ...] = field(init=False, repr=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "jobs", tuple(self.jobs))
        object.__setattr__(self, "resources", tuple(self.resources))
        object.__setattr__(self, "precedence", tuple((a, b) for a, b in self.precedence))
        _check_and_close(self)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Instance):
            return NotImplemented
        return (
            self.jobs == other.jobs
            and self.resources == other.resources
            and self.precedence == other.precedence
        )

    __hash__ = None  # type: ignore[assignment]

    @property
    def n(self) -> int:
        return len(self.jobs)

    def job(self, jid: str) -> Job:
        return self.jobs[self.index[jid]]

    def precedes(self, a: str, b: str) -> bool:
        """True iff ``a`` strictly precedes ``b`` in the closed order."""
        return bool(self.pred_mask[self.index[b]] >> self.index[a] & 1)

    def predecessors(self, jid: str) -> list[str]:
        return [self.jobs[i].id for i in _bits(self.pred_mask[self.index[jid]])]

    def total_processing(self) -> int:
        return sum(j.p for j in self.jobs)

    def to_dict(self) -> dict:
        return {
            "resources": [{"id": r.id, "capacity": r.capacity} for r in self.resources],
            "jobs": [
                {"id": j.id, "p": j.p, "demands": dict(sorted(j.demands.items()))}
                for j in self.jobs
            ],
            "precedence": [[a, b] for a, b in self.precedence],
        }

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> "Instance":
        _reject_unknown(raw, {"resources", "jobs", "precedence"}, "instance")
        resources = []
        for r in raw.get("resources", []):
            _reject_unknown(r, {"id", "capacity"}, "resource")
            resources.append(Resource(str(r["id"]), _as_int(r["capacity"], "capacity")))
        jobs = []
        for j in raw.get("jobs", []):
            _reject_unknown(j, {"id", "p", "demands"}, "job")
            demands = {str(k): _as_int(v, "demand") for k, v in j.get("demands", {}).items()}
            jobs.append(Job(str(j["id"]), _as_int(j["p"], "p"), demands))
        edges = []
        for e in raw.get("precedence", []):
            if len(e) != 2:
                raise InstanceError(f"precedence entry {e!r} is not a pair")
            edges.append((str(e[0]), str(e[1])))
        return cls(tuple(jobs), tuple(resources), tuple(edges))


@dataclass(frozen=True)
class Schedule:
    starts: Mapping[str, int]

    def to_dict(self, inst: Instance | None = None) -> dict:
        out: dict[str, Any] = {"starts": dict(self.starts)}
        if inst is not None:
            out["makespan"] = makespan(inst, self)
        return out

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> "Schedule":
        _reject_unknown(raw, {"starts", "makespan"}, "schedule")
        return cls({str(k): _as_int(v, "start") for k, v in raw["starts"].items()})

    def shifted(self, c: int) -> "Schedule":
        return Schedule({k: v + c for k, v in self.starts.items()})


def _reject_unknown(raw: Any, allowed: set[str], what: str) -> None:
    if not isinstance(raw, Mapping):
        raise InstanceError(f"{what} must be a JSON object")
    extra = set(raw) - allowed
    if extra:
        raise InstanceError(f"unknown {what} field(s): {sorted(extra)}")


def _as_int(v: Any, what: str) -> int:
    if isinstance(v, bool) or not isinstance(v, int):
        raise InstanceError(f"{what} must be an integer, got {v!r}")
    return v


def _bits(mask: int) -> Iterable[int]:
    i = 0
    while mask:
        if mask & 1:
            yield i
        mask >>= 1
        i += 1


def bits(mask: int) -> list[int]:
    """Indices of the set bits of ``mask`` in ascending order."""
    return list(_bits(mask))


def _check_and_close(inst: Instance) -> None:
    caps: dict[str, int] = {}
    for r in inst.resources:
        if r.id in caps:
            raise InstanceError(f"duplicate resource id {r.id!r}")
        if r.capacity < 0:
            raise InstanceError(f"resource {r.id!r} has negative capacity")
        caps[r.id] = r.capacity

    index: dict[str, int] = {}
    for i, j in enumerate(inst.jobs):
        if j.id in index:
            raise InstanceError(f"duplicate job id {j.id!r}")
        index[j.id] = i
        if j.p < 1:
            raise InstanceError(f"job {j.id!r} has nonpositive processing time {j.p}")
        for rid, amount in j.demands.items():
            if rid not in caps:
                raise InstanceError(f"job {j.id!r} demands unknown resource {rid!r}")
            if amount < 0:
                raise InstanceError(f"job {j.id!r} has negative demand on {rid!r}")
            if amount > caps[rid]:
                raise InstanceError(
                    f"job {j.id!r} demand {amount} exceeds capacity {caps[rid]} of {rid!r}"
                )

    n = len(inst.jobs)
    succ: list[list[int]] = [[] for _ in range(n)]
    indeg = [0] * n
    for a, b in inst.precedence:
        if a not in index or b not in index:
            raise InstanceError(f"precedence edge ({a!r}, {b!r}) refers to an unknown job")
        if a == b:
            raise InstanceError(f"cycle in precedence: self-loop on {a!r}")
        succ[index[a]].append(index[b])
        indeg[index[b]] += 1

    # Kahn's algorithm; smallest index first keeps the order deterministic
    ready = [i for i in range(n) if indeg[i] == 0]
    heapq.heapify(ready)
    order: list[int] = []
    while ready:
        u = heapq.heappop(ready)
        order.append(u)
        for v in succ[u]:
            indeg[v] -= 1
            if indeg[v] == 0:
                heapq.heappush(ready, v)
    if len(order) != n:
        stuck = sorted(inst.jobs[i].id for i in range(n) if indeg[i] > 0)
        raise InstanceError(f"cycle in precedence among jobs {stuck}")

    pred_mask = [0] * n
    for u in order:
        for v in succ[u]:
            pred_mask[v] |= pred_mask[u] | (1 << u)
    succ_mask = [0] * n
    for v in range(n):
        for u in _bits(pred_mask[v]):
            succ_mask[u] |= 1 << v

    object.__setattr__(inst, "index", index)
    object.__setattr__(inst, "pred_mask", tuple(pred_mask))
    object.__setattr__(inst, "succ_mask", tuple(succ_mask))
    object.__setattr__(inst, "topo_order", tuple(order))


def validate_instance(raw: Instance | Mapping[str, Any]) -> Instance:
    """Validate ``raw`` (an Instance or its JSON dict) and return a closed Instance.

    Raises InstanceError on cycles, unknown or duplicate ids, nonpositive
    processing times and demands above capacity.
    """
    if isinstance(raw, Instance):
        return Instance(raw.jobs, raw.resources, raw.precedence)
    return Instance.from_dict(raw)


def makespan(inst: Instance, sched: Schedule) -> int:
    return max((sched.starts[j.id] + j.p for j in inst.jobs), default=0)


def is_feasible(inst: Instance, sched: Schedule) -> Verdict:
    """Check precedence and resource constraints of ``sched``.

    Resource load is piecewise constant between start times, so checking it
    at every start time is exact.
    """
    s = sched.starts
    missing = [j.id for j in inst.jobs if j.id not in s]
    if missing:
        return Verdict(False, "schedule is not total", missing)
    for j in inst.jobs:
        if s[j.id] < 0:
            return Verdict(False, "negative start", j.id)

    for j in inst.jobs:
        vj = inst.index[j.id]
        for i in _bits(inst.pred_mask[vj]):
            pi = inst.jobs[i]
            if s[pi.id] + pi.p > s[j.id]:
                return Verdict(False, "precedence", (pi.id, j.id))

    for t in sorted({s[j.id] for j in inst.jobs}):
        active = [j for j in inst.jobs if s[j.id] <= t < s[j.id] + j.p]
        for r in inst.resources:
            load = sum(j.demand(r.id) for j in active)
            if load > r.capacity:
                return Verdict(False, "resource", {"time": t, "resource": r.id, "load": load})
    return PASS
