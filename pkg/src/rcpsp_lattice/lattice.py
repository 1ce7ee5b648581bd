"""Geometric view of RCPSP: states are points of the orthotope [0, L]^w.

Coordinate l of a point is the amount of processing done on chain l. A
feasible schedule is a monotone path of feasible points from the origin to
the corner L, made of segments [y, y + t*delta] with delta in {0, 1}^w, and a
shortest such path gives an optimal schedule.

Public points are ``StatePoint`` values stored at twice their true scale so
that half-integer probes stay exact. The solvers themselves work on plain
integer tuples.
"""

from __future__ import annotations

import heapq
import itertools
import os
from bisect import bisect_right
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .chains import ChainDecomposition, chain_decompose
from .core import BudgetExceeded, Instance, Schedule, makespan

Point = tuple[int, ...]
Direction = tuple[int, ...]

DEFAULT_VOLUME_BUDGET = 10**8


def default_budget() -> int:
    env = os.environ.get("SCHED_BUDGET_STATES")
    return int(env) if env else DEFAULT_VOLUME_BUDGET


@dataclass(frozen=True)
class Geometry:
    decomposition: ChainDecomposition
    chain_jobs: tuple[tuple[int, ...], ...]  # job indices per chain
    prefix_sums: tuple[tuple[int, ...], ...]  # L_l^0 = 0, ..., L_l^{n_l}
    corner: Point

    @classmethod
    def build(cls, inst: Instance, decomposition: ChainDecomposition | None = None) -> "Geometry":
        dec = decomposition if decomposition is not None else chain_decompose(inst)
        chain_jobs = tuple(tuple(inst.index[j] for j in chain) for chain in dec.chains)
        prefix = tuple(
            tuple(itertools.accumulate((inst.jobs[j].p for j in chain), initial=0))
            for chain in chain_jobs
        )
        return cls(dec, chain_jobs, prefix, tuple(pre[-1] for pre in prefix))

    @property
    def w(self) -> int:
        return len(self.chain_jobs)

    def volume(self) -> int:
        v = 1
        for c in self.corner:
            v *= c + 1
        return v


@dataclass(frozen=True)
class StatePoint:
    coords2: tuple[int, ...]

    @classmethod
    def lattice(cls, coords: Iterable[int]) -> "StatePoint":
        return cls(tuple(2 * c for c in coords))

    @classmethod
    def of(cls, values: Iterable[float | Fraction | int]) -> "StatePoint":
        out = []
        for v in values:
            d = Fraction(v) * 2
            if d.denominator != 1:
                raise ValueError(f"coordinate {v} is not a multiple of 1/2")
            out.append(int(d))
        return cls(tuple(out))

    @property
    def values(self) -> tuple[Fraction, ...]:
        return tuple(Fraction(c, 2) for c in self.coords2)


@dataclass(frozen=True)
class State:
    running: frozenset[str]
    completed: frozenset[str]
    progress: dict[str, Fraction]


@dataclass(frozen=True)
class Segment:
    start: Point
    delta: Direction
    t: int

    @property
    def end(self) -> Point:
        return tuple(s + self.t * d for s, d in zip(self.start, self.delta))

    def to_json(self) -> list:
        return [list(self.start), list(self.delta), self.t]


@dataclass(frozen=True)
class Solution:
    schedule: Schedule
    makespan: int
    path: tuple[Segment, ...]


class FeasibilityChecker:
    """Cached evaluation of the state feasibility rules for one instance.

    A point is feasible when its running jobs fit the resource capacities
    and every running job has all of its predecessors completed.
    """

    def __init__(self, inst: Instance, geom: Geometry):
        self.inst = inst
        self.geom = geom
        self.prefix2 = tuple(tuple(2 * v for v in pre) for pre in geom.prefix_sums)
        done = []
        for chain in geom.chain_jobs:
            masks = [0]
            for j in chain:
                masks.append(masks[-1] | (1 << j))
            done.append(tuple(masks))
        self.done_prefix = tuple(done)
        self.demand = [tuple(j.demand(r.id) for r in inst.resources) for j in inst.jobs]
        self.caps = tuple(r.capacity for r in inst.resources)
        self._cache: dict[tuple, bool] = {}

    def state(self, x2: Sequence[int], moving: Sequence[int] | None = None) -> tuple[list[int], int]:
        """Running job indices and completed-job mask at scaled point ``x2``.

        Chains flagged in ``moving`` report the state just after ``x2`` in
        the direction of travel, which is the state on the open piece of a
        segment leaving ``x2``.
        """
        running = []
        done = 0
        for l, c in enumerate(x2):
            pre = self.prefix2[l]
            i = bisect_right(pre, c)  # pre[i-1] <= c < pre[i]
            done |= self.done_prefix[l][i - 1]
            if i < len(pre) and (c > pre[i - 1] or (moving is not None and moving[l])):
                running.append(self.geom.chain_jobs[l][i - 1])
        return running, done

    def _ok(self, running: list[int], done: int) -> bool:
        if self.caps and len(running) > 1:
            for r, cap in enumerate(self.caps):
                if sum(self.demand[j][r] for j in running) > cap:
                    return False
        pred = self.inst.pred_mask
        return all(pred[j] & ~done == 0 for j in running)

    def point_ok(self, x2: tuple[int, ...], moving: tuple[int, ...] | None = None) -> bool:
        key = (x2, moving)
        hit = self._cache.get(key)
        if hit is None:
            hit = self._cache[key] = self._ok(*self.state(x2, moving))
        return hit

    def running_chains(self, x2: Sequence[int]) -> list[int]:
        out = []
        for l, c in enumerate(x2):
            pre = self.prefix2[l]
            i = bisect_right(pre, c)
            if i < len(pre) and c > pre[i - 1]:
                out.append(l)
        return out

    def segment_ok2(self, start2: Point, delta: Direction, len2: int) -> bool:
        """Feasibility of [start2, start2 + len2*delta] in scaled coordinates.

        The running set only changes where a moving chain crosses a job
        boundary, so the segment splits into pieces of constant state. Every
        piece endpoint and one interior state per piece are checked, plus the
        rule that jobs running at the start keep moving. For a unit step this
        is exactly the two endpoints and the midpoint.
        """
        if len2 < 1:
            raise ValueError("segment length must be positive")
        for l in self.running_chains(start2):
            if not delta[l]:
                return False
        cuts = {0, len2}
        for l, d in enumerate(delta):
            if d:
                c = start2[l]
                pre = self.prefix2[l]
                for b in pre[bisect_right(pre, c):]:
                    if b >= c + len2:
                        break
                    cuts.add(b - c)
        pts = [tuple(v + tau * d for v, d in zip(start2, delta)) for tau in sorted(cuts)]
        if not all(self.point_ok(p) for p in pts):
            return False
        return all(self.point_ok(p, delta) for p in pts[:-1])

    def segment_ok(self, y: Point, delta: Direction, t: int) -> bool:
        """Exact feasibility of the integer segment [y, y + t*delta]."""
        return self.segment_ok2(tuple(2 * v for v in y), delta, 2 * t)


def _in_box(x2: Sequence[int], geom: Geometry) -> bool:
    return all(0 <= c <= 2 * L for c, L in zip(x2, geom.corner)) and len(x2) == geom.w


def state_of(inst: Instance, geom: Geometry, x: StatePoint) -> State:
    """Running and completed jobs at ``x`` plus elapsed time of each running job."""
    if not _in_box(x.coords2, geom):
        raise ValueError(f"point {x.values} lies outside the orthotope")
    running = []
    completed = []
    progress = {}
    for l, c in enumerate(x.coords2):
        pre = geom.prefix_sums[l]
        chain = geom.chain_jobs[l]
        for i, j in enumerate(chain):
            lo, hi = 2 * pre[i], 2 * pre[i + 1]
            if c >= hi:
                completed.append(inst.jobs[j].id)
            elif c > lo:
                running.append(inst.jobs[j].id)
                progress[inst.jobs[j].id] = Fraction(c - lo, 2)
    return State(frozenset(running), frozenset(completed), progress)


def point_feasible(inst: Instance, geom: Geometry, x: StatePoint) -> bool:
    if not _in_box(x.coords2, geom):
        raise ValueError(f"point {x.values} lies outside the orthotope")
    return FeasibilityChecker(inst, geom).point_ok(x.coords2)


def segment_feasible(
    inst: Instance, geom: Geometry, x: StatePoint, delta: Sequence[int], t: int
) -> bool:
    """Feasibility of the segment ending at ``x``, i.e. [x - t*delta, x].

    A zero direction is an idle step and is feasible only when nothing is
    running at ``x``.
    """
    delta = tuple(delta)
    start2 = tuple(c - 2 * t * d for c, d in zip(x.coords2, delta))
    if not (_in_box(start2, geom) and _in_box(x.coords2, geom)):
        raise ValueError("segment leaves the orthotope")
    return FeasibilityChecker(inst, geom).segment_ok2(start2, delta, 2 * t)


def path_to_schedule(inst: Instance, geom: Geometry, path: Sequence[Segment]) -> Schedule:
    """Start times of the schedule that walks ``path`` from the origin.

    Job i of chain l starts when coordinate l leaves L_l^{i-1}.
    """
    starts: dict[str, int] = {}
    time = 0
    for seg in path:
        for l, d in enumerate(seg.delta):
            if not d:
                continue
            c = seg.start[l]
            pre = geom.prefix_sums[l]
            for i in range(len(pre) - 1):
                if c <= pre[i] < c + seg.t:
                    starts[inst.jobs[geom.chain_jobs[l][i]].id] = time + pre[i] - c
        time += seg.t
    return Schedule(starts)


def schedule_to_path(inst: Instance, geom: Geometry, sched: Schedule) -> list[Segment]:
    """Maximal constant-running-set segments of the path a schedule walks.

    Segments run between consecutive job start and end times; idle stretches
    become zero-direction segments. ``path_to_schedule`` inverts this.
    """
    events = sorted({0} | {sched.starts[j.id] for j in inst.jobs} | {sched.starts[j.id] + j.p for j in inst.jobs})
    chain_of = {j: l for l, chain in enumerate(geom.chain_jobs) for j in chain}
    path = []
    pos = [0] * geom.w
    for a, b in zip(events, events[1:]):
        delta = [0] * geom.w
        for j, job in enumerate(inst.jobs):
            if sched.starts[job.id] <= a < sched.starts[job.id] + job.p:
                delta[chain_of[j]] = 1
        path.append(Segment(tuple(pos), tuple(delta), b - a))
        pos = [c + (b - a) * d for c, d in zip(pos, delta)]
    return path


def merge_segments(steps: Sequence[Segment]) -> list[Segment]:
    out: list[Segment] = []
    for s in steps:
        if out and out[-1].delta == s.delta and out[-1].end == s.start:
            out[-1] = Segment(out[-1].start, s.delta, out[-1].t + s.t)
        else:
            out.append(s)
    return out


def directions(w: int) -> list[Direction]:
    """Nonzero directions in lexicographic order."""
    return [d for d in itertools.product((0, 1), repeat=w) if any(d)]


def servakh_solve(inst: Instance, budget: int | None = None) -> Solution:
    """Optimal schedule by a shortest feasible unit-step path from 0 to L.

    Points are settled in lexicographic order; every unit step goes to a
    lexicographically larger point, so each value is final when its point is
    popped. Only reachable feasible points are ever stored. Ties between
    equally short predecessors go to the lexicographically smallest
    direction.
    """
    geom = Geometry.build(inst)
    budget = default_budget() if budget is None else budget
    if geom.volume() > budget:
        raise BudgetExceeded(
            f"orthotope has {geom.volume()} lattice points (budget {budget}); "
            "use corridor_solve with a lag bound instead"
        )
    chk = FeasibilityChecker(inst, geom)
    origin: Point = (0,) * geom.w
    corner = geom.corner
    w = geom.w
    dirs = directions(w)
    # per chain, indexed by integer coordinate: job strictly running there,
    # job running on (c, c+1), and completed mask
    still, move, done = [], [], []
    for l, chain in enumerate(geom.chain_jobs):
        pre = geom.prefix_sums[l]
        st, mv, dn = [-1] * (corner[l] + 1), [-1] * (corner[l] + 1), [0] * (corner[l] + 1)
        for i, j in enumerate(chain):
            for c in range(pre[i], pre[i + 1]):
                mv[c] = j
                if c > pre[i]:
                    st[c] = j
        for c in range(corner[l] + 1):
            i = bisect_right(pre, c) - 1
            dn[c] = chk.done_prefix[l][i]
        still.append(st)
        move.append(mv)
        done.append(dn)
    ok_cache: dict[tuple, bool] = {}

    def ok(running: tuple[int, ...], mask: int) -> bool:
        key = (running, mask)
        hit = ok_cache.get(key)
        if hit is None:
            hit = ok_cache[key] = chk._ok(list(running), mask)
        return hit

    point_cache: dict[Point, bool] = {}

    def point_ok(x: Point) -> bool:
        hit = point_cache.get(x)
        if hit is None:
            mask = 0
            for l in range(w):
                mask |= done[l][x[l]]
            run = tuple(still[l][x[l]] for l in range(w) if still[l][x[l]] >= 0)
            hit = point_cache[x] = ok(run, mask)
        return hit

    best: dict[Point, int] = {origin: 0}
    via: dict[Point, Direction] = {}
    heap = [origin]
    while heap:
        y = heapq.heappop(heap)
        if y == corner:
            break
        py = best[y] + 1
        mask = 0
        for l in range(w):
            mask |= done[l][y[l]]
        for d in dirs:
            run = []
            for l in range(w):
                c = y[l]
                if d[l]:
                    if c == corner[l]:
                        break
                    run.append(move[l][c])
                else:
                    j = still[l][c]
                    if j >= 0:
                        break  # a running job cannot pause
            else:
                if not ok(tuple(run), mask):
                    continue
                x = tuple(a + b for a, b in zip(y, d))
                if not point_ok(x):
                    continue
                cur = best.get(x)
                if cur is None:
                    best[x] = py
                    via[x] = d
                    heapq.heappush(heap, x)
                elif py < cur or (py == cur and d < via[x]):
                    best[x] = py
                    via[x] = d
    if corner not in best:
        raise RuntimeError("corner unreachable; the serial schedule should always exist")

    steps = []
    x = corner
    while x != origin:
        d = via[x]
        y = tuple(a - b for a, b in zip(x, d))
        steps.append(Segment(y, d, 1))
        x = y
    path = merge_segments(steps[::-1])
    sched = path_to_schedule(inst, geom, path)
    assert makespan(inst, sched) == best[corner]
    return Solution(sched, best[corner], tuple(path))
