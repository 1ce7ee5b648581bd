"""Lag-bounded exact solver restricted to a corridor around the earliest-start path.

A schedule of lag at most ``lam`` follows a path that never leaves
``p(t) - lam <= q(t) <= p(t)``, where ``p`` is the path of the earliest-start
schedule. Endpoints of its maximal constant-running-set segments lie in the
union Gamma of 2|J| boxes of edge 2*lam anchored on ``p``, so the shortest path
DP only visits points of Gamma and jumps between them.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Mapping, Sequence

from .chains import EarliestStarts, earliest_starts
from .core import BudgetExceeded, Instance, Schedule, makespan
from .lattice import (
    Direction,
    FeasibilityChecker,
    Geometry,
    Point,
    Segment,
    Solution,
    default_budget,
    directions,
    path_to_schedule,
)


def path_point(inst: Instance, geom: Geometry, starts: Mapping[str, int], t: int) -> Point:
    """State reached at time ``t`` by a precedence-respecting schedule."""
    out = []
    for chain in geom.chain_jobs:
        acc = 0
        for j in chain:
            job = inst.jobs[j]
            acc += min(max(t - starts[job.id], 0), job.p)
        out.append(acc)
    return tuple(out)


@dataclass(frozen=True)
class BaselinePath:
    """Path of the earliest-start schedule; ``point(t)`` is L for t past the horizon."""

    inst: Instance
    geom: Geometry
    sigma: EarliestStarts
    horizon: int

    @classmethod
    def build(cls, inst: Instance, geom: Geometry | None = None) -> "BaselinePath":
        geom = geom or Geometry.build(inst)
        sigma = earliest_starts(inst)
        horizon = max((sigma[j.id] + j.p for j in inst.jobs), default=0)
        return cls(inst, geom, sigma, horizon)

    def point(self, t: int) -> Point:
        if t >= self.horizon:
            return self.geom.corner
        return path_point(self.inst, self.geom, self.sigma.sigma, t)


def baseline_point(bp: BaselinePath, t: int) -> Point:
    return bp.point(t)


def in_corridor(bp: BaselinePath, lam: int, x: Sequence[int], t: int) -> bool:
    y = bp.point(t)
    return all(b - lam <= a <= b for a, b in zip(x, y))


@dataclass(frozen=True)
class Box:
    low: Point
    high: Point

    def __contains__(self, x: Sequence[int]) -> bool:
        return all(lo <= v <= hi for lo, v, hi in zip(self.low, x, self.high))

    def points(self):
        return itertools.product(*(range(lo, hi + 1) for lo, hi in zip(self.low, self.high)))


@dataclass(frozen=True)
class GammaSet:
    lam: int
    boxes: tuple[Box, ...]

    def __contains__(self, x: Sequence[int]) -> bool:
        return any(x in b for b in self.boxes)

    def points(self) -> list[Point]:
        pts: set[Point] = set()
        for b in self.boxes:
            pts.update(b.points())
        return sorted(pts)

    def point_bound(self) -> int:
        total = 0
        for b in self.boxes:
            v = 1
            for lo, hi in zip(b.low, b.high):
                v *= hi - lo + 1
            total += v
        return total


def build_gamma(inst: Instance, lam: int, bp: BaselinePath | None = None) -> GammaSet:
    """Boxes of edge 2*lam anchored at p(sigma_j + lam) and p(sigma_j + p_j + lam)."""
    if lam < 0:
        raise ValueError("lag bound must be non-negative")
    bp = bp or BaselinePath.build(inst)
    boxes: list[Box] = []
    seen: set[Point] = set()
    for j in inst.jobs:
        s = bp.sigma[j.id]
        for anchor_time in (s + lam, s + j.p + lam):
            y = bp.point(anchor_time)
            if y in seen:
                continue
            seen.add(y)
            boxes.append(Box(tuple(max(v - 2 * lam, 0) for v in y), y))
    return GammaSet(lam, tuple(boxes))


def min_jump(gamma: GammaSet, x: Sequence[int], delta: Direction) -> int | None:
    """Smallest t >= 1 with x - t*delta in Gamma, or None.

    Per box with upper corner y the least candidate is
    max({1} | {x_l - y_l : delta_l = 1}); it is kept only if it satisfies
    the box inequalities.
    """
    best = None
    for b in gamma.boxes:
        t = max([1] + [xv - yv for xv, yv, d in zip(x, b.high, delta) if d])
        if best is not None and t >= best:
            continue
        if all(lo <= xv - t * d <= hi for lo, xv, d, hi in zip(b.low, x, delta, b.high)):
            best = t
    return best


def _starts_in_time(
    geom: Geometry, deadline: Sequence[Sequence[int]], y: Point, delta: Direction, t: int, at: int
) -> bool:
    """Every job started by the jump [y, y + t*delta] leaving at time ``at`` meets its deadline."""
    for l, d in enumerate(delta):
        if not d:
            continue
        pre = geom.prefix_sums[l]
        for i in range(len(pre) - 1):
            if y[l] <= pre[i] < y[l] + t and at + pre[i] - y[l] > deadline[l][i]:
                return False
    return True


def corridor_solve(inst: Instance, lam: int, budget: int | None = None) -> Solution | None:
    """Optimal schedule among feasible schedules of lag at most ``lam``.

    Returns None when no such schedule exists. Points of Gamma are settled
    in lexicographic order. For each direction the predecessor is the
    nearest Gamma point behind ``x``; the step is taken only if the segment
    is feasible, ``x`` is still inside the corridor at the arrival time and
    every job started on the way starts by sigma_j + lam. The last check is
    needed because a corridored path can still delay a job by more than
    ``lam`` when its chain idles in the earliest-start schedule. Ties go to
    the lexicographically smallest direction.
    """
    if lam < 0:
        raise ValueError("lag bound must be non-negative")
    geom = Geometry.build(inst)
    if inst.n == 0:
        return Solution(Schedule({}), 0, ())
    bp = BaselinePath.build(inst, geom)
    gamma = build_gamma(inst, lam, bp)
    budget = default_budget() if budget is None else budget
    if gamma.point_bound() > budget:
        raise BudgetExceeded(f"corridor holds up to {gamma.point_bound()} points (budget {budget})")

    deadline = [[bp.sigma[inst.jobs[j].id] + lam for j in chain] for chain in geom.chain_jobs]
    chk = FeasibilityChecker(inst, geom)
    origin: Point = (0,) * geom.w
    dirs = directions(geom.w)
    best: dict[Point, int] = {origin: 0}
    via: dict[Point, tuple[Direction, int]] = {}
    for x in gamma.points():
        if x == origin or not chk.point_ok(tuple(2 * v for v in x)):
            continue
        found = None
        for d in dirs:
            t = min_jump(gamma, x, d)
            if t is None:
                continue
            y = tuple(a - t * b for a, b in zip(x, d))
            py = best.get(y)
            if py is None:
                continue
            length = py + t
            if found is not None and length >= found[0]:
                continue
            if not chk.segment_ok(y, d, t):
                continue
            if not in_corridor(bp, lam, x, length):
                continue
            if not _starts_in_time(geom, deadline, y, d, t, py):
                continue
            found = (length, d, t)
        if found is not None:
            best[x] = found[0]
            via[x] = (found[1], found[2])

    corner = geom.corner
    if corner not in best:
        return None
    steps = []
    x = corner
    while x != origin:
        d, t = via[x]
        y = tuple(a - t * b for a, b in zip(x, d))
        steps.append(Segment(y, d, t))
        x = y
    path = steps[::-1]
    sched = path_to_schedule(inst, geom, path)
    assert makespan(inst, sched) == best[corner]
    return Solution(sched, best[corner], tuple(path))
