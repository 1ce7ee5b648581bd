"""Brute-force references used to check every solver and reduction.

Nothing here shares code with the solvers beyond the data model; the point
is to be obviously correct, not fast.
"""

from __future__ import annotations

import itertools
import os
import random
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterator

from .core import BudgetExceeded, Instance, Job, Resource, Schedule
from .shuffle import DsInstance, ShuffleInstance


@dataclass(frozen=True)
class OracleBudget:
    max_states: int = 10**7
    max_horizon: int = 10**4

    def __post_init__(self) -> None:
        if self.max_states < 1 or self.max_horizon < 1:
            raise ValueError("oracle budgets must be positive")

    @classmethod
    def default(cls) -> "OracleBudget":
        env = os.environ.get("SCHED_BUDGET_STATES")
        return cls(max_states=int(env)) if env else cls()


def _earliest(inst: Instance) -> list[int]:
    # recomputed here on purpose so the oracle does not lean on chains.py
    sigma = [0] * inst.n
    for v in inst.topo_order:
        for u in range(inst.n):
            if inst.pred_mask[v] >> u & 1:
                sigma[v] = max(sigma[v], sigma[u] + inst.jobs[u].p)
    return sigma


def _enumerate(inst: Instance, lo: list[int], hi: list[int], budget: OracleBudget, prune: bool):
    """Depth-first search over start vectors with lo[j] <= s_j <= hi[j].

    Yields (makespan, starts) for feasible vectors. With ``prune`` only
    strictly improving vectors are yielded.
    """
    n = inst.n
    p = [j.p for j in inst.jobs]
    dem = [[j.demand(r.id) for r in inst.resources] for j in inst.jobs]
    caps = [r.capacity for r in inst.resources]
    horizon = max((h + q for h, q in zip(hi, p)), default=0)
    if horizon > budget.max_horizon:
        raise BudgetExceeded(f"horizon {horizon} exceeds oracle budget {budget.max_horizon}")
    usage = [[0] * (horizon + 1) for _ in caps]
    preds = [[u for u in range(n) if inst.pred_mask[v] >> u & 1] for v in range(n)]
    order = inst.topo_order
    starts = [0] * n
    best = [horizon + 1]
    nodes = [0]

    def fits(j: int, s: int) -> bool:
        for r, cap in enumerate(caps):
            d = dem[j][r]
            if d and any(usage[r][t] + d > cap for t in range(s, s + p[j])):
                return False
        return True

    def place(j: int, s: int, sign: int) -> None:
        for r in range(len(caps)):
            d = dem[j][r] * sign
            if d:
                for t in range(s, s + p[j]):
                    usage[r][t] += d

    def rec(k: int, ms: int):
        nodes[0] += 1
        if nodes[0] > budget.max_states:
            raise BudgetExceeded(f"oracle explored more than {budget.max_states} nodes")
        if k == n:
            if not prune or ms < best[0]:
                best[0] = ms
                yield ms, list(starts)
            return
        j = order[k]
        first = max([lo[j]] + [starts[i] + p[i] for i in preds[j]])
        for s in range(first, hi[j] + 1):
            if prune and s + p[j] >= best[0]:
                break
            if fits(j, s):
                starts[j] = s
                place(j, s, 1)
                yield from rec(k + 1, max(ms, s + p[j]))
                place(j, s, -1)

    yield from rec(0, 0)


def _as_schedule(inst: Instance, starts: list[int]) -> Schedule:
    return Schedule({j.id: starts[i] for i, j in enumerate(inst.jobs)})


def brute_force_search(
    inst: Instance, lam: int | None = None, budget: OracleBudget | None = None
) -> tuple[int, Schedule] | None:
    """Minimum makespan and a witness schedule, optionally with lag <= lam."""
    budget = budget or OracleBudget.default()
    # every feasible schedule starts j no earlier than sigma_j, and a left
    # shift fits any optimum inside [0, sum of p]
    lo = _earliest(inst)
    if lam is None:
        total = inst.total_processing()
        hi = [total - j.p for j in inst.jobs]
    else:
        if lam < 0:
            raise ValueError("lag bound must be non-negative")
        hi = [s + lam for s in lo]
    result = None
    for ms, starts in _enumerate(inst, lo, hi, budget, prune=True):
        result = (ms, _as_schedule(inst, starts))
    return result


def brute_force_optimal(inst: Instance, budget: OracleBudget | None = None) -> int:
    found = brute_force_search(inst, None, budget)
    if found is None:
        raise RuntimeError("no feasible schedule found; the serial schedule always fits")
    return found[0]


def brute_force_lag_optimal(
    inst: Instance, lam: int, budget: OracleBudget | None = None
) -> int | None:
    found = brute_force_search(inst, lam, budget)
    return None if found is None else found[0]


def iter_feasible_schedules(
    inst: Instance, lam: int, budget: OracleBudget | None = None
) -> Iterator[Schedule]:
    """Every feasible schedule with sigma_j <= s_j <= sigma_j + lam."""
    budget = budget or OracleBudget.default()
    lo = _earliest(inst)
    hi = [s + lam for s in lo]
    for _, starts in _enumerate(inst, lo, hi, budget, prune=False):
        yield _as_schedule(inst, starts)


def brute_force_shuffle(inst: ShuffleInstance, budget: OracleBudget | None = None) -> bool:
    budget = budget or OracleBudget.default()
    src = inst.sources
    t = inst.target
    if sum(map(len, src)) != len(t):
        return False
    space = 1
    for s in src:
        space *= len(s) + 1
    if space > budget.max_states:
        raise BudgetExceeded(f"{space} prefix states exceed oracle budget {budget.max_states}")

    @lru_cache(maxsize=None)
    def ok(pos: tuple[int, ...]) -> bool:
        m = sum(pos)
        if m == len(t):
            return True
        return any(
            pos[i] < len(s) and s[pos[i]] == t[m] and ok(pos[:i] + (pos[i] + 1,) + pos[i + 1 :])
            for i, s in enumerate(src)
        )

    return ok((0,) * len(src))


def brute_force_dominating_set(g: DsInstance) -> bool:
    """Is there a dominating set with at most k vertices?"""
    closed = {v: {v} for v in range(1, g.n + 1)}
    for u, v in g.edges:
        closed[u].add(v)
        closed[v].add(u)
    everyone = set(closed)
    for size in range(0, min(g.k, g.n) + 1):
        for D in itertools.combinations(sorted(everyone), size):
            if set().union(*(closed[d] for d in D)) >= everyone:
                return True
    return False


def max_antichain_size(inst: Instance) -> int:
    n = inst.n
    for size in range(n, 0, -1):
        for combo in itertools.combinations(range(n), size):
            mask = 0
            for v in combo:
                mask |= 1 << v
            if all(inst.pred_mask[v] & mask == 0 for v in combo):
                return size
    return 0


def random_instance(
    rng: random.Random,
    n_jobs: int = 6,
    p_max: int = 3,
    n_resources: int = 2,
    max_width: int | None = 3,
    edge_prob: float = 0.35,
) -> Instance:
    """Random small instance; resamples until the width bound holds."""
    while True:
        resources = [Resource(f"r{k}", rng.randint(1, 3)) for k in range(n_resources)]
        jobs = []
        for i in range(n_jobs):
            demands = {r.id: rng.randint(0, r.capacity) for r in resources}
            jobs.append(Job(f"j{i}", rng.randint(1, p_max), demands))
        edges = [
            (f"j{a}", f"j{b}")
            for a in range(n_jobs)
            for b in range(a + 1, n_jobs)
            if rng.random() < edge_prob
        ]
        inst = Instance(tuple(jobs), tuple(resources), tuple(edges))
        if max_width is None or max_antichain_size(inst) <= max_width:
            return inst
