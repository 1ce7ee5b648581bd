"""Minimum chain decomposition of the precedence order and earliest starts."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .core import Instance, Schedule, bits


@dataclass(frozen=True)
class ChainDecomposition:
    chains: tuple[tuple[str, ...], ...]

    def __len__(self) -> int:
        return len(self.chains)

    def to_dict(self) -> dict:
        return {"width": len(self.chains), "chains": [list(c) for c in self.chains]}


@dataclass(frozen=True)
class EarliestStarts:
    sigma: Mapping[str, int]

    def __getitem__(self, jid: str) -> int:
        return self.sigma[jid]

    def as_schedule(self) -> Schedule:
        return Schedule(dict(self.sigma))


def _max_matching(n: int, adj: list[list[int]]) -> list[int]:
    """Kuhn's augmenting-path matching; returns ``match_right[v] = u`` or -1."""
    match_right = [-1] * n

    def augment(u: int, seen: list[bool]) -> bool:
        # iterative DFS; recursion depth would grow with chain length
        stack = [(u, iter(adj[u]))]
        path: list[tuple[int, int]] = []
        while stack:
            node, it = stack[-1]
            advanced = False
            for v in it:
                if seen[v]:
                    continue
                seen[v] = True
                if match_right[v] == -1:
                    path.append((node, v))
                    for a, b in path:
                        match_right[b] = a
                    return True
                path.append((node, v))
                stack.append((match_right[v], iter(adj[match_right[v]])))
                advanced = True
                break
            if not advanced:
                stack.pop()
                if path:
                    path.pop()
        return False

    for u in range(n):
        augment(u, [False] * n)
    return match_right


def chain_decompose(inst: Instance) -> ChainDecomposition:
    """Minimum chain cover via maximum matching on the closed order.

    Each matched pair (u, v) means v directly follows u on a chain, so the
    number of chains is n minus the matching size, which by Dilworth's
    theorem equals the width. Vertices are processed in declaration order.
    """
    n = inst.n
    adj = [bits(inst.succ_mask[u]) for u in range(n)]
    match_right = _max_matching(n, adj)
    nxt = [-1] * n
    for v, u in enumerate(match_right):
        if u != -1:
            nxt[u] = v
    heads = [v for v in range(n) if match_right[v] == -1]
    chains = []
    for h in heads:
        chain = []
        u = h
        while u != -1:
            chain.append(inst.jobs[u].id)
            u = nxt[u]
        chains.append(tuple(chain))
    return ChainDecomposition(tuple(chains))


def width(inst: Instance) -> int:
    return len(chain_decompose(inst))


def earliest_starts(inst: Instance) -> EarliestStarts:
    sigma = [0] * inst.n
    for v in inst.topo_order:
        sigma[v] = max((sigma[u] + inst.jobs[u].p for u in bits(inst.pred_mask[v])), default=0)
    return EarliestStarts({j.id: sigma[i] for i, j in enumerate(inst.jobs)})


def schedule_lag(inst: Instance, sched: Schedule) -> int:
    """Largest delay of a job behind its earliest start.

    Raises ValueError if ``sched`` violates a precedence constraint.
    """
    s = sched.starts
    for j in inst.jobs:
        for i in bits(inst.pred_mask[inst.index[j.id]]):
            pi = inst.jobs[i]
            if s[pi.id] + pi.p > s[j.id]:
                raise ValueError(f"schedule violates precedence {pi.id} -> {j.id}")
    sigma = earliest_starts(inst)
    return max((s[j.id] - sigma[j.id] for j in inst.jobs), default=0)
