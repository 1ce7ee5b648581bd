"""Shuffle-product membership and the Dominating Set -> binary shuffle reduction.

Positions in witnesses are 0-based; block positions follow the 1-based
numbering used when describing block structure ("the 2hn-th block").
"""

from __future__ import annotations

import itertools
import os
from collections import Counter
from dataclasses import dataclass
from typing import Any, Iterable, Mapping, Sequence

from .core import BudgetExceeded, InstanceError, Verdict, PASS

DEFAULT_SHUFFLE_BUDGET = 10**8


class InvalidWitness(ValueError):
    pass


@dataclass(frozen=True)
class ShuffleInstance:
    sources: tuple[str, ...]
    target: str

    def __post_init__(self) -> None:
        object.__setattr__(self, "sources", tuple(self.sources))

    def counts_match(self) -> bool:
        total: Counter = Counter()
        for s in self.sources:
            total.update(s)
        return total == Counter(self.target)

    def to_dict(self) -> dict:
        return {"sources": list(self.sources), "target": self.target}

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> "ShuffleInstance":
        if not isinstance(raw, Mapping) or set(raw) - {"sources", "target"}:
            raise InstanceError("words JSON must be an object with only 'sources' and 'target'")
        sources = raw["sources"]
        if not all(isinstance(s, str) for s in sources) or not isinstance(raw["target"], str):
            raise InstanceError("words must be strings")
        return cls(tuple(sources), raw["target"])


@dataclass(frozen=True)
class WitnessMapping:
    """maps[i][x] is the target position receiving letter x of source i."""

    maps: tuple[tuple[int, ...], ...]

    def to_dict(self) -> dict:
        return {"maps": [list(m) for m in self.maps]}

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any]) -> "WitnessMapping":
        return cls(tuple(tuple(int(v) for v in m) for m in raw["maps"]))


@dataclass(frozen=True)
class DsInstance:
    n: int
    edges: frozenset[tuple[int, int]]
    k: int

    def __post_init__(self) -> None:
        if self.n < 1:
            raise InstanceError("graph needs at least one vertex")
        if self.k < 1:
            raise InstanceError("solution size k must be at least 1")
        norm = set()
        for u, v in self.edges:
            if not (1 <= u <= self.n and 1 <= v <= self.n) or u == v:
                raise InstanceError(f"bad edge {{{u}, {v}}} for n={self.n}")
            norm.add((min(u, v), max(u, v)))
        object.__setattr__(self, "edges", frozenset(norm))

    def ell(self, u: int, v: int) -> int:
        """1 if v dominates u (same vertex or adjacent), else 2."""
        return 1 if u == v or (min(u, v), max(u, v)) in self.edges else 2

    def dominates(self, D: Iterable[int]) -> bool:
        D = set(D)
        return all(any(self.ell(u, d) == 1 for d in D) for u in range(1, self.n + 1))

    def graph_dict(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in sorted(self.edges)]}

    @classmethod
    def from_dict(cls, raw: Mapping[str, Any], k: int) -> "DsInstance":
        if not isinstance(raw, Mapping) or set(raw) - {"n", "edges"}:
            raise InstanceError("graph JSON must be an object with only 'n' and 'edges'")
        return cls(int(raw["n"]), frozenset((int(u), int(v)) for u, v in raw["edges"]), k)


def validate_witness(inst: ShuffleInstance, w: WitnessMapping) -> Verdict:
    if len(w.maps) != len(inst.sources):
        return Verdict(False, "one map per source required")
    used: set[int] = set()
    t = inst.target
    for i, (s, f) in enumerate(zip(inst.sources, w.maps)):
        if len(f) != len(s):
            return Verdict(False, "map is not total", i)
        for x, pos in enumerate(f):
            if not 0 <= pos < len(t):
                return Verdict(False, "position out of range", (i, x))
            if x and pos <= f[x - 1]:
                return Verdict(False, "map is not increasing", (i, x))
            if t[pos] != s[x]:
                return Verdict(False, "letter mismatch", (i, x))
            if pos in used:
                return Verdict(False, "images overlap", (i, x))
            used.add(pos)
    if len(used) != len(t):
        return Verdict(False, "target not covered")
    return PASS


def shuffle_member(inst: ShuffleInstance, budget: int | None = None) -> WitnessMapping | None:
    """Witness that the target interleaves the sources, or None.

    Level-by-level DP over vectors (i_1, ..., i_k) of consumed letters per
    source; the target position is their sum and only reachable vectors are
    stored. The DP runs on the reversed words so that walking the parent
    pointers back visits the target front to back: every target letter goes
    to the lowest-indexed source that still admits a completion.
    """
    src = tuple(s[::-1] for s in inst.sources)
    t = inst.target[::-1]
    if not inst.counts_match():
        return None
    if budget is None:
        env = os.environ.get("SCHED_BUDGET_STATES")
        budget = int(env) if env else DEFAULT_SHUFFLE_BUDGET
    space = 1
    for s in src:
        space *= len(s) + 1
    if space > budget:
        raise BudgetExceeded(f"{space} prefix states exceed shuffle budget {budget}")

    k = len(src)
    lens = tuple(len(s) for s in src)
    by_letter: dict[str, list[int]] = {}
    for i, s in enumerate(src):
        for c in set(s):
            by_letter.setdefault(c, []).append(i)

    parent: dict[tuple[int, ...], int] = {}
    frontier = [(0,) * k]
    for m, c in enumerate(t):
        cands = by_letter.get(c, [])
        nxt: dict[tuple[int, ...], int] = {}
        for st in frontier:
            for i in cands:
                pos = st[i]
                if pos < lens[i] and src[i][pos] == c:
                    ns = st[:i] + (pos + 1,) + st[i + 1 :]
                    old = nxt.get(ns)
                    if old is None or i < old:
                        nxt[ns] = i
        if not nxt:
            return None
        parent.update(nxt)
        frontier = list(nxt)

    maps: list[list[int]] = [[] for _ in range(k)]
    st = lens
    while any(st):
        i = parent[st]
        maps[i].append(len(t) - sum(st))
        st = st[:i] + (st[i] - 1,) + st[i + 1 :]
    return WitnessMapping(tuple(tuple(m) for m in maps))


def blocks(word: str) -> list[tuple[str, int]]:
    """Maximal single-letter runs as (letter, length)."""
    return [(c, len(list(g))) for c, g in itertools.groupby(word)]


def ds_parameters(g: DsInstance) -> tuple[str, str, int]:
    n, k = g.n, g.k
    A = "".join("a" + "b" * g.ell(u, v) for u in range(1, n + 1) for v in range(1, n + 1))
    B = (("a" * k + "b" * (2 * k)) * (n - 1) + "a" * k + "b" * (2 * k - 1)) * n
    N = 2 * k * (n - 1) + 1
    return A, B, N


def ds_to_shuffle(g: DsInstance) -> ShuffleInstance:
    """Binary shuffle instance with k + 2 sources that is yes iff G has a k-dominating set.

    Sources 1..k are A^N, where A spells the closed adjacency matrix row by
    row (ab for a one, abb for a zero); the last two sources are the a- and
    b-fillers that balance letter counts.
    """
    n, k = g.n, g.k
    A, B, N = ds_parameters(g)
    t = B * N + ("a" * k + "b" * (2 * k)) * (n - 1)
    s = A * N
    extra_a = t.count("a") - k * s.count("a")
    extra_b = t.count("b") - k * s.count("b")
    if extra_a < 0 or extra_b < 0:
        return ShuffleInstance(("",) * (k + 2), "a")
    return ShuffleInstance((s,) * k + ("a" * extra_a, "b" * extra_b), t)


def validate_blocks(inst: ShuffleInstance, g: DsInstance) -> Verdict:
    """Check the five block-structure properties of a ``ds_to_shuffle`` output."""
    n, k = g.n, g.k
    N = 2 * k * (n - 1) + 1
    if len(inst.sources) != k + 2:
        return Verdict(False, "expected k + 2 sources")
    sblocks = [blocks(s) for s in inst.sources[:k]]
    tblocks = blocks(inst.target)

    for i, bl in enumerate(sblocks):
        if len(bl) != 2 * N * n * n:
            return Verdict(False, "(i)", {"source": i, "blocks": len(bl)})
    if len(tblocks) != 2 * N * n * n + 2 * (n - 1):
        return Verdict(False, "(ii)", {"blocks": len(tblocks)})
    for i, bl in enumerate(sblocks):
        for x, (c, size) in enumerate(bl, 1):
            if (c == "a") != (x % 2 == 1) or (c == "a" and size != 1):
                return Verdict(False, "(iii)", {"source": i, "block": x})
    for x, (c, size) in enumerate(tblocks, 1):
        if (c == "a") != (x % 2 == 1) or (c == "a" and size != k):
            return Verdict(False, "(iii)", {"block": x})
    for x, (c, size) in enumerate(tblocks, 1):
        if c != "b":
            continue
        short = x % (2 * n) == 0 and x // (2 * n) <= N * n
        if size != (2 * k - 1 if short else 2 * k):
            return Verdict(False, "(iv)", {"block": x, "length": size})
    for i, bl in enumerate(sblocks):
        for p in range(N):
            for u in range(1, n + 1):
                for v in range(1, n + 1):
                    x = 2 * p * n * n + 2 * n * (u - 1) + 2 * v
                    if bl[x - 1] != ("b", g.ell(u, v)):
                        return Verdict(False, "(v)", {"source": i, "block": x})
    return PASS


def _block_index(word: str) -> tuple[list[int], list[tuple[int, int]]]:
    """1-based block number of each position, and (first, last) position per block."""
    of_pos: list[int] = []
    spans: list[tuple[int, int]] = []
    pos = 0
    for b, (_, size) in enumerate(blocks(word), 1):
        of_pos.extend([b] * size)
        spans.append((pos, pos + size - 1))
        pos += size
    return of_pos, spans


def extract_dominating_set(g: DsInstance, w: WitnessMapping) -> set[int]:
    """Recover a dominating set of size <= k from a shuffle witness.

    The shift of block x of source i is the target block holding its last
    letter minus x. Some period p has every shift constant on its block
    interval; each constant shift 2(n - d) names the dominator d.
    """
    inst = ds_to_shuffle(g)
    check = validate_witness(inst, w)
    if not check:
        raise InvalidWitness(f"witness rejected: {check.reason} at {check.witness}")
    n, k = g.n, g.k
    N = 2 * k * (n - 1) + 1
    t_block, _ = _block_index(inst.target)
    shifts = []
    for i in range(k):
        _, spans = _block_index(inst.sources[i])
        f = w.maps[i]
        shifts.append([t_block[f[last]] - x for x, (_, last) in enumerate(spans, 1)])
    nblocks = 2 * N * n * n
    for p in range(N):
        lo = 2 * p * n * n + 1
        hi = min(2 * (p + 1) * n * n + 1, nblocks)
        if all(len({sh[x - 1] for x in range(lo, hi + 1)}) == 1 for sh in shifts):
            D = set()
            for sh in shifts:
                delta = sh[lo - 1]
                if delta % 2 or not 0 <= delta <= 2 * (n - 1):
                    raise InvalidWitness(f"block shift {delta} does not name a vertex")
                D.add(n - delta // 2)
            if not g.dominates(D):
                raise InvalidWitness(f"decoded set {sorted(D)} does not dominate the graph")
            return D
    raise InvalidWitness("no period with constant block shifts")


def ds_witness(g: DsInstance, D: Sequence[int]) -> WitnessMapping:
    """Shuffle witness built from a dominating set (the forward direction).

    Block x of source i goes into target block x + 2(n - d_i); the fillers
    take whatever positions remain. ``D`` may be shorter than k, in which
    case its last vertex is reused.
    """
    D = list(D)
    if not D or len(D) > g.k or not g.dominates(D):
        raise ValueError(f"{D} is not a dominating set of size at most {g.k}")
    D += [D[-1]] * (g.k - len(D))
    inst = ds_to_shuffle(g)
    _, tspans = _block_index(inst.target)
    fill = [0] * len(tspans)
    taken: set[int] = set()
    maps: list[tuple[int, ...]] = []
    for i, d in enumerate(D):
        f = []
        for x, (_, size) in enumerate(blocks(inst.sources[i]), 1):
            tb = x + 2 * (g.n - d) - 1
            first, last = tspans[tb]
            for _ in range(size):
                pos = first + fill[tb]
                if pos > last:
                    raise ValueError("target block overflow; D does not dominate")
                fill[tb] += 1
                f.append(pos)
                taken.add(pos)
        maps.append(tuple(f))
    rest_a = [q for q, c in enumerate(inst.target) if c == "a" and q not in taken]
    rest_b = [q for q, c in enumerate(inst.target) if c == "b" and q not in taken]
    maps.append(tuple(rest_a))
    maps.append(tuple(rest_b))
    return WitnessMapping(tuple(maps))
