"""Acceptance criteria 1-8.

Each test prints one ``PASS``/``FAIL`` line, also under pytest's output
capture. Run with ``pytest tests/test_acceptance.py -v`` or directly with
``python tests/test_acceptance.py``.
"""

import itertools
import random
import sys
import time

import pytest

from rcpsp_lattice.chains import schedule_lag, width
from rcpsp_lattice.core import is_feasible
from rcpsp_lattice.corridor import BaselinePath, build_gamma, corridor_solve, in_corridor, path_point
from rcpsp_lattice.lattice import path_to_schedule, schedule_to_path, servakh_solve
from rcpsp_lattice.oracle import (
    brute_force_dominating_set,
    brute_force_lag_optimal,
    brute_force_optimal,
    brute_force_shuffle,
    iter_feasible_schedules,
    random_instance,
)
from rcpsp_lattice.reductions import (
    NoInstance,
    decode_partition,
    decode_shuffle,
    floor_is_forced,
    partition_to_p2chains,
    shuffle_to_p2,
)
from rcpsp_lattice.shuffle import (
    DsInstance,
    ShuffleInstance,
    ds_to_shuffle,
    extract_dominating_set,
    shuffle_member,
    validate_blocks,
    validate_witness,
)

RANDOM_INSTANCES = 200
LAGS = (0, 1, 2, 3)


def _instances():
    rng = random.Random(2024)
    return [random_instance(rng, n_jobs=6, p_max=3, n_resources=2, max_width=3) for _ in range(RANDOM_INSTANCES)]


def report(number, title, ok, elapsed, limit, detail=""):
    within = limit is None or elapsed < limit
    verdict = "PASS" if ok and within else "FAIL"
    budget = f" (limit {limit:g}s)" if limit is not None else ""
    line = f"{verdict} criterion {number}: {title} [{elapsed:.2f}s{budget}] {detail}".rstrip()
    print(line, flush=True)
    return ok and within


def criterion_1():
    start = time.perf_counter()
    inst = ShuffleInstance(("acbb", "bbc", "cab"), "acbcbbcabb")
    w = shuffle_member(inst)
    ok = w is not None and bool(validate_witness(inst, w))
    return report(1, "three-word shuffle accepted with a valid witness", ok, time.perf_counter() - start, 1.0)


def criterion_2():
    start = time.perf_counter()
    g = DsInstance(3, frozenset({(1, 3)}), 2)
    inst = ds_to_shuffle(g)
    blocks_ok = bool(validate_blocks(inst, g))
    states = 1
    for s in inst.sources:
        states *= len(s) + 1
    w = shuffle_member(inst)
    D = extract_dominating_set(g, w) if w is not None else set()
    ok = blocks_ok and w is not None and len(D) <= g.k and g.dominates(D) and brute_force_dominating_set(g)
    detail = f"blocks={'ok' if blocks_ok else 'bad'} state bound={states} D={sorted(D)}"
    return report(2, "dominating set pipeline (n=3, edge {1,3}, k=2)", ok, time.perf_counter() - start, 120.0, detail)


def criterion_3():
    start = time.perf_counter()
    out = partition_to_p2chains([1, 2, 3])
    sol = servakh_solve(out.instance)
    split = decode_partition(out, sol.schedule)
    w = width(out.instance)
    odd = partition_to_p2chains([1, 2])
    ok = (
        out.target == 27
        and sol.makespan == 27
        and w == 3
        and split is not None
        and 2 * sum(split) == 6
        and isinstance(odd, NoInstance)
    )
    detail = f"makespan={sol.makespan} width={w} split={split} {{1,2}}->{odd.to_dict()['result'] if isinstance(odd, NoInstance) else odd}"
    return report(3, "partition reduction on {1,2,3}", ok, time.perf_counter() - start, 5.0, detail)


def criterion_4(instances):
    start = time.perf_counter()
    bad = 0
    for inst in instances:
        sol = servakh_solve(inst)
        if sol.makespan != brute_force_optimal(inst) or not is_feasible(inst, sol.schedule):
            bad += 1
    detail = f"{len(instances)} instances, {bad} mismatches"
    return report(4, "servakh_solve == brute-force optimum", bad == 0, time.perf_counter() - start, 120.0, detail)


def criterion_5(instances):
    start = time.perf_counter()
    bad = 0
    nones = 0
    for inst in instances:
        for lam in LAGS:
            sol = corridor_solve(inst, lam)
            ref = brute_force_lag_optimal(inst, lam)
            got = None if sol is None else sol.makespan
            nones += got is None
            if got != ref:
                bad += 1
            elif sol is not None and (not is_feasible(inst, sol.schedule) or schedule_lag(inst, sol.schedule) > lam):
                bad += 1
        if corridor_solve(inst, inst.total_processing()).makespan != servakh_solve(inst).makespan:
            bad += 1
    detail = f"{len(instances) * len(LAGS)} (instance, lag) pairs, {nones} none verdicts, {bad} mismatches"
    return report(5, "corridor_solve == lag-bounded oracle", bad == 0, time.perf_counter() - start, 300.0, detail)


def _segment_trials(rng, instances, wanted):
    trials = violations = 0
    while trials < wanted:
        inst = rng.choice(instances)
        bp = BaselinePath.build(inst)
        lam = rng.choice(LAGS)
        t0 = rng.randint(0, bp.horizon + 2)
        x = tuple(max(0, v - rng.randint(0, lam)) for v in bp.point(t0))
        d = tuple(rng.randint(0, 1) for _ in x)
        t = rng.randint(1, 8)
        end = tuple(a + t * b for a, b in zip(x, d))
        if any(e > c for e, c in zip(end, bp.geom.corner)) or not in_corridor(bp, lam, end, t0 + t):
            continue
        trials += 1
        for tau in range(1, t):
            if not in_corridor(bp, lam, tuple(a + tau * b for a, b in zip(x, d)), t0 + tau):
                violations += 1
                break
    return trials, violations


def criterion_6(instances):
    start = time.perf_counter()
    sample = instances[:60]
    schedules = corridor_bad = cube_bad = gamma_bad = round_trip_bad = 0
    for inst in sample:
        bp = BaselinePath.build(inst)
        geom = bp.geom
        for lam in LAGS:
            gamma = build_gamma(inst, lam, bp)
            for sched in iter_feasible_schedules(inst, lam):
                schedules += 1
                path = schedule_to_path(inst, geom, sched)
                if path_to_schedule(inst, geom, path) != sched:
                    round_trip_bad += 1
                horizon = max(sched.starts[j.id] + j.p for j in inst.jobs) + lam
                q = [path_point(inst, geom, sched.starts, t) for t in range(horizon + 1)]
                if not all(in_corridor(bp, lam, x, t) for t, x in enumerate(q)):
                    corridor_bad += 1
                if not all(
                    in_corridor(bp, 2 * lam, q[t1], t2 + lam)
                    for t2 in range(horizon - lam + 1)
                    for t1 in range(t2, t2 + lam + 1)
                ):
                    cube_bad += 1
                if not all(seg.start in gamma and seg.end in gamma for seg in path):
                    gamma_bad += 1
    trials, segment_bad = _segment_trials(random.Random(5), instances, 10_000)
    bad = corridor_bad + segment_bad + cube_bad + gamma_bad + round_trip_bad
    detail = (
        f"{schedules} oracle schedules: corridored violations={corridor_bad}, "
        f"path round-trip violations={round_trip_bad}, big-cube violations={cube_bad}, "
        f"segment endpoints outside Gamma={gamma_bad}; {trials} segment trials, {segment_bad} violations"
    )
    return report(6, "corridor property suites", bad == 0, time.perf_counter() - start, None, detail)


def _random_shuffle_instance(rng):
    k = rng.randint(1, 3)
    total = rng.randint(k, 8)
    cuts = sorted(rng.sample(range(1, total), k - 1))
    lengths = [b - a for a, b in zip([0] + cuts, cuts + [total])]
    sources = tuple("".join(rng.choice("12") for _ in range(n)) for n in lengths)
    if rng.random() < 0.5:
        order = [i for i, s in enumerate(sources) for _ in s]
        rng.shuffle(order)
        pos = [0] * k
        target = []
        for i in order:
            target.append(sources[i][pos[i]])
            pos[i] += 1
        return ShuffleInstance(sources, "".join(target))
    letters = list("".join(sources))
    rng.shuffle(letters)
    return ShuffleInstance(sources, "".join(letters))


def criterion_7():
    start = time.perf_counter()
    rng = random.Random(7)
    seen = set()
    bad = yes = 0
    while len(seen) < 500:
        inst = _random_shuffle_instance(rng)
        key = (inst.sources, inst.target)
        if key in seen:
            continue
        seen.add(key)
        out = shuffle_to_p2(inst)
        truth = brute_force_shuffle(inst)
        sol = servakh_solve(out.instance)
        verdict = sol.makespan <= out.target
        if verdict != truth:
            bad += 1
            continue
        if verdict:
            yes += 1
            w = decode_shuffle(out, sol.schedule)
            if not floor_is_forced(out, sol.schedule) or w is None or not validate_witness(inst, w):
                bad += 1
    detail = f"{len(seen)} distinct instances ({yes} yes), {bad} failures"
    return report(7, "shuffle <-> two-machine scheduling round trip", bad == 0, time.perf_counter() - start, 300.0, detail)


def criterion_8():
    start = time.perf_counter()
    checked = bad = 0
    for n in (1, 2, 3):
        pairs = list(itertools.combinations(range(1, n + 1), 2))
        for r in range(len(pairs) + 1):
            for edges in itertools.combinations(pairs, r):
                for k in (1, 2):
                    g = DsInstance(n, frozenset(edges), k)
                    checked += 1
                    if brute_force_dominating_set(g) != (shuffle_member(ds_to_shuffle(g)) is not None):
                        bad += 1
    detail = f"{checked} (graph, k) pairs, {bad} disagreements"
    return report(8, "dominating set <-> shuffle equivalence", bad == 0, time.perf_counter() - start, None, detail)


@pytest.fixture(scope="module")
def instances():
    return _instances()


def test_criterion_1_three_word_shuffle(capsys):
    with capsys.disabled():
        ok = criterion_1()
    assert ok


def test_criterion_2_dominating_set_pipeline(capsys):
    with capsys.disabled():
        ok = criterion_2()
    assert ok


def test_criterion_3_partition_reduction(capsys):
    with capsys.disabled():
        ok = criterion_3()
    assert ok


def test_criterion_4_servakh_vs_oracle(instances, capsys):
    with capsys.disabled():
        ok = criterion_4(instances)
    assert ok


def test_criterion_5_corridor_vs_lag_oracle(instances, capsys):
    with capsys.disabled():
        ok = criterion_5(instances)
    assert ok


def test_criterion_6_corridor_properties(instances, capsys):
    with capsys.disabled():
        ok = criterion_6(instances)
    assert ok


def test_criterion_7_shuffle_scheduling_round_trip(capsys):
    with capsys.disabled():
        ok = criterion_7()
    assert ok


def test_criterion_8_dominating_set_shuffle(capsys):
    with capsys.disabled():
        ok = criterion_8()
    assert ok


if __name__ == "__main__":
    data = _instances()
    results = [
        criterion_1(),
        criterion_2(),
        criterion_3(),
        criterion_4(data),
        criterion_5(data),
        criterion_6(data),
        criterion_7(),
        criterion_8(),
    ]
    sys.exit(0 if all(results) else 1)
