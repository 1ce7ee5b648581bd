import json
import logging
import random

import pytest

from rcpsp_lattice.chains import width
from rcpsp_lattice.core import InstanceError, Schedule
from rcpsp_lattice.lattice import servakh_solve
from rcpsp_lattice.oracle import brute_force_optimal, brute_force_shuffle
from rcpsp_lattice.reductions import (
    NoInstance,
    ReductionOutput,
    decode,
    decode_partition,
    decode_shuffle,
    ds_to_p2,
    floor_is_forced,
    partition_to_p2chains,
    shuffle_to_p2,
    slot_times,
)
from rcpsp_lattice.shuffle import DsInstance, ShuffleInstance, WitnessMapping, validate_witness


def multisets(total, largest=None):
    largest = largest or total
    if total == 0:
        yield []
        return
    for a in range(min(total, largest), 0, -1):
        for rest in multisets(total - a, a):
            yield [a] + rest


def has_equal_split(values):
    reachable = {0}
    for a in values:
        reachable |= {r + a for r in reachable}
    return sum(values) % 2 == 0 and sum(values) // 2 in reachable


def test_partition_123():
    out = partition_to_p2chains([1, 2, 3])
    assert out.target == 27
    jobs = out.instance.jobs
    assert len(jobs) == 3 + 4 + 4
    assert sorted(j.p for j in jobs if j.id.startswith("j1") or j.id.startswith("j2")) == [6] * 8
    assert width(out.instance) == 3
    sol = servakh_solve(out.instance)
    assert sol.makespan == 27
    split = decode_partition(out, sol.schedule)
    assert sum(split) == 3


def test_partition_odd_sum_is_no_instance():
    out = partition_to_p2chains([1, 2])
    assert isinstance(out, NoInstance) and not out
    assert out.to_dict()["result"] == "no-instance"


def test_partition_11():
    out = partition_to_p2chains([1, 1])
    assert out.target == 7
    sol = servakh_solve(out.instance)
    assert sol.makespan == 7 == brute_force_optimal(out.instance)
    assert decode_partition(out, sol.schedule) == (1,)


def test_partition_rejects_bad_values():
    with pytest.raises(InstanceError):
        partition_to_p2chains([])
    with pytest.raises(InstanceError):
        partition_to_p2chains([2, 0])


def test_partition_decode_rejects_late_schedule():
    out = partition_to_p2chains([1, 1])
    late = servakh_solve(out.instance).schedule.shifted(1)
    assert decode_partition(out, late) is None


def test_partition_round_trip_all_small_multisets():
    """Every multiset with sum <= 12: equal split exists iff the optimum meets T."""
    for total in range(1, 13):
        for values in multisets(total):
            out = partition_to_p2chains(values)
            if total % 2:
                assert isinstance(out, NoInstance)
                continue
            sol = servakh_solve(out.instance)
            yes = sol.makespan <= out.target
            assert yes == has_equal_split(values), values
            if yes:
                split = decode_partition(out, sol.schedule)
                assert split is not None and 2 * sum(split) == total


def test_shuffle_12_example():
    out = shuffle_to_p2(ShuffleInstance(("12",), "12"))
    workers = [j for j in out.instance.jobs if j.id.startswith("w")]
    floor = [j for j in out.instance.jobs if j.id.startswith("z")]
    assert [j.p for j in workers] == [1, 2]
    assert len(floor) == 6
    assert out.target == 5
    sol = servakh_solve(out.instance)
    assert sol.makespan == 5
    assert floor_is_forced(out, sol.schedule)
    assert decode_shuffle(out, sol.schedule).maps == ((0, 1),)


def test_shuffle_count_mismatch_is_no_instance():
    assert isinstance(shuffle_to_p2(ShuffleInstance(("2",), "1")), NoInstance)


def test_shuffle_rejects_other_letters():
    with pytest.raises(ValueError):
        shuffle_to_p2(ShuffleInstance(("ab",), "ab"))


def test_shuffle_width_pledge():
    for k in (1, 2, 3):
        sources = tuple("1" for _ in range(k))
        assert width(shuffle_to_p2(ShuffleInstance(sources, "1" * k)).instance) == k + 2


def test_slot_times():
    assert slot_times("121") == [0, 2, 5]


def test_shuffle_decode_rejects_late_schedule():
    out = shuffle_to_p2(ShuffleInstance(("12",), "12"))
    late = servakh_solve(out.instance).schedule.shifted(1)
    assert decode_shuffle(out, late) is None


def test_shuffle_round_trip_sample():
    rng = random.Random(17)
    for _ in range(40):
        k = rng.randint(1, 3)
        sources = tuple("".join(rng.choice("12") for _ in range(rng.randint(1, 2))) for _ in range(k))
        letters = list("".join(sources))
        rng.shuffle(letters)
        inst = ShuffleInstance(sources, "".join(letters))
        out = shuffle_to_p2(inst)
        sol = servakh_solve(out.instance)
        yes = sol.makespan <= out.target
        assert yes == brute_force_shuffle(inst)
        if yes:
            assert floor_is_forced(out, sol.schedule)
            w = decode_shuffle(out, sol.schedule)
            assert w is not None and validate_witness(inst, w)


def test_ds_to_p2_single_vertex():
    g = DsInstance(1, frozenset(), 1)
    out = ds_to_p2(g)
    assert out.codec["kind"] == "ds"
    sol = servakh_solve(out.instance)
    assert sol.makespan == out.target
    assert decode(out, sol.schedule) == {1}


def test_ds_to_p2_warns_when_too_big(caplog):
    g = DsInstance(3, frozenset({(1, 3)}), 2)
    with caplog.at_level(logging.WARNING):
        out = ds_to_p2(g)
    assert out.instance.n > 1000
    assert "shuffle layer" in caplog.text


def test_reduction_json_round_trip():
    out = partition_to_p2chains([1, 2, 3])
    raw = json.loads(json.dumps(out.to_dict(), sort_keys=True))
    back = ReductionOutput.from_dict(raw)
    assert back.instance == out.instance and back.target == out.target and back.codec == out.codec
    sched = servakh_solve(back.instance).schedule
    assert sum(decode(back, sched)) == 3


def test_decode_dispatch_unknown_kind():
    out = partition_to_p2chains([1, 1])
    bad = ReductionOutput(out.instance, out.target, {"kind": "knapsack"})
    with pytest.raises(InstanceError):
        decode(bad, Schedule({}))
    single = shuffle_to_p2(ShuffleInstance(("1",), "1"))
    assert isinstance(decode(single, servakh_solve(single.instance).schedule), WitnessMapping)
