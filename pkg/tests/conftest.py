import random

import pytest
from hypothesis import settings

from rcpsp_lattice.core import Instance, Job, Resource
from rcpsp_lattice.oracle import random_instance

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")


def make(jobs, edges=(), caps=None):
    """Instance from (id, p, demands) triples; caps maps resource id to capacity."""
    caps = caps or {}
    return Instance(
        tuple(Job(jid, p, dict(d)) for jid, p, d in jobs),
        tuple(Resource(r, c) for r, c in caps.items()),
        tuple(edges),
    )


def chain(*ps):
    ids = [f"c{i}" for i in range(len(ps))]
    return make([(i, p, {}) for i, p in zip(ids, ps)], list(zip(ids, ids[1:])))


@pytest.fixture
def contending():
    """Two independent unit jobs sharing a capacity-1 resource."""
    return make([("a", 1, {"r": 1}), ("b", 1, {"r": 1})], caps={"r": 1})


def small_instances(seed, count, **kw):
    rng = random.Random(seed)
    return [random_instance(rng, **kw) for _ in range(count)]
