"""Shared fixtures-free helpers: reference instances and random generators."""

from itertools import permutations
import random

from uavsched.model import (
    DEFAULT_TIMINGS,
    ReplacementInstance,
    RuleTimings,
    instance_from_parts,
)

# Reference four-flow/five-UAV worked example: T in seconds, all hover
# powers 100 W.  Flow 0 crosses UAVs 0,1,2; flows 1..3 cross two UAVs each.
REF_TIMES = (0.040, 0.030, 0.030, 0.030)
REF_DELTAS = (frozenset({0, 1, 2}), frozenset({0, 3}), frozenset({2, 3}), frozenset({3, 4}))
REF_POWERS = (100.0,) * 5


def reference_instance() -> ReplacementInstance:
    return instance_from_parts(REF_TIMES, REF_DELTAS, REF_POWERS)


# Routed reconstruction of the same example over a 14-node network:
# nodes 0..4 are the retiring UAVs, 5..13 stay in service.  Six flows, two
# of which avoid the retiring set entirely.
ROUTED_EXAMPLE_RETIRED = (0, 1, 2, 3, 4)
ROUTED_EXAMPLE_ROUTES = (
    (0, (5, 0, 1, 2, 6)),   # crosses a run of three retiring relays -> 40 ms
    (1, (7, 0, 3, 8)),      # two consecutive retiring relays -> 30 ms
    (2, (9, 2, 3, 10)),
    (3, (11, 3, 4, 12)),
    (4, (5, 6)),            # stays clear of the retiring set
    (5, (13, 7, 9)),
)


def dyadic_time(rng: random.Random) -> float:
    # multiples of 2^-10 s inside [5, 60] ms keep every downstream float
    # operation exact, so solver cross-checks can assert == on energies
    return rng.randint(6, 61) / 1024.0


def random_instance(
    rng: random.Random,
    max_n: int = 7,
    max_m: int = 6,
    min_n: int = 1,
    dyadic: bool = True,
    timings: RuleTimings = DEFAULT_TIMINGS,
) -> ReplacementInstance:
    n = rng.randint(min_n, max_n)
    m = rng.randint(1, max_m)
    times = tuple(dyadic_time(rng) if dyadic else rng.uniform(0.005, 0.060) for _ in range(n))
    deltas = tuple(frozenset(rng.sample(range(m), rng.randint(1, m))) for _ in range(n))
    powers = tuple(float(rng.randint(20, 310)) for _ in range(m))
    return instance_from_parts(times, deltas, powers, timings=timings)


def feasible_sequences(instance):
    """Yield every linear arrangement of combined indices that respects the
    flow-before-its-UAV dependencies (the independent oracle for the ILP)."""
    n, m = instance.n, instance.m
    required = []
    for flow in instance.flows:
        for j in flow.retired_set:
            required.append((flow.id + 1, n + 1 + j))
    for seq in permutations(range(1, n + m + 1)):
        pos = {k: p for p, k in enumerate(seq)}
        if all(pos[a] < pos[b] for a, b in required):
            yield seq
