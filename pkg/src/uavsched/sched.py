"""Handover schedulers: score heuristic, random baseline, and exact solvers.

The exact optimum is found with a subset dynamic program over flow sets:
because handover times add up the same way in any order, the elapsed time
after a set of flows is order-free, and a retiring UAV's cost is charged at
the step that completes the last of its flows.  A brute-force permutation
enumerator serves as an independent oracle at small sizes.
"""

from dataclasses import dataclass
from itertools import permutations
import random
import time

from .errors import InstanceTooLarge
from .model import ReplacementInstance, Schedule, compute_energy, evaluate_order

EXACT_CAP_DEFAULT = 22
BRUTE_FORCE_CAP = 8


@dataclass(frozen=True)
class ScoreTable:
    """Per-UAV drain-out times H_j and per-flow urgency scores S_i (J/s^2)."""

    h: tuple[float, ...]
    s: tuple[float, ...]


@dataclass(frozen=True)
class SolverResult:
    schedule: Schedule
    energy: float
    method: str
    wall_time: float


def _result(instance: ReplacementInstance, order, method: str, wall_time: float) -> SolverResult:
    # energy is always the compute_energy re-evaluation of the schedule
    schedule = Schedule(order=tuple(order))
    energy = compute_energy(instance, schedule).total_energy
    return SolverResult(schedule=schedule, energy=energy, method=method, wall_time=wall_time)


def score_table(instance: ReplacementInstance) -> ScoreTable:
    """Compute H_j (total handover time pinned on UAV j) and S_i = sum P_j/H_j."""
    times = instance.times
    h = [0.0] * instance.m
    for j, members in enumerate(instance.flow_sets):
        total = 0.0
        for i in members:
            total += times[i]
        h[j] = total
    powers = instance.powers
    s = []
    for flow in instance.flows:
        score = 0.0
        for j in sorted(flow.retired_set):
            score += powers[j] / h[j]
        s.append(score)
    return ScoreTable(h=tuple(h), s=tuple(s))


def heuristic_schedule(instance: ReplacementInstance) -> SolverResult:
    """Hand over flows in descending score order; ties go to the lower flow id."""
    start = time.perf_counter()
    table = score_table(instance)
    scores = table.s
    order = sorted(range(instance.n), key=lambda i: (-scores[i], i))
    wall = time.perf_counter() - start
    return _result(instance, order, "heuristic", wall)


def random_schedule(instance: ReplacementInstance, seed: int) -> SolverResult:
    """Uniformly random handover order from the given seed."""
    start = time.perf_counter()
    rng = random.Random(seed)
    order = list(range(instance.n))
    rng.shuffle(order)
    wall = time.perf_counter() - start
    return _result(instance, order, "random", wall)


def exact_schedule_dp(instance: ReplacementInstance, max_flows: int = EXACT_CAP_DEFAULT) -> SolverResult:
    """Globally optimal schedule via dynamic programming over flow subsets.

    State g(S) is the minimum remaining energy once the flow set S has been
    handed over; adding flow f charges elapsed(S | {f}) times the total power
    of the UAVs whose last flow is f.  Among co-optimal schedules the
    lexicographically greatest is returned, deliberately opposite to the
    brute-force tie rule so that equivalence checks cannot pass by tie luck.
    """
    n = instance.n
    if n > max_flows:
        raise InstanceTooLarge(f"exact solver capped at {max_flows} flows, instance has {n}")
    start = time.perf_counter()
    times = instance.times
    powers = instance.powers

    # completing[f]: (power, mask of the other flows of that UAV) for each
    # UAV whose pin set contains f; the UAV finishes when those flows and f
    # are all in the handed-over set.
    flow_masks = [0] * instance.m
    for j, members in enumerate(instance.flow_sets):
        mask = 0
        for i in members:
            mask |= 1 << i
        flow_masks[j] = mask
    completing: list[tuple[tuple[float, int], ...]] = [() for _ in range(n)]
    for f in range(n):
        entries = []
        for j in sorted(instance.flows[f].retired_set):
            entries.append((powers[j], flow_masks[j] & ~(1 << f)))
        completing[f] = tuple(entries)

    size = 1 << n
    elapsed = [0.0] * size
    for mask in range(1, size):
        low = mask & -mask
        elapsed[mask] = elapsed[mask ^ low] + times[low.bit_length() - 1]

    inf = float("inf")
    g = [0.0] * size
    for state in range(size - 2, -1, -1):
        best = inf
        for f in range(n):
            if state >> f & 1:
                continue
            succ = state | (1 << f)
            gain = 0.0
            for power, required in completing[f]:
                if state & required == required:
                    gain += power
            cand = elapsed[succ] * gain + g[succ]
            if cand < best:
                best = cand
        g[state] = best

    order = []
    state = 0
    while state != size - 1:
        target = g[state]
        chosen = -1
        for f in range(n - 1, -1, -1):
            if state >> f & 1:
                continue
            succ = state | (1 << f)
            gain = 0.0
            for power, required in completing[f]:
                if state & required == required:
                    gain += power
            if elapsed[succ] * gain + g[succ] == target:
                chosen = f
                break
        order.append(chosen)
        state |= 1 << chosen
    wall = time.perf_counter() - start
    return _result(instance, order, "exact_dp", wall)


def brute_force_schedule(instance: ReplacementInstance, max_flows: int = BRUTE_FORCE_CAP) -> SolverResult:
    """Enumerate every permutation; return the lexicographically smallest minimizer."""
    n = instance.n
    if n > max_flows:
        raise InstanceTooLarge(f"brute force capped at {max_flows} flows, instance has {n}")
    start = time.perf_counter()
    best_order = tuple(range(n))
    best_energy = evaluate_order(instance, best_order)
    for order in permutations(range(n)):
        energy = evaluate_order(instance, order)
        if energy < best_energy:
            best_energy = energy
            best_order = order
    wall = time.perf_counter() - start
    return _result(instance, best_order, "brute_force", wall)
