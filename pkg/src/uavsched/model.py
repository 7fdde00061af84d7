"""Replacement instances, rule-timing model, and hovering-energy evaluation.

An instance couples data flows that must be re-routed with the relays that
are waiting to power down.  Handing over flow i costs time T_i (a weighted
count of forwarding-rule deletions, insertions, and modifications); relay j
keeps hovering at power P_j until the last flow crossing it has been moved.
The energy of a handover order is therefore sum_j P_j * C_j, where C_j is
the cumulative finish time of the last flow of relay j.
"""

from dataclasses import dataclass
from functools import cached_property
import math

from .errors import (
    EmptyInstance,
    EndpointRetired,
    InvalidInstance,
    InvalidSchedule,
)


@dataclass(frozen=True)
class RuleTimings:
    """Per-rule update delays of the SDN controller, in seconds."""

    tau_del: float = 0.005
    tau_ins: float = 0.005
    tau_mod: float = 0.010

    def __post_init__(self):
        for name in ("tau_del", "tau_ins", "tau_mod"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise InvalidInstance(f"{name} must be a positive finite duration, got {value!r}")

    @classmethod
    def from_milliseconds(cls, tau_del_ms: float, tau_ins_ms: float, tau_mod_ms: float) -> "RuleTimings":
        return cls(tau_del_ms / 1000.0, tau_ins_ms / 1000.0, tau_mod_ms / 1000.0)


DEFAULT_TIMINGS = RuleTimings()


@dataclass(frozen=True)
class RuleCounts:
    """Number of forwarding rules to delete, insert, and modify for one handover."""

    r_del: int
    r_ins: int
    r_mod: int

    def __post_init__(self):
        for name in ("r_del", "r_ins", "r_mod"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 0:
                raise InvalidInstance(f"{name} must be a non-negative integer, got {value!r}")


@dataclass(frozen=True)
class FlowSpec:
    """One flow that crosses the retiring set.

    ``retired_set`` holds the dense ids of the retiring UAVs this flow
    traverses; ``rule_counts`` is kept when the flow was derived from a
    concrete route and is None for instances given directly in time form.
    """

    id: int
    handover_time: float
    retired_set: frozenset[int]
    rule_counts: RuleCounts | None = None


@dataclass(frozen=True)
class RetiredUav:
    """One UAV scheduled to leave service, with the flows that pin it down."""

    id: int
    hover_power: float
    flow_set: frozenset[int]

    def __post_init__(self):
        if not (math.isfinite(self.hover_power) and self.hover_power >= 0):
            raise InvalidInstance(f"hover_power must be non-negative, got {self.hover_power!r}")


def handover_time(counts: RuleCounts, timings: RuleTimings) -> float:
    """Time to hand over one flow: weighted sum of its rule-change counts."""
    return counts.r_del * timings.tau_del + counts.r_ins * timings.tau_ins + counts.r_mod * timings.tau_mod


def rule_counts_from_route(route, retired) -> RuleCounts:
    """Rule changes needed to detour a route around its retiring relays.

    Every retiring relay on the route needs its two adjacent rules replaced
    (one delete at the old relay, one insert at its substitute); each maximal
    run of consecutive retiring relays additionally needs the predecessor's
    forwarding rule modified once.
    """
    nodes = list(route)
    if len(nodes) < 2 or len(set(nodes)) != len(nodes):
        raise ValueError(f"route must contain at least two distinct nodes, got {nodes!r}")
    retired = set(retired)
    if nodes[0] in retired or nodes[-1] in retired:
        raise EndpointRetired(f"route endpoints {nodes[0]!r}/{nodes[-1]!r} may not be retiring UAVs")
    hits = 0
    runs = 0
    previous_retired = False
    for node in nodes:
        here = node in retired
        if here:
            hits += 1
            if not previous_retired:
                runs += 1
        previous_retired = here
    return RuleCounts(r_del=hits, r_ins=hits, r_mod=runs)


@dataclass(frozen=True)
class ReplacementInstance:
    """Flows, retiring UAVs, and the rule timings they were derived under.

    Identifiers are dense (flows 0..n-1, UAVs 0..m-1) and the membership
    maps are dual: UAV j appears in flow i's retired_set exactly when flow i
    appears in UAV j's flow_set.
    """

    flows: tuple[FlowSpec, ...]
    uavs: tuple[RetiredUav, ...]
    timings: RuleTimings = DEFAULT_TIMINGS

    def __post_init__(self):
        n, m = len(self.flows), len(self.uavs)
        for i, flow in enumerate(self.flows):
            if flow.id != i:
                raise InvalidInstance(f"flow ids must be dense 0..{n - 1}, found {flow.id} at index {i}")
            if not flow.retired_set:
                raise InvalidInstance(f"flow {i} crosses no retiring UAV and does not belong in an instance")
            if not flow.retired_set <= set(range(m)):
                raise InvalidInstance(f"flow {i} references unknown UAV ids {sorted(flow.retired_set)}")
            if not (math.isfinite(flow.handover_time) and flow.handover_time > 0):
                raise InvalidInstance(f"flow {i} needs a positive handover time, got {flow.handover_time!r}")
            if flow.rule_counts is not None:
                expected = handover_time(flow.rule_counts, self.timings)
                if abs(flow.handover_time - expected) > 1e-9 * max(1.0, abs(expected)):
                    raise InvalidInstance(
                        f"flow {i}: handover_time {flow.handover_time} does not match "
                        f"its rule counts under the instance timings ({expected})"
                    )
        for j, uav in enumerate(self.uavs):
            if uav.id != j:
                raise InvalidInstance(f"UAV ids must be dense 0..{m - 1}, found {uav.id} at index {j}")
            if not uav.flow_set <= set(range(n)):
                raise InvalidInstance(f"UAV {j} references unknown flow ids {sorted(uav.flow_set)}")
        for i, flow in enumerate(self.flows):
            for j in flow.retired_set:
                if i not in self.uavs[j].flow_set:
                    raise InvalidInstance(f"duality violated: flow {i} lists UAV {j} but not vice versa")
        for j, uav in enumerate(self.uavs):
            for i in uav.flow_set:
                if j not in self.flows[i].retired_set:
                    raise InvalidInstance(f"duality violated: UAV {j} lists flow {i} but not vice versa")

    @property
    def n(self) -> int:
        return len(self.flows)

    @property
    def m(self) -> int:
        return len(self.uavs)

    @cached_property
    def times(self) -> tuple[float, ...]:
        return tuple(flow.handover_time for flow in self.flows)

    @cached_property
    def powers(self) -> tuple[float, ...]:
        return tuple(uav.hover_power for uav in self.uavs)

    @cached_property
    def flow_sets(self) -> tuple[tuple[int, ...], ...]:
        return tuple(tuple(sorted(uav.flow_set)) for uav in self.uavs)


def instance_from_parts(times, deltas, powers, timings: RuleTimings = DEFAULT_TIMINGS) -> ReplacementInstance:
    """Build an instance from handover times, per-flow UAV sets, and powers.

    The per-UAV flow sets are derived from the given deltas by duality.
    """
    m = len(powers)
    lambdas: list[set[int]] = [set() for _ in range(m)]
    flows = []
    for i, (t, delta) in enumerate(zip(times, deltas)):
        delta = frozenset(delta)
        for j in delta:
            lambdas[j].add(i)
        flows.append(FlowSpec(id=i, handover_time=t, retired_set=delta))
    uavs = [RetiredUav(id=j, hover_power=p, flow_set=frozenset(lambdas[j])) for j, p in enumerate(powers)]
    return ReplacementInstance(flows=tuple(flows), uavs=tuple(uavs), timings=timings)


@dataclass(frozen=True)
class Schedule:
    """A handover order: the flow identifiers in processing sequence."""

    order: tuple[int, ...]


@dataclass(frozen=True)
class EnergyReport:
    """Energy bill of one schedule: per-UAV out-of-service times and the total."""

    completion_times: tuple[float, ...]
    total_energy: float
    flow_finish_times: tuple[float, ...]


def ensure_valid_schedule(instance: ReplacementInstance, schedule: Schedule) -> None:
    """Raise InvalidSchedule unless the order is a permutation of the flow ids."""
    order = schedule.order
    n = instance.n
    if len(order) != n or set(order) != set(range(n)):
        raise InvalidSchedule(f"schedule {order!r} is not a permutation of 0..{n - 1}")


def evaluate_order(instance: ReplacementInstance, order) -> float:
    """Total hovering energy of a flow order; assumes a valid permutation."""
    times = instance.times
    finish = [0.0] * instance.n
    t = 0.0
    for f in order:
        t += times[f]
        finish[f] = t
    total = 0.0
    for power, members in zip(instance.powers, instance.flow_sets):
        c = 0.0
        for i in members:
            fi = finish[i]
            if fi > c:
                c = fi
        total += power * c
    return total


def compute_energy(instance: ReplacementInstance, schedule: Schedule) -> EnergyReport:
    """Evaluate a schedule: flow finish times, per-UAV completions, total energy."""
    ensure_valid_schedule(instance, schedule)
    times = instance.times
    finish = [0.0] * instance.n
    t = 0.0
    for f in schedule.order:
        t += times[f]
        finish[f] = t
    completions = []
    total = 0.0
    for power, members in zip(instance.powers, instance.flow_sets):
        c = 0.0
        for i in members:
            fi = finish[i]
            if fi > c:
                c = fi
        completions.append(c)
        total += power * c
    return EnergyReport(
        completion_times=tuple(completions),
        total_energy=total,
        flow_finish_times=tuple(finish),
    )


@dataclass(frozen=True)
class InstanceBuild:
    """An instance plus the stable maps from dense ids back to the inputs."""

    instance: ReplacementInstance
    flow_ids: tuple[int, ...]
    uav_ids: tuple[int, ...]


def build_instance(flows, retired_uavs, timings: RuleTimings = DEFAULT_TIMINGS) -> InstanceBuild:
    """Derive a replacement instance from routed flows and a retiring set.

    ``flows`` is a sequence of (flow_id, route) pairs, ``retired_uavs`` a
    sequence of (uav_id, hover_power) pairs.  Flows that do not cross any
    retiring UAV are dropped; surviving identifiers are re-densified in
    input order (flows) and ascending id order (UAVs), with the original
    ids returned alongside.
    """
    flows = list(flows)
    retired_uavs = sorted(retired_uavs, key=lambda item: item[0])
    if not flows and not retired_uavs:
        raise EmptyInstance("no flows and no retiring UAVs given")
    uav_original = [uid for uid, _ in retired_uavs]
    if len(set(uav_original)) != len(uav_original):
        raise ValueError(f"retiring UAV ids must be unique, got {uav_original!r}")
    dense_of_uav = {uid: j for j, uid in enumerate(uav_original)}
    retired_ids = set(uav_original)

    seen_flow_ids = set()
    kept_specs = []
    kept_original = []
    lambdas: list[set[int]] = [set() for _ in retired_uavs]
    for fid, route in flows:
        if fid in seen_flow_ids:
            raise ValueError(f"duplicate flow id {fid!r}")
        seen_flow_ids.add(fid)
        nodes = list(route)
        if len(nodes) < 2 or len(set(nodes)) != len(nodes):
            raise ValueError(f"flow {fid}: route must contain at least two distinct nodes, got {nodes!r}")
        hit = retired_ids.intersection(nodes)
        if not hit:
            continue
        counts = rule_counts_from_route(nodes, retired_ids)
        dense_id = len(kept_specs)
        delta = frozenset(dense_of_uav[u] for u in hit)
        for j in delta:
            lambdas[j].add(dense_id)
        kept_specs.append(
            FlowSpec(
                id=dense_id,
                handover_time=handover_time(counts, timings),
                retired_set=delta,
                rule_counts=counts,
            )
        )
        kept_original.append(fid)

    uavs = tuple(
        RetiredUav(id=j, hover_power=power, flow_set=frozenset(lambdas[j]))
        for j, (_, power) in enumerate(retired_uavs)
    )
    instance = ReplacementInstance(flows=tuple(kept_specs), uavs=uavs, timings=timings)
    return InstanceBuild(instance=instance, flow_ids=tuple(kept_original), uav_ids=tuple(uav_original))


def instance_to_json(instance: ReplacementInstance) -> dict:
    """Abstract-instance JSON form (times in milliseconds)."""
    flows = []
    for flow in instance.flows:
        entry = {
            "id": flow.id,
            "t_ms": flow.handover_time * 1000.0,
            "delta": sorted(flow.retired_set),
        }
        if flow.rule_counts is not None:
            counts = flow.rule_counts
            entry["rule_counts"] = {"r_del": counts.r_del, "r_ins": counts.r_ins, "r_mod": counts.r_mod}
        flows.append(entry)
    return {
        "timings": {
            "tau_del_ms": instance.timings.tau_del * 1000.0,
            "tau_ins_ms": instance.timings.tau_ins * 1000.0,
            "tau_mod_ms": instance.timings.tau_mod * 1000.0,
        },
        "flows": flows,
        "uavs": [{"id": uav.id, "p_watts": uav.hover_power} for uav in instance.uavs],
    }


def instance_from_json(data: dict) -> ReplacementInstance:
    """Parse the abstract-instance JSON form; ValueError on schema problems."""
    if not isinstance(data, dict):
        raise ValueError("instance JSON must be an object")
    timings_obj = data.get("timings", {})
    if not isinstance(timings_obj, dict):
        raise ValueError("'timings' must be an object")
    timings = RuleTimings.from_milliseconds(
        float(timings_obj.get("tau_del_ms", 5.0)),
        float(timings_obj.get("tau_ins_ms", 5.0)),
        float(timings_obj.get("tau_mod_ms", 10.0)),
    )
    raw_flows = data.get("flows")
    raw_uavs = data.get("uavs")
    if not isinstance(raw_flows, list) or not isinstance(raw_uavs, list):
        raise ValueError("instance JSON needs 'flows' and 'uavs' arrays")

    m = len(raw_uavs)
    lambdas: list[set[int]] = [set() for _ in range(m)]
    flows = []
    for position, entry in enumerate(raw_flows):
        if not isinstance(entry, dict):
            raise ValueError(f"flow #{position} must be an object")
        fid = int(entry.get("id", position))
        delta = entry.get("delta")
        if not isinstance(delta, list) or not delta:
            raise ValueError(f"flow {fid}: 'delta' must be a non-empty list of UAV ids")
        counts = None
        if "rule_counts" in entry:
            rc = entry["rule_counts"]
            counts = RuleCounts(int(rc["r_del"]), int(rc["r_ins"]), int(rc["r_mod"]))
        if "t_ms" in entry:
            t = float(entry["t_ms"]) / 1000.0
            if counts is not None:
                expected = handover_time(counts, timings)
                if abs(t - expected) > 1e-9 * max(1.0, abs(expected)):
                    raise ValueError(f"flow {fid}: t_ms contradicts rule_counts under the given timings")
        elif counts is not None:
            t = handover_time(counts, timings)
        else:
            raise ValueError(f"flow {fid}: needs 't_ms' or 'rule_counts'")
        delta_set = frozenset(int(j) for j in delta)
        for j in delta_set:
            if not 0 <= j < m:
                raise ValueError(f"flow {fid}: delta references unknown UAV id {j}")
            lambdas[j].add(fid)
        flows.append(FlowSpec(id=fid, handover_time=t, retired_set=delta_set, rule_counts=counts))

    uavs = []
    for position, entry in enumerate(raw_uavs):
        if not isinstance(entry, dict) or "p_watts" not in entry:
            raise ValueError(f"uav #{position} must be an object with 'p_watts'")
        uid = int(entry.get("id", position))
        if not 0 <= uid < m:
            raise ValueError(f"uav id {uid} out of range")
        uavs.append(RetiredUav(id=uid, hover_power=float(entry["p_watts"]), flow_set=frozenset(lambdas[uid])))

    # entries may appear in any order in the file; ids must still be dense
    flows.sort(key=lambda f: f.id)
    uavs.sort(key=lambda u: u.id)
    try:
        return ReplacementInstance(flows=tuple(flows), uavs=tuple(uavs), timings=timings)
    except InvalidInstance as exc:
        raise ValueError(str(exc)) from exc
