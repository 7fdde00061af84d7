"""Random software-defined UAV network generation.

UAVs hover at a common altitude over a square area, so inter-UAV distances
are planar.  Links follow a free-space path-loss model: two UAVs are
connected when the SNR of their line-of-sight channel clears a threshold.
Flow routes are minimum-hop paths between random non-retiring endpoints.
"""

from collections import deque
from dataclasses import dataclass, field
import math
import random

from .errors import NonPositiveDistance, SamplingExhausted, Unreachable


@dataclass(frozen=True)
class RadioParams:
    """Carrier, transmit power, noise floor, and the link SNR threshold."""

    carrier_freq: float = 3.0e9
    light_speed: float = 3.0e8
    tx_power: float = 1.0
    noise_power: float = 1.0e-16
    snr_threshold_db: float = 85.0

    def __post_init__(self):
        for name in ("carrier_freq", "light_speed", "tx_power", "noise_power"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"{name} must be positive and finite, got {value!r}")
        if math.isnan(self.snr_threshold_db) or self.snr_threshold_db <= 0:
            raise ValueError(f"snr_threshold_db must be positive, got {self.snr_threshold_db!r}")


@dataclass(frozen=True)
class HoverParams:
    """Constants of the hover-power model."""

    gravity: float = 9.8
    prop_radius: float = 0.2
    num_props: int = 4
    air_density: float = 1.225

    def __post_init__(self):
        for name in ("gravity", "prop_radius", "num_props", "air_density"):
            value = getattr(self, name)
            if not value > 0:
                raise ValueError(f"{name} must be positive, got {value!r}")


@dataclass(frozen=True)
class NetworkParams:
    num_uavs: int = 40
    area_side: float = 150.0
    common_altitude: float = 70.0
    mass_choices: tuple[float, ...] = (1.0, 2.0, 3.0, 4.0, 5.0)
    radio: RadioParams = field(default_factory=RadioParams)
    hover: HoverParams = field(default_factory=HoverParams)

    def __post_init__(self):
        if self.num_uavs < 2:
            raise ValueError(f"num_uavs must be at least 2, got {self.num_uavs}")
        if not self.area_side > 0:
            raise ValueError(f"area_side must be positive, got {self.area_side!r}")
        if not self.mass_choices:
            raise ValueError("mass_choices must not be empty")


@dataclass(frozen=True)
class UavNetwork:
    """Placed UAVs with masses, hover powers, and the SNR-derived link graph.

    ``links[u]`` is the ascending tuple of u's neighbours; the adjacency is
    symmetric, irreflexive, and recomputable from positions.
    """

    positions: tuple[tuple[float, float], ...]
    masses: tuple[float, ...]
    hover_powers: tuple[float, ...]
    links: tuple[tuple[int, ...], ...]

    @property
    def num_uavs(self) -> int:
        return len(self.positions)

    def has_link(self, u: int, v: int) -> bool:
        return v in self.links[u]


def path_loss(distance: float, radio: RadioParams) -> float:
    """Free-space path loss in dB over a line-of-sight link of given length."""
    if not distance > 0:
        raise NonPositiveDistance(f"distance must be positive, got {distance!r}")
    return 20.0 * math.log10(4.0 * math.pi * radio.carrier_freq * distance / radio.light_speed)


def snr_at_distance(distance: float, radio: RadioParams) -> float:
    """Link SNR in dB at a given separation."""
    return (
        10.0 * math.log10(radio.tx_power)
        - path_loss(distance, radio)
        - 10.0 * math.log10(radio.noise_power)
    )


def snr(u: int, v: int, net: UavNetwork, radio: RadioParams) -> float:
    """SNR in dB between two distinct UAVs of the network."""
    if u == v:
        raise ValueError("SNR is defined between distinct UAVs")
    (xu, yu), (xv, yv) = net.positions[u], net.positions[v]
    return snr_at_distance(math.hypot(xu - xv, yu - yv), radio)


def hover_power(mass: float, hover: HoverParams) -> float:
    """Hover power in watts of a UAV of the given mass."""
    if mass < 0:
        raise ValueError(f"mass must be non-negative, got {mass!r}")
    weight = mass * hover.gravity
    return math.sqrt(weight**3 / (2.0 * math.pi * hover.prop_radius**2 * hover.num_props * hover.air_density))


def network_from_layout(params: NetworkParams, positions, masses) -> UavNetwork:
    """Assemble a network from explicit positions and masses.

    Hover powers and the link graph are recomputed, so a network round-trips
    through serialization without storing derived data.
    """
    positions = tuple((float(x), float(y)) for x, y in positions)
    masses = tuple(float(m) for m in masses)
    if len(positions) != params.num_uavs or len(masses) != params.num_uavs:
        raise ValueError("positions and masses must match params.num_uavs")
    powers = tuple(hover_power(m, params.hover) for m in masses)
    n = len(positions)
    neighbours: list[list[int]] = [[] for _ in range(n)]
    threshold = params.radio.snr_threshold_db
    for u in range(n):
        for v in range(u + 1, n):
            if snr_at_distance(
                math.hypot(positions[u][0] - positions[v][0], positions[u][1] - positions[v][1]),
                params.radio,
            ) >= threshold:
                neighbours[u].append(v)
                neighbours[v].append(u)
    return UavNetwork(
        positions=positions,
        masses=masses,
        hover_powers=powers,
        links=tuple(tuple(sorted(nb)) for nb in neighbours),
    )


def generate_network(params: NetworkParams, seed: int) -> UavNetwork:
    """Sample a network: uniform positions over the square, uniform masses."""
    rng = random.Random(seed)
    positions = [(rng.uniform(0.0, params.area_side), rng.uniform(0.0, params.area_side)) for _ in range(params.num_uavs)]
    masses = [rng.choice(params.mass_choices) for _ in range(params.num_uavs)]
    return network_from_layout(params, positions, masses)


def shortest_route(net: UavNetwork, src: int, dst: int) -> tuple[int, ...]:
    """Minimum-hop route from src to dst; ties broken by smallest-id predecessor."""
    if src == dst:
        raise ValueError("route endpoints must differ")
    dist = {src: 0}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        if u == dst:
            break
        du = dist[u]
        for v in net.links[u]:
            if v not in dist:
                dist[v] = du + 1
                queue.append(v)
    if dst not in dist:
        raise Unreachable(f"no path from {src} to {dst}")
    path = [dst]
    node = dst
    while node != src:
        node = min(v for v in net.links[node] if dist.get(v, -1) == dist[path[-1]] - 1)
        path.append(node)
    path.reverse()
    return tuple(path)


def sample_retired_set(net: UavNetwork, count: int, rng: random.Random) -> frozenset[int]:
    """Pick the retiring UAVs uniformly without replacement."""
    if not 0 <= count < net.num_uavs:
        raise ValueError(f"retiring count must be in [0, {net.num_uavs}), got {count}")
    return frozenset(rng.sample(range(net.num_uavs), count))


def sample_flow_routes(net, retired, n_flows: int, rng: random.Random, max_attempts: int = 1000):
    """Sample flow routes between random non-retiring endpoints.

    Endpoint pairs that turn out unreachable are rejected and redrawn, up to
    ``max_attempts`` times per flow.
    """
    candidates = sorted(set(range(net.num_uavs)) - set(retired))
    if len(candidates) < 2:
        raise SamplingExhausted("fewer than two UAVs remain in service")
    routes = []
    for fid in range(n_flows):
        for _ in range(max_attempts):
            src, dst = rng.sample(candidates, 2)
            try:
                route = shortest_route(net, src, dst)
            except Unreachable:
                continue
            routes.append((fid, route))
            break
        else:
            raise SamplingExhausted(
                f"could not route flow {fid} after {max_attempts} attempts; network too sparse"
            )
    return tuple(routes)


def sample_scenario(net: UavNetwork, n_flows: int, n_retired: int, seed: int):
    """Sample a replacement scenario: the retiring set first, then the flows."""
    rng = random.Random(seed)
    retired = sample_retired_set(net, n_retired, rng)
    routes = sample_flow_routes(net, retired, n_flows, rng)
    return routes, retired


def params_to_json(params: NetworkParams) -> dict:
    return {
        "num_uavs": params.num_uavs,
        "area_side": params.area_side,
        "common_altitude": params.common_altitude,
        "mass_choices": list(params.mass_choices),
        "radio": {
            "carrier_freq": params.radio.carrier_freq,
            "light_speed": params.radio.light_speed,
            "tx_power": params.radio.tx_power,
            "noise_power": params.radio.noise_power,
            "snr_threshold_db": params.radio.snr_threshold_db,
        },
        "hover": {
            "gravity": params.hover.gravity,
            "prop_radius": params.hover.prop_radius,
            "num_props": params.hover.num_props,
            "air_density": params.hover.air_density,
        },
    }


def params_from_json(data: dict) -> NetworkParams:
    """Parse network parameters, filling omitted fields with defaults."""
    if not isinstance(data, dict):
        raise ValueError("network params must be an object")
    radio_data = data.get("radio", {})
    hover_data = data.get("hover", {})
    radio = RadioParams(
        carrier_freq=float(radio_data.get("carrier_freq", 3.0e9)),
        light_speed=float(radio_data.get("light_speed", 3.0e8)),
        tx_power=float(radio_data.get("tx_power", 1.0)),
        noise_power=float(radio_data.get("noise_power", 1.0e-16)),
        snr_threshold_db=float(radio_data.get("snr_threshold_db", 85.0)),
    )
    hover = HoverParams(
        gravity=float(hover_data.get("gravity", 9.8)),
        prop_radius=float(hover_data.get("prop_radius", 0.2)),
        num_props=int(hover_data.get("num_props", 4)),
        air_density=float(hover_data.get("air_density", 1.225)),
    )
    return NetworkParams(
        num_uavs=int(data.get("num_uavs", 40)),
        area_side=float(data.get("area_side", 150.0)),
        common_altitude=float(data.get("common_altitude", 70.0)),
        mass_choices=tuple(float(m) for m in data.get("mass_choices", (1.0, 2.0, 3.0, 4.0, 5.0))),
        radio=radio,
        hover=hover,
    )


def network_to_json(params: NetworkParams, net: UavNetwork) -> dict:
    return {
        "params": params_to_json(params),
        "uavs": [
            {"id": u, "x": net.positions[u][0], "y": net.positions[u][1], "mass_kg": net.masses[u]}
            for u in range(net.num_uavs)
        ],
    }


def network_from_json(data: dict) -> tuple[NetworkParams, UavNetwork]:
    if not isinstance(data, dict) or "params" not in data or "uavs" not in data:
        raise ValueError("network JSON needs 'params' and 'uavs'")
    params = params_from_json(data["params"])
    uavs = data["uavs"]
    if not isinstance(uavs, list) or len(uavs) != params.num_uavs:
        raise ValueError("'uavs' must list exactly params.num_uavs entries")
    by_id = {}
    for entry in uavs:
        by_id[int(entry["id"])] = entry
    if sorted(by_id) != list(range(params.num_uavs)):
        raise ValueError("UAV ids must be dense 0..num_uavs-1")
    positions = [(float(by_id[u]["x"]), float(by_id[u]["y"])) for u in range(params.num_uavs)]
    masses = [float(by_id[u]["mass_kg"]) for u in range(params.num_uavs)]
    return params, network_from_layout(params, positions, masses)


def scenario_to_json(params: NetworkParams, net: UavNetwork, retired, routes) -> dict:
    """Network JSON extended with a retiring set and routed flows."""
    doc = network_to_json(params, net)
    doc["retired"] = sorted(retired)
    doc["flows"] = [{"id": fid, "route": list(route)} for fid, route in routes]
    return doc


def scenario_from_json(data: dict):
    """Parse an extended network JSON into (params, net, retired, routes)."""
    params, net = network_from_json(data)
    if "retired" not in data or "flows" not in data:
        raise ValueError("scenario JSON needs 'retired' and 'flows'")
    retired = frozenset(int(u) for u in data["retired"])
    if not retired <= set(range(net.num_uavs)):
        raise ValueError("'retired' references unknown UAV ids")
    routes = []
    for entry in data["flows"]:
        routes.append((int(entry["id"]), tuple(int(u) for u in entry["route"])))
    return params, net, retired, tuple(routes)
