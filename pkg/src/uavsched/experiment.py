"""Monte Carlo evaluation of the schedulers over random networks.

One network is generated per run; for every (flow count, retiring count)
cell the retiring set is fixed (or optionally resampled per iteration) and
fresh flows are drawn each iteration.  Every enabled method schedules the
same instance, so method comparisons are paired.  Per-cell statistics are
the sample mean, its standard error, and the 1.96-sigma confidence
interval.  All randomness derives from the master seed, so results are
independent of execution order and worker count.
"""

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
import csv
import hashlib
import io
import json
import math
from pathlib import Path

from .errors import ConfigInvalid, IoFailure, TooFewSamples
from .model import DEFAULT_TIMINGS, RuleTimings, build_instance, instance_to_json
from .netgen import (
    NetworkParams,
    generate_network,
    params_from_json,
    sample_flow_routes,
    sample_retired_set,
)
from .sched import exact_schedule_dp, heuristic_schedule, random_schedule
import random

METHODS = ("exact_dp", "heuristic", "random")

CSV_COLUMNS = ("m", "n_f", "method", "k", "mean_energy_j", "se_j", "ci_lo_j", "ci_hi_j", "mean_runtime_s")


@dataclass(frozen=True)
class ExperimentConfig:
    network: NetworkParams = field(default_factory=NetworkParams)
    n_flows_list: tuple[int, ...] = (70, 100)
    m_list: tuple[int, ...] = (5, 6, 7, 8, 9, 10)
    iterations: int = 200
    methods: tuple[str, ...] = ("heuristic", "random")
    exact_cap: int = 22
    master_seed: int = 0
    resample_retired_per_iteration: bool = False
    workers: int = 1
    timings: RuleTimings = DEFAULT_TIMINGS
    csv_path: str | None = None
    svg_energy_path: str | None = None
    svg_runtime_path: str | None = None

    def __post_init__(self):
        if self.iterations < 2:
            raise ConfigInvalid(f"iterations must be at least 2, got {self.iterations}")
        if not self.methods:
            raise ConfigInvalid("methods must not be empty")
        for method in self.methods:
            if method not in METHODS:
                raise ConfigInvalid(f"unknown method {method!r}; choose from {METHODS}")
        if len(set(self.methods)) != len(self.methods):
            raise ConfigInvalid("methods must not repeat")
        if not self.n_flows_list or not self.m_list:
            raise ConfigInvalid("n_flows_list and m_list must not be empty")
        for m in self.m_list:
            if not 0 <= m < self.network.num_uavs:
                raise ConfigInvalid(f"m={m} must be in [0, num_uavs)")
        for n_f in self.n_flows_list:
            if n_f < 1:
                raise ConfigInvalid(f"n_flows={n_f} must be positive")
        if self.workers < 1:
            raise ConfigInvalid(f"workers must be at least 1, got {self.workers}")
        if self.exact_cap < 0:
            raise ConfigInvalid(f"exact_cap must be non-negative, got {self.exact_cap}")


@dataclass(frozen=True)
class CellStats:
    """Monte Carlo summary of one (n_f, m, method) cell.

    ``samples`` carries the raw observations when the cell was produced by
    run_experiment; cells parsed back from CSV keep only the statistics.
    """

    n_f: int
    m: int
    method: str
    count: int
    samples: tuple[float, ...]
    mean: float
    se: float
    ci_lo: float
    ci_hi: float
    mean_runtime_s: float


@dataclass(frozen=True)
class McmcResult:
    config: ExperimentConfig
    cells: tuple[CellStats, ...]
    instance_digests: dict[tuple[int, int], tuple[str, ...]]


def summarize(samples) -> tuple[float, float, float, float]:
    """Sample mean, standard error, and 95% confidence interval bounds."""
    samples = list(samples)
    k = len(samples)
    if k < 2:
        raise TooFewSamples(f"need at least 2 samples, got {k}")
    mean = sum(samples) / k
    variance = sum((e - mean) ** 2 for e in samples) / (k - 1)
    se = math.sqrt(variance) / math.sqrt(k)
    return mean, se, mean - 1.96 * se, mean + 1.96 * se


def _derive_seed(master_seed: int, *parts) -> int:
    key = "|".join([str(master_seed), *map(str, parts)]).encode("ascii")
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "big")


def _instance_digest(instance) -> str:
    payload = json.dumps(instance_to_json(instance), sort_keys=True).encode("ascii")
    return hashlib.blake2b(payload, digest_size=8).hexdigest()


def _run_iteration(config: ExperimentConfig, net, n_f: int, m: int, retired, k: int):
    if config.resample_retired_per_iteration:
        rng = random.Random(_derive_seed(config.master_seed, "retired", n_f, m, k))
        retired = sample_retired_set(net, m, rng)
    flow_rng = random.Random(_derive_seed(config.master_seed, "flows", n_f, m, k))
    routes = sample_flow_routes(net, retired, n_f, flow_rng)
    build = build_instance(routes, [(u, net.hover_powers[u]) for u in sorted(retired)], config.timings)
    instance = build.instance
    outcomes = {}
    for method in config.methods:
        if method == "heuristic":
            result = heuristic_schedule(instance)
        elif method == "random":
            result = random_schedule(instance, _derive_seed(config.master_seed, "random", n_f, m, k))
        else:  # exact_dp, skipped beyond the cap
            if instance.n > config.exact_cap:
                outcomes[method] = None
                continue
            result = exact_schedule_dp(instance, max_flows=config.exact_cap)
        outcomes[method] = (result.energy, result.wall_time)
    return _instance_digest(instance), outcomes


def run_experiment(config: ExperimentConfig, progress=None) -> McmcResult:
    """Run every configured cell; deterministic in everything but wall times.

    ``progress``, when given, is called with each CellStats as soon as its
    cell completes, so callers can flush partial results on interruption.
    """
    net = generate_network(config.network, seed=_derive_seed(config.master_seed, "network"))
    cells = []
    digests: dict[tuple[int, int], tuple[str, ...]] = {}
    for n_f in config.n_flows_list:
        for m in config.m_list:
            retired = sample_retired_set(
                net, m, random.Random(_derive_seed(config.master_seed, "retired", n_f, m))
            )
            if config.workers == 1:
                iterations = [
                    _run_iteration(config, net, n_f, m, retired, k) for k in range(config.iterations)
                ]
            else:
                with ThreadPoolExecutor(max_workers=config.workers) as pool:
                    iterations = list(
                        pool.map(
                            lambda k: _run_iteration(config, net, n_f, m, retired, k),
                            range(config.iterations),
                        )
                    )
            digests[(n_f, m)] = tuple(digest for digest, _ in iterations)
            for method in config.methods:
                samples = []
                runtimes = []
                for _, outcomes in iterations:
                    outcome = outcomes[method]
                    if outcome is None:
                        continue
                    samples.append(outcome[0])
                    runtimes.append(outcome[1])
                if len(samples) < 2:
                    continue  # skipped cell: too few samples to summarize
                mean, se, ci_lo, ci_hi = summarize(samples)
                cell = CellStats(
                    n_f=n_f,
                    m=m,
                    method=method,
                    count=len(samples),
                    samples=tuple(samples),
                    mean=mean,
                    se=se,
                    ci_lo=ci_lo,
                    ci_hi=ci_hi,
                    mean_runtime_s=sum(runtimes) / len(runtimes),
                )
                cells.append(cell)
                if progress is not None:
                    progress(cell)
    return McmcResult(config=config, cells=tuple(cells), instance_digests=digests)


def _fmt(value: float) -> str:
    return format(value, ".9g")


def csv_text(cells) -> str:
    """Render cells as CSV, sorted by (n_f, m, method), 9 significant digits."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for cell in sorted(cells, key=lambda c: (c.n_f, c.m, c.method)):
        writer.writerow(
            [
                cell.m,
                cell.n_f,
                cell.method,
                cell.count,
                _fmt(cell.mean),
                _fmt(cell.se),
                _fmt(cell.ci_lo),
                _fmt(cell.ci_hi),
                _fmt(cell.mean_runtime_s),
            ]
        )
    return buffer.getvalue()


def write_csv(result: McmcResult, destination) -> str:
    text = csv_text(result.cells)
    try:
        Path(destination).write_text(text, encoding="ascii")
    except OSError as exc:
        raise IoFailure(f"could not write CSV {destination}: {exc}") from exc
    return text


def read_csv(source) -> tuple[CellStats, ...]:
    """Parse a results CSV back into cells (samples are not stored in CSV)."""
    try:
        text = Path(source).read_text(encoding="ascii")
    except OSError as exc:
        raise IoFailure(f"could not read CSV {source}: {exc}") from exc
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames is None or tuple(reader.fieldnames) != CSV_COLUMNS:
        raise ValueError(f"CSV columns must be {','.join(CSV_COLUMNS)}")
    cells = []
    for row in reader:
        cells.append(
            CellStats(
                n_f=int(row["n_f"]),
                m=int(row["m"]),
                method=row["method"],
                count=int(row["k"]),
                samples=(),
                mean=float(row["mean_energy_j"]),
                se=float(row["se_j"]),
                ci_lo=float(row["ci_lo_j"]),
                ci_hi=float(row["ci_hi_j"]),
                mean_runtime_s=float(row["mean_runtime_s"]),
            )
        )
    return tuple(cells)


_PALETTE = ("#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b")

_SVG_W, _SVG_H = 640, 420
_MARGIN_L, _MARGIN_R, _MARGIN_T, _MARGIN_B = 62, 170, 24, 46


def svg_text(cells, metric: str) -> str:
    """Self-contained line chart: x = retiring count, one series per method/flow count.

    Energy charts carry vertical error bars spanning the confidence interval.
    """
    if metric not in ("energy", "runtime"):
        raise ValueError(f"metric must be 'energy' or 'runtime', got {metric!r}")
    cells = list(cells)
    if not cells:
        raise ValueError("no cells to plot")
    series_keys = sorted({(c.method, c.n_f) for c in cells})
    ms = sorted({c.m for c in cells})
    if metric == "energy":
        y_top = max(c.ci_hi for c in cells)
        y_label = "mean hovering energy [J]"
    else:
        y_top = max(c.mean_runtime_s for c in cells)
        y_label = "mean scheduling time [s]"
    y_top = y_top * 1.08 if y_top > 0 else 1.0
    plot_w = _SVG_W - _MARGIN_L - _MARGIN_R
    plot_h = _SVG_H - _MARGIN_T - _MARGIN_B

    def x_of(m: int) -> float:
        if len(ms) == 1:
            return _MARGIN_L + plot_w / 2
        return _MARGIN_L + plot_w * (m - ms[0]) / (ms[-1] - ms[0])

    def y_of(value: float) -> float:
        return _MARGIN_T + plot_h * (1.0 - value / y_top)

    parts = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_SVG_W}" height="{_SVG_H}" '
        f'viewBox="0 0 {_SVG_W} {_SVG_H}" font-family="sans-serif" font-size="11">',
        f'<rect x="0" y="0" width="{_SVG_W}" height="{_SVG_H}" fill="white"/>',
        f'<line x1="{_MARGIN_L}" y1="{_MARGIN_T + plot_h}" x2="{_MARGIN_L + plot_w}" '
        f'y2="{_MARGIN_T + plot_h}" stroke="black"/>',
        f'<line x1="{_MARGIN_L}" y1="{_MARGIN_T}" x2="{_MARGIN_L}" y2="{_MARGIN_T + plot_h}" stroke="black"/>',
    ]
    for m in ms:
        x = x_of(m)
        parts.append(
            f'<text x="{x:.3f}" y="{_MARGIN_T + plot_h + 16}" text-anchor="middle">{m}</text>'
        )
    for tick in range(5):
        value = y_top * tick / 4
        y = y_of(value)
        parts.append(f'<line x1="{_MARGIN_L - 4}" y1="{y:.3f}" x2="{_MARGIN_L}" y2="{y:.3f}" stroke="black"/>')
        parts.append(
            f'<text x="{_MARGIN_L - 8}" y="{y + 4:.3f}" text-anchor="end">{format(value, ".4g")}</text>'
        )
    parts.append(
        f'<text x="{_MARGIN_L + plot_w / 2:.3f}" y="{_SVG_H - 10}" text-anchor="middle">'
        "UAVs taken out of service</text>"
    )
    parts.append(
        f'<text x="14" y="{_MARGIN_T + plot_h / 2:.3f}" text-anchor="middle" '
        f'transform="rotate(-90 14 {_MARGIN_T + plot_h / 2:.3f})">{y_label}</text>'
    )
    for index, (method, n_f) in enumerate(series_keys):
        color = _PALETTE[index % len(_PALETTE)]
        points = sorted(
            ((c.m, c) for c in cells if c.method == method and c.n_f == n_f), key=lambda t: t[0]
        )
        coords = " ".join(
            f"{x_of(m):.3f},{y_of(c.mean if metric == 'energy' else c.mean_runtime_s):.3f}"
            for m, c in points
        )
        parts.append(f'<polyline fill="none" stroke="{color}" stroke-width="1.5" points="{coords}"/>')
        for m, c in points:
            x = x_of(m)
            value = c.mean if metric == "energy" else c.mean_runtime_s
            if metric == "energy":
                y_lo, y_hi = y_of(max(c.ci_lo, 0.0)), y_of(c.ci_hi)
                parts.append(
                    f'<line class="errbar" x1="{x:.3f}" y1="{y_hi:.3f}" x2="{x:.3f}" y2="{y_lo:.3f}" '
                    f'stroke="{color}" stroke-width="1"/>'
                )
            parts.append(f'<circle cx="{x:.3f}" cy="{y_of(value):.3f}" r="3" fill="{color}"/>')
        legend_y = _MARGIN_T + 14 + 16 * index
        parts.append(
            f'<line x1="{_SVG_W - _MARGIN_R + 10}" y1="{legend_y - 4}" x2="{_SVG_W - _MARGIN_R + 30}" '
            f'y2="{legend_y - 4}" stroke="{color}" stroke-width="1.5"/>'
        )
        parts.append(
            f'<text x="{_SVG_W - _MARGIN_R + 35}" y="{legend_y}">{method}, {n_f} flows</text>'
        )
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_svg(result: McmcResult, metric: str, destination) -> str:
    text = svg_text(result.cells, metric)
    try:
        Path(destination).write_text(text, encoding="ascii")
    except OSError as exc:
        raise IoFailure(f"could not write SVG {destination}: {exc}") from exc
    return text


def config_from_json(data: dict) -> ExperimentConfig:
    """Parse an experiment config; field names mirror ExperimentConfig."""
    if not isinstance(data, dict):
        raise ConfigInvalid("experiment config must be a JSON object")
    known = {
        "network",
        "n_flows_list",
        "m_list",
        "iterations",
        "methods",
        "exact_cap",
        "master_seed",
        "resample_retired_per_iteration",
        "workers",
        "timings",
        "csv_path",
        "svg_energy_path",
        "svg_runtime_path",
    }
    unknown = set(data) - known
    if unknown:
        raise ConfigInvalid(f"unknown config fields: {sorted(unknown)}")
    try:
        network = params_from_json(data.get("network", {}))
    except ValueError as exc:
        raise ConfigInvalid(f"bad network params: {exc}") from exc
    timings_data = data.get("timings", {})
    timings = RuleTimings.from_milliseconds(
        float(timings_data.get("tau_del_ms", 5.0)),
        float(timings_data.get("tau_ins_ms", 5.0)),
        float(timings_data.get("tau_mod_ms", 10.0)),
    )
    defaults = ExperimentConfig(network=network, timings=timings)
    return replace(
        defaults,
        n_flows_list=tuple(int(v) for v in data.get("n_flows_list", defaults.n_flows_list)),
        m_list=tuple(int(v) for v in data.get("m_list", defaults.m_list)),
        iterations=int(data.get("iterations", defaults.iterations)),
        methods=tuple(data.get("methods", defaults.methods)),
        exact_cap=int(data.get("exact_cap", defaults.exact_cap)),
        master_seed=int(data.get("master_seed", defaults.master_seed)),
        resample_retired_per_iteration=bool(
            data.get("resample_retired_per_iteration", defaults.resample_retired_per_iteration)
        ),
        workers=int(data.get("workers", defaults.workers)),
        csv_path=data.get("csv_path"),
        svg_energy_path=data.get("svg_energy_path"),
        svg_runtime_path=data.get("svg_runtime_path"),
    )
