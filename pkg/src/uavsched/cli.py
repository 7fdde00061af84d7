"""Command-line front end: generation, scheduling, ILP export, experiments.

All randomness sits behind explicit --seed flags; rerunning a command with
the same flags reproduces the same files (measured wall times excepted).
Human-readable messages go to stderr, machine output to files only.

Exit codes: 0 success, 2 invalid input or parameters, 3 I/O failure,
4 solver size cap exceeded, 130 interrupted.
"""

import argparse
import json
import sys
from pathlib import Path

from . import experiment as exp
from . import model, netgen, ordering, sched
from .errors import (
    ConfigInvalid,
    EmptyInstance,
    EndpointRetired,
    InstanceTooLarge,
    InvalidInstance,
    InvalidSchedule,
    IoFailure,
    SamplingExhausted,
    TooFewSamples,
)

_INPUT_ERRORS = (
    ConfigInvalid,
    EmptyInstance,
    EndpointRetired,
    InvalidInstance,
    InvalidSchedule,
    SamplingExhausted,
    TooFewSamples,
    ValueError,
)


def _fail(message: str, code: int) -> int:
    print(f"error: {message}", file=sys.stderr)
    return code


def _load_json(path):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IoFailure(f"could not read {path}: {exc}") from exc
    return json.loads(text)


def _write_json(path, payload) -> None:
    try:
        Path(path).write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n", encoding="ascii")
    except OSError as exc:
        raise IoFailure(f"could not write {path}: {exc}") from exc


def cmd_gen_network(args) -> int:
    params = netgen.NetworkParams() if args.params is None else netgen.params_from_json(_load_json(args.params))
    net = netgen.generate_network(params, seed=args.seed)
    _write_json(args.out, netgen.network_to_json(params, net))
    print(f"wrote network with {net.num_uavs} UAVs to {args.out}", file=sys.stderr)
    return 0


def cmd_gen_instance(args) -> int:
    data = _load_json(args.network)
    timings = model.RuleTimings.from_milliseconds(args.tau_del_ms, args.tau_ins_ms, args.tau_mod_ms)
    has_scenario = isinstance(data, dict) and "retired" in data and "flows" in data
    if has_scenario:
        if args.flows is not None or args.retired is not None or args.seed is not None:
            return _fail("network file already carries a scenario; drop --flows/--retired/--seed", 2)
        params, net, retired, routes = netgen.scenario_from_json(data)
    else:
        if args.flows is None or args.retired is None or args.seed is None:
            return _fail("network file has no scenario; --flows, --retired, and --seed are required", 2)
        params, net = netgen.network_from_json(data)
        routes, retired = netgen.sample_scenario(net, args.flows, args.retired, seed=args.seed)
    build = model.build_instance(routes, [(u, net.hover_powers[u]) for u in sorted(retired)], timings)
    _write_json(args.out, model.instance_to_json(build.instance))
    if args.scenario_out:
        _write_json(args.scenario_out, netgen.scenario_to_json(params, net, retired, routes))
    print(
        f"wrote instance with n={build.instance.n} flows, m={build.instance.m} UAVs to {args.out}",
        file=sys.stderr,
    )
    return 0


_METHOD_MAP = {
    "heuristic": lambda instance, seed: sched.heuristic_schedule(instance),
    "random": lambda instance, seed: sched.random_schedule(instance, seed),
    "exact": lambda instance, seed: sched.exact_schedule_dp(instance),
    "bruteforce": lambda instance, seed: sched.brute_force_schedule(instance),
}


def cmd_schedule(args) -> int:
    instance = model.instance_from_json(_load_json(args.instance))
    if args.method == "random" and args.seed is None:
        return _fail("--method random requires --seed", 2)
    result = _METHOD_MAP[args.method](instance, args.seed)
    _write_json(
        args.out,
        {
            "schedule": list(result.schedule.order),
            "energy_j": result.energy,
            "method": result.method,
            "wall_time_s": result.wall_time,
        },
    )
    print(f"{result.method}: {result.energy} J in {result.wall_time:.6f} s", file=sys.stderr)
    return 0


def cmd_export_ilp(args) -> int:
    instance = model.instance_from_json(_load_json(args.instance))
    ilp = ordering.build_ilp(instance)
    ordering.export_lp(ilp, args.out)
    print(f"wrote LP with {ilp.variable_count} binaries to {args.out}", file=sys.stderr)
    return 0


def cmd_experiment(args) -> int:
    config = exp.config_from_json(_load_json(args.config))
    csv_path = args.csv or config.csv_path
    if csv_path is None:
        return _fail("no CSV destination: set csv_path in the config or pass --csv", 2)
    svg_energy = args.svg_energy or config.svg_energy_path
    svg_runtime = args.svg_runtime or config.svg_runtime_path
    completed = []
    try:
        result = exp.run_experiment(config, progress=completed.append)
    except KeyboardInterrupt:
        try:
            Path(csv_path).write_text("# incomplete\n" + exp.csv_text(completed), encoding="ascii")
        except OSError:
            pass
        print(f"interrupted; {len(completed)} completed cells flushed as incomplete", file=sys.stderr)
        return 130
    exp.write_csv(result, csv_path)
    if svg_energy:
        exp.emit_svg(result, "energy", svg_energy)
    if svg_runtime:
        exp.emit_svg(result, "runtime", svg_runtime)
    print(f"wrote {len(result.cells)} cells to {csv_path}", file=sys.stderr)
    return 0


def cmd_plot(args) -> int:
    cells = exp.read_csv(args.csv)
    if not cells:
        return _fail(f"CSV {args.csv} contains no data rows", 2)
    text = exp.svg_text(cells, args.metric)
    try:
        Path(args.out).write_text(text, encoding="ascii")
    except OSError as exc:
        raise IoFailure(f"could not write SVG {args.out}: {exc}") from exc
    print(f"wrote {args.metric} chart to {args.out}", file=sys.stderr)
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="uavsched",
        description="Energy-minimal handover scheduling for replacing UAV relays",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen-network", help="sample a random UAV network")
    p.add_argument("--params", help="network params JSON (defaults when omitted)")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_network)

    p = sub.add_parser("gen-instance", help="sample or convert a replacement instance")
    p.add_argument("--network", required=True, help="network JSON, optionally with retired/flows")
    p.add_argument("--flows", type=int, help="number of flows to sample")
    p.add_argument("--retired", type=int, help="number of UAVs to retire")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.add_argument("--scenario-out", help="also write the routed scenario JSON")
    p.add_argument("--tau-del-ms", type=float, default=5.0)
    p.add_argument("--tau-ins-ms", type=float, default=5.0)
    p.add_argument("--tau-mod-ms", type=float, default=10.0)
    p.set_defaults(func=cmd_gen_instance)

    p = sub.add_parser("schedule", help="schedule an instance file")
    p.add_argument("--instance", required=True)
    p.add_argument("--method", required=True, choices=sorted(_METHOD_MAP))
    p.add_argument("--seed", type=int)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_schedule)

    p = sub.add_parser("export-ilp", help="export the ordering ILP in LP format")
    p.add_argument("--instance", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_export_ilp)

    p = sub.add_parser("experiment", help="run a Monte Carlo experiment config")
    p.add_argument("--config", required=True)
    p.add_argument("--csv", help="override the config's csv_path")
    p.add_argument("--svg-energy", help="override the config's svg_energy_path")
    p.add_argument("--svg-runtime", help="override the config's svg_runtime_path")
    p.set_defaults(func=cmd_experiment)

    p = sub.add_parser("plot", help="render a chart from a results CSV")
    p.add_argument("--csv", required=True)
    p.add_argument("--metric", required=True, choices=("energy", "runtime"))
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_plot)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except json.JSONDecodeError as exc:
        return _fail(f"malformed JSON at line {exc.lineno}, column {exc.colno}: {exc.msg}", 2)
    except InstanceTooLarge as exc:
        return _fail(str(exc), 4)
    except _INPUT_ERRORS as exc:
        return _fail(str(exc), 2)
    except IoFailure as exc:
        return _fail(str(exc), 3)


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
