#!/usr/bin/env python3
"""Run a Monte Carlo sweep config and print a per-cell summary table.

Defaults to the reference-scale sweep next to this script; point --config at
scripts/desk.json for a seconds-long smoke run.
"""

import argparse
import json
import sys
from pathlib import Path

from uavsched import experiment as exp


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    here = Path(__file__).resolve().parent
    parser.add_argument("--config", default=str(here / "full_sweep.json"))
    parser.add_argument("--csv", help="override the config's csv_path")
    parser.add_argument("--svg-energy", help="override the config's svg_energy_path")
    parser.add_argument("--svg-runtime", help="override the config's svg_runtime_path")
    args = parser.parse_args(argv)

    config = exp.config_from_json(json.loads(Path(args.config).read_text()))
    result = exp.run_experiment(config)

    csv_path = args.csv or config.csv_path or "results.csv"
    exp.write_csv(result, csv_path)
    svg_energy = args.svg_energy or config.svg_energy_path
    svg_runtime = args.svg_runtime or config.svg_runtime_path
    if svg_energy:
        exp.emit_svg(result, "energy", svg_energy)
    if svg_runtime:
        exp.emit_svg(result, "runtime", svg_runtime)

    print(f"{'n_f':>5} {'m':>3} {'method':<10} {'mean [J]':>12} {'95% CI':>24} {'t [ms]':>9}", file=sys.stderr)
    for cell in sorted(result.cells, key=lambda c: (c.n_f, c.m, c.method)):
        ci = f"({cell.ci_lo:.2f}, {cell.ci_hi:.2f})"
        print(
            f"{cell.n_f:>5} {cell.m:>3} {cell.method:<10} {cell.mean:>12.3f} {ci:>24} "
            f"{cell.mean_runtime_s * 1e3:>9.3f}",
            file=sys.stderr,
        )
    print(f"wrote {csv_path}", file=sys.stderr)
    return 0


if __name__ == "__main__":
    sys.exit(main())
