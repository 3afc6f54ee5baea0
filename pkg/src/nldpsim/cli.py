"""Command-line entry points.

Exit codes: 0 success, 2 configuration error, 3 numerical error.
"""

from __future__ import annotations

import argparse
import json
import sys

import numpy as np

from .harness import (
    ConfigError,
    ScenarioConfig,
    run_analytic,
    run_comparative,
    run_distance_sweep,
    run_power_sweep,
)
from .polarimeter import (
    histogram,
    read_histogram_csv,
    read_trace,
    sop_speed_series,
    variance_subtract,
    write_histogram_csv,
)
from .ssfm import AliasingError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    p.add_argument("--out", default=None, help="override the output directory")
    p.add_argument("--ensemble", type=int, default=None, help="override the ensemble size")
    p.add_argument("--format", choices=("csv", "json"), default="json",
                   help="stdout summary format")


def _load_config(args) -> ScenarioConfig:
    overrides = {}
    if args.seed is not None:
        overrides["seed"] = args.seed
    if args.out is not None:
        overrides["output_dir"] = args.out
    if args.ensemble is not None:
        overrides["ensemble_size"] = args.ensemble
    return ScenarioConfig.from_file(args.config, overrides)


def _emit(payload: dict, fmt: str) -> None:
    if fmt == "json":
        json.dump(payload, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")
    else:
        keys = sorted(payload)
        sys.stdout.write(",".join(keys) + "\n")
        sys.stdout.write(",".join(repr(payload[k]) for k in keys) + "\n")


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(
        prog="nldp",
        description="Nonlinear-depolarization simulation and analysis toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    for name, hlp in (
        ("simulate", "run the comparative probe/reference/boost scenario"),
        ("analytic", "evaluate the analytic predictions only"),
        ("sweep-distance", "sigma^2_NLDP versus transmission distance"),
        ("sweep-power", "sigma^2_NLDP versus repeater output power"),
    ):
        p = sub.add_parser(name, help=hlp)
        p.add_argument("config", help="scenario config file")
        _add_common(p)

    p = sub.add_parser("histogram", help="histogram a binary Stokes trace file")
    p.add_argument("trace", help="input .sopt trace file")
    p.add_argument("--bin-width", type=float, default=48.82e3, help="bin width in rad/s")
    p.add_argument("--out", default=None, help="output CSV path")

    p = sub.add_parser("compare", help="variance difference of two histogram CSVs")
    p.add_argument("hist_a", help="probe histogram CSV")
    p.add_argument("hist_b", help="reference histogram CSV")
    p.add_argument("--format", choices=("csv", "json"), default="json")

    args = parser.parse_args(argv)

    try:
        if args.command == "simulate":
            cfg = _load_config(args)
            r = run_comparative(cfg)
            _emit(
                {
                    "sigma2_probe": r.probe.variance,
                    "sigma2_reference": r.reference.variance,
                    "sigma2_boost": r.boost.variance,
                    "sigma2_nldp": r.sigma2_nldp,
                },
                args.format,
            )
        elif args.command == "analytic":
            cfg = _load_config(args)
            out = run_analytic(cfg)
            _emit({k: v for k, v in out.items() if k != "config"}, args.format)
        elif args.command == "sweep-distance":
            cfg = _load_config(args)
            rep = run_distance_sweep(cfg)
            _emit(
                {
                    "slope": rep.fit[0],
                    "intercept": rep.fit[1],
                    "r2": rep.fit[2],
                    "points": len(rep.points),
                },
                args.format,
            )
        elif args.command == "sweep-power":
            cfg = _load_config(args)
            rep = run_power_sweep(cfg)
            _emit(
                {
                    "slope": rep.fit[0],
                    "intercept": rep.fit[1],
                    "r2": rep.fit[2],
                    "points": len(rep.points),
                },
                args.format,
            )
        elif args.command == "histogram":
            trace = read_trace(args.trace)
            hist = histogram(sop_speed_series(trace), args.bin_width)
            out = args.out or (args.trace + ".hist.csv")
            write_histogram_csv(hist, out)
            print(out)
        elif args.command == "compare":
            a = read_histogram_csv(args.hist_a)
            b = read_histogram_csv(args.hist_b)
            d = variance_subtract(a, b)
            _emit({"sigma2_diff": d.value, "below_floor": d.below_floor}, args.format)
    except (ConfigError, FileNotFoundError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (AliasingError, FloatingPointError, np.linalg.LinAlgError) as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
